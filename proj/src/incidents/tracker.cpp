#include "fusion/incidents/tracker.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <json.hpp>
#include <regex>
#include <set>

#include "fusion/error.hpp"
#include "fusion/text.hpp"

namespace fusion::incidents {

using nlohmann::json;

std::string_view to_string(IncidentType t) noexcept {
  switch (t) {
    case IncidentType::homicide: return "homicide";
    case IncidentType::shooting: return "shooting";
    case IncidentType::armed_robbery: return "armed_robbery";
    case IncidentType::seizure: return "seizure";
  }
  return "seizure";
}

std::optional<IncidentType> parse_incident_type(std::string_view s) noexcept {
  for (auto t : kIncidentPriority)
    if (to_string(t) == s) return t;
  return std::nullopt;
}

TrackerConfig load_tracker_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::BadConfig, "cannot open tracker config '" + path + "'");
  try {
    const auto j = json::parse(in);
    TrackerConfig cfg;
    cfg.criteria.min_body_length = j.value("min_body_length", std::size_t{80});
    for (const auto& [name, words] : j.at("incident_keywords").items()) {
      const auto type = parse_incident_type(name);
      if (!type) throw Error(Errc::BadConfig, "unknown incident type '" + name + "'");
      cfg.criteria.incident_keywords[*type] = words.get<std::vector<std::string>>();
    }
    cfg.criteria.firearm_keywords = j.at("firearm_keywords").get<std::vector<std::string>>();
    cfg.locations.countries = j.value("countries", std::map<std::string, std::string>{});
    cfg.locations.cities = j.value("cities", std::map<std::string, std::string>{});
    return cfg;
  } catch (const json::exception& e) {
    throw Error(Errc::BadConfig, "tracker config '" + path + "': " + e.what());
  }
}

namespace {

bool mentions_any(std::string_view body, const std::vector<std::string>& words) {
  for (const auto& w : words)
    if (text::find_word(body, w)) return true;
  return false;
}

bool mentions_incident(std::string_view body, const EligibilityCriteria& c) {
  for (const auto& [type, words] : c.incident_keywords)
    if (mentions_any(body, words)) return true;
  return false;
}

// Leftmost, then longest, phrase from `words`.
std::optional<std::pair<text::Span, const std::string*>> first_mention(std::string_view body,
                                                                      const std::vector<const std::string*>& words) {
  std::optional<std::pair<text::Span, const std::string*>> best;
  for (const auto* w : words) {
    const auto s = text::find_word(body, *w);
    if (!s) continue;
    if (!best || s->begin < best->first.begin ||
        (s->begin == best->first.begin && s->end > best->first.end))
      best = std::make_pair(*s, w);
  }
  return best;
}

}  // namespace

Eligibility filter_eligible(const std::vector<NewsArticle>& articles, const EligibilityCriteria& criteria) {
  Eligibility out;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < articles.size(); ++i) {
    const auto& a = articles[i];
    std::string_view reason;
    if (!seen.insert(a.url).second) reason = reasons::duplicate_url;
    else if (text::trim(a.body).size() < criteria.min_body_length || text::trim(a.body).empty()) reason = reasons::too_short;
    else if (!a.published) reason = reasons::no_date;
    else if (!mentions_incident(a.body, criteria)) reason = reasons::no_incident_keyword;
    else if (!mentions_any(a.body, criteria.firearm_keywords)) reason = reasons::no_firearm_keyword;

    if (reason.empty()) {
      out.eligible.push_back(a);
      out.eligible_index.push_back(i);
    } else {
      out.rejected.push_back({i, a.url, std::string(reason)});
    }
  }
  return out;
}

std::optional<Date> find_text_date(std::string_view text_in) {
  static const std::string months =
      "(january|february|march|april|may|june|july|august|september|october|november|december|"
      "jan|feb|mar|apr|jun|jul|aug|sep|sept|oct|nov|dec)";
  static const std::regex iso(R"(\b(\d{4})-(\d{2})-(\d{2})\b)");
  static const std::regex dmy(R"(\b(\d{1,2})/(\d{1,2})/(\d{4})\b)");
  static const std::regex day_month(R"(\b(\d{1,2})(?:st|nd|rd|th)?\s+)" + months + R"(\.?\s+(\d{4})\b)",
                                    std::regex::icase);
  static const std::regex month_day(R"(\b)" + months + R"(\.?\s+(\d{1,2})(?:st|nd|rd|th)?,?\s+(\d{4})\b)",
                                    std::regex::icase);
  static const std::array<std::string_view, 12> full{"january", "february", "march",     "april",   "may",      "june",
                                                     "july",    "august",   "september", "october", "november", "december"};
  auto month_number = [](const std::string& name) {
    const auto low = text::to_lower(name);
    for (std::size_t m = 0; m < full.size(); ++m)
      if (full[m].substr(0, 3) == std::string_view(low).substr(0, 3)) return static_cast<int>(m) + 1;
    return 0;
  };

  struct Candidate {
    std::size_t pos;
    int y, m, d;
  };
  std::vector<Candidate> found;
  const std::string s(text_in);
  auto scan = [&](const std::regex& re, auto build) {
    for (auto it = std::sregex_iterator(s.begin(), s.end(), re); it != std::sregex_iterator(); ++it)
      found.push_back(build(*it));
  };
  scan(iso, [](const std::smatch& m) {
    return Candidate{static_cast<std::size_t>(m.position(0)), std::stoi(m[1]), std::stoi(m[2]), std::stoi(m[3])};
  });
  scan(dmy, [](const std::smatch& m) {
    return Candidate{static_cast<std::size_t>(m.position(0)), std::stoi(m[3]), std::stoi(m[2]), std::stoi(m[1])};
  });
  scan(day_month, [&](const std::smatch& m) {
    return Candidate{static_cast<std::size_t>(m.position(0)), std::stoi(m[3]), month_number(m[2]), std::stoi(m[1])};
  });
  scan(month_day, [&](const std::smatch& m) {
    return Candidate{static_cast<std::size_t>(m.position(0)), std::stoi(m[3]), month_number(m[1]), std::stoi(m[2])};
  });
  std::stable_sort(found.begin(), found.end(), [](const Candidate& a, const Candidate& b) { return a.pos < b.pos; });
  for (const auto& c : found)
    if (is_valid_date(c.y, c.m, c.d)) return Date{c.y, c.m, c.d};
  return std::nullopt;
}

std::optional<int> find_count(std::string_view text_in, const std::vector<std::string>& nouns) {
  if (nouns.empty()) return std::nullopt;
  std::string alt;
  for (const auto& n : nouns) {
    if (!alt.empty()) alt += '|';
    alt += n;
  }
  const std::regex re(
      R"((?:^|[^\w-])(\d{1,3}|zero|one|two|three|four|five|six|seven|eight|nine|ten|eleven|twelve|thirteen|fourteen|fifteen|sixteen|seventeen|eighteen|nineteen|twenty)\s+(?:[a-z-]+\s+)?(?:)" +
          alt + R"()\b)",
      std::regex::icase);
  const std::string s(text_in);
  for (auto it = std::sregex_iterator(s.begin(), s.end(), re); it != std::sregex_iterator(); ++it)
    if (const auto n = text::parse_count((*it)[1].str())) return *n;
  return std::nullopt;
}

namespace {

const std::vector<std::string> kVictimNouns{"victims", "victim", "casualties", "fatalities", "dead",
                                            "killed",  "injured", "wounded"};
const std::vector<std::string> kPerpetratorNouns{"suspects",   "suspect",   "perpetrators", "perpetrator", "gunmen",
                                                 "gunman",     "attackers", "attacker",     "robbers",     "robber",
                                                 "assailants", "assailant", "shooters",     "shooter",     "offenders",
                                                 "offender"};

}  // namespace

IncidentRecord extract_incident(const NewsArticle& article, const TrackerConfig& config) {
  const std::string_view body = article.body;
  IncidentRecord r;
  r.source_url = article.url;

  bool typed = false;
  for (auto t : kIncidentPriority) {
    const auto it = config.criteria.incident_keywords.find(t);
    if (it != config.criteria.incident_keywords.end() && mentions_any(body, it->second)) {
      r.type = t;
      typed = true;
      break;
    }
  }
  if (!typed) throw Error(Errc::PreconditionUnmet, "article has no incident keyword", {article.url});

  if (auto d = find_text_date(body)) r.date = *d;
  else if (article.published) r.date = *article.published;
  else throw Error(Errc::PreconditionUnmet, "article has neither an in-text nor a published date", {article.url});

  std::vector<const std::string*> places;
  for (const auto& [name, code] : config.locations.countries) places.push_back(&name);
  for (const auto& [name, code] : config.locations.cities) places.push_back(&name);
  if (const auto hit = first_mention(body, places)) {
    const std::string& name = *hit->second;
    if (const auto c = config.locations.cities.find(name); c != config.locations.cities.end() &&
                                                           !config.locations.countries.count(name)) {
      r.country = c->second;
      r.city = name;
    } else {
      r.country = config.locations.countries.at(name);
      std::vector<const std::string*> same_country;
      for (const auto& [city, code] : config.locations.cities)
        if (code == r.country) same_country.push_back(&city);
      if (const auto city = first_mention(body, same_country)) r.city = *city->second;
    }
  } else {
    r.country = std::string(kUnknownCountry);
    r.warnings.emplace_back(to_string(Errc::NoLocationFound));
  }

  std::vector<const std::string*> firearms;
  for (const auto& f : config.criteria.firearm_keywords) firearms.push_back(&f);
  if (const auto hit = first_mention(body, firearms)) r.firearm = text::to_lower(*hit->second);

  r.victims = find_count(body, kVictimNouns);
  r.perpetrators = find_count(body, kPerpetratorNouns);
  return r;
}

namespace {

template <typename T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> get_opt(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

}  // namespace

std::string incident_to_json(const IncidentRecord& r) {
  json j{{"type", to_string(r.type)},
         {"date", r.date.iso()},
         {"country", r.country},
         {"city", opt(r.city)},
         {"firearm", opt(r.firearm)},
         {"victims", opt(r.victims)},
         {"perpetrators", opt(r.perpetrators)},
         {"source_url", r.source_url},
         {"warnings", r.warnings}};
  return j.dump();
}

IncidentRecord incident_from_json(std::string_view text_in) {
  try {
    const auto j = json::parse(text_in);
    IncidentRecord r;
    const auto type = parse_incident_type(j.at("type").get<std::string>());
    if (!type) throw Error(Errc::ParseError, "unknown incident type");
    r.type = *type;
    const auto date = Date::parse_iso(j.at("date").get<std::string>());
    if (!date) throw Error(Errc::ParseError, "unparseable incident date");
    r.date = *date;
    r.country = j.at("country").get<std::string>();
    r.city = get_opt<std::string>(j, "city");
    r.firearm = get_opt<std::string>(j, "firearm");
    r.victims = get_opt<int>(j, "victims");
    r.perpetrators = get_opt<int>(j, "perpetrators");
    r.source_url = j.value("source_url", "");
    r.warnings = j.value("warnings", std::vector<std::string>{});
    return r;
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, std::string("incident JSON: ") + e.what());
  }
}

domain::RawRecord incident_payload(const IncidentRecord& r, const std::string& id) {
  domain::RawRecord p{{"id", id},
                      {"kind", "event"},
                      {"date", r.date.iso()},
                      {"source", "news"},
                      {"incident_type", std::string(to_string(r.type))},
                      {"source_url", r.source_url}};
  if (r.country != kUnknownCountry) p["country"] = r.country;
  if (r.city) p["city"] = *r.city;
  if (r.firearm) p["firearm_type"] = *r.firearm;
  if (r.victims) p["victims"] = std::to_string(*r.victims);
  if (r.perpetrators) p["perpetrators"] = std::to_string(*r.perpetrators);
  return p;
}

}  // namespace fusion::incidents

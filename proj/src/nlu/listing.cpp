#include "fusion/nlu/listing.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <regex>
#include <set>

#include "fusion/error.hpp"
#include "fusion/text.hpp"

namespace fusion::nlu {

using nlohmann::json;

std::string_view to_string(PostProcess p) noexcept {
  switch (p) {
    case PostProcess::text: return "text";
    case PostProcess::number: return "number";
    case PostProcess::currency_split: return "currency-split";
  }
  return "text";
}

std::optional<PostProcess> parse_post_process(std::string_view s) noexcept {
  if (s == "text") return PostProcess::text;
  if (s == "number") return PostProcess::number;
  if (s == "currency-split") return PostProcess::currency_split;
  return std::nullopt;
}

namespace {

// Number token starting at the first digit: digits with ',' / '.' separators.
// A final separator followed by exactly three digits is a thousands mark,
// otherwise it is the decimal point.
std::optional<std::pair<double, std::size_t>> number_at(std::string_view s, std::size_t from = 0) {
  std::size_t b = from;
  while (b < s.size() && !std::isdigit(static_cast<unsigned char>(s[b]))) ++b;
  if (b == s.size()) return std::nullopt;
  std::size_t e = b;
  while (e < s.size() && (std::isdigit(static_cast<unsigned char>(s[e])) ||
                          ((s[e] == ',' || s[e] == '.') && e + 1 < s.size() &&
                           std::isdigit(static_cast<unsigned char>(s[e + 1])))))
    ++e;
  std::string tok(s.substr(b, e - b));
  const auto last = tok.find_last_of(",.");
  std::string digits;
  if (last == std::string::npos || tok.size() - last - 1 == 3) {
    for (char c : tok)
      if (std::isdigit(static_cast<unsigned char>(c))) digits += c;
  } else {
    for (std::size_t i = 0; i < tok.size(); ++i) {
      if (i == last)
        digits += '.';
      else if (std::isdigit(static_cast<unsigned char>(tok[i])))
        digits += tok[i];
    }
  }
  const auto v = text::parse_double(digits);
  if (!v) return std::nullopt;
  return std::make_pair(*v, e);
}

struct CurrencyMark {
  std::string_view mark;
  std::string_view code;
  bool word;  // needs word boundaries
};

constexpr CurrencyMark kMarks[] = {
    {"\xE2\x82\xAC", "EUR", false}, {"$", "USD", false},      {"\xC2\xA3", "GBP", false}, {"\xC2\xA5", "JPY", false},
    {"usd", "USD", true},           {"eur", "EUR", true},     {"gbp", "GBP", true},       {"chf", "CHF", true},
    {"btc", "BTC", true},           {"eth", "ETH", true},     {"xmr", "XMR", true},       {"euros", "EUR", true},
    {"euro", "EUR", true},          {"dollars", "USD", true}, {"dollar", "USD", true},    {"pounds", "GBP", true},
};

std::optional<std::string> currency_in(std::string_view s) {
  std::optional<std::pair<std::size_t, std::string_view>> best;
  for (const auto& m : kMarks) {
    std::optional<std::size_t> at;
    if (m.word) {
      if (auto span = text::find_word(s, m.mark)) at = span->begin;
    } else if (auto p = s.find(m.mark); p != std::string_view::npos) {
      at = p;
    }
    if (at && (!best || *at < best->first)) best = std::make_pair(*at, m.code);
  }
  if (!best) return std::nullopt;
  return std::string(best->second);
}

}  // namespace

std::optional<double> first_number(std::string_view s) {
  const auto n = number_at(s);
  if (!n) return std::nullopt;
  return n->first;
}

std::optional<Money> split_currency(std::string_view s) {
  const auto n = number_at(s);
  const auto code = currency_in(s);
  if (!n || !code) return std::nullopt;
  return Money{n->first, *code};
}

std::vector<Gazetteer::Hit> Gazetteer::firearm_hits(std::string_view text_in) const {
  std::vector<Hit> all;
  for (const auto& e : firearms) {
    std::size_t from = 0;
    while (auto span = text::find_word(text_in, e.term, from)) {
      all.push_back({span->begin, span->end, &e});
      from = span->begin + 1;
    }
  }
  std::sort(all.begin(), all.end(), [](const Hit& a, const Hit& b) {
    if (a.begin != b.begin) return a.begin < b.begin;
    return a.end - a.begin > b.end - b.begin;
  });
  std::vector<Hit> out;
  std::size_t covered = 0;
  for (const auto& h : all)
    if (out.empty() || h.begin >= covered) {
      out.push_back(h);
      covered = h.end;
    }
  return out;
}

namespace {

struct Match {
  std::size_t begin = 0, length = 0;
  std::string value;
};

// Leftmost, then longest.
void consider(std::optional<Match>& best, Match m) {
  if (!best || m.begin < best->begin || (m.begin == best->begin && m.length > best->length)) best = std::move(m);
}

std::optional<std::string> find_caliber(const std::string& s) {
  static const std::regex metric(R"((^|[^\w.])(\d{1,2}(?:[.,]\d{1,2})?)\s?(?:x\s?(\d{2,3})\s?)?mm\b)",
                                 std::regex::icase);
  static const std::regex imperial(
      R"((^|[^\w.])\.(\d{2,3})(?:\s?(acp|lr|win|wsm|magnum|mag|special|spl|s&w|auto|rem|nato)\b)?)", std::regex::icase);
  static const std::regex gauge(R"((^|[^\w.])(\d{1,2})\s?(?:ga|gauge)\b)", std::regex::icase);
  std::optional<Match> best;
  std::smatch m;
  if (std::regex_search(s, m, metric)) {
    std::string v = m[2].str();
    std::replace(v.begin(), v.end(), ',', '.');
    if (m[3].matched) v += "x" + m[3].str();
    consider(best, {static_cast<std::size_t>(m.position(2)), static_cast<std::size_t>(m.length(0) - m.length(1)), v + "mm"});
  }
  if (std::regex_search(s, m, imperial)) {
    std::string v = "." + m[2].str();
    if (m[3].matched) v += " " + text::to_upper(m[3].str());
    consider(best, {static_cast<std::size_t>(m.position(0) + m.length(1)), static_cast<std::size_t>(m.length(0) - m.length(1)), v});
  }
  if (std::regex_search(s, m, gauge))
    consider(best, {static_cast<std::size_t>(m.position(2)), static_cast<std::size_t>(m.length(0) - m.length(1)), m[2].str() + "ga"});
  if (!best) return std::nullopt;
  return best->value;
}

std::optional<int> find_quantity(const std::string& s) {
  static const std::regex times(R"((^|\s)x\s?(\d{1,4})\b)", std::regex::icase);
  static const std::regex pieces(
      R"(\b(\d{1,4}|one|two|three|four|five|six|seven|eight|nine|ten|eleven|twelve|thirteen|fourteen|fifteen|sixteen|seventeen|eighteen|nineteen|twenty)\s?(pcs|pc|pieces|piece|units|unit)\b)",
      std::regex::icase);
  std::optional<Match> best;
  for (auto it = std::sregex_iterator(s.begin(), s.end(), times); it != std::sregex_iterator(); ++it) {
    const auto n = text::parse_count((*it)[2].str());
    if (n && *n >= 1) {
      consider(best, {static_cast<std::size_t>(it->position(2)), static_cast<std::size_t>(it->length(0)), std::to_string(*n)});
      break;
    }
  }
  for (auto it = std::sregex_iterator(s.begin(), s.end(), pieces); it != std::sregex_iterator(); ++it) {
    const auto n = text::parse_count((*it)[1].str());
    if (n && *n >= 1) {
      consider(best, {static_cast<std::size_t>(it->position(0)), static_cast<std::size_t>(it->length(0)), std::to_string(*n)});
      break;
    }
  }
  if (!best) return std::nullopt;
  return std::stoi(best->value);
}

}  // namespace

Specs extract_specs(std::string_view description, const Gazetteer& gazetteer) {
  Specs out;
  const std::string s(description);
  out.caliber = find_caliber(s);
  out.quantity = find_quantity(s);
  const auto hits = gazetteer.firearm_hits(s);
  if (!hits.empty()) out.model = hits.front().entry->canonical;
  return out;
}

ListingRecord parse_listing(std::string_view html, const std::vector<HtmlRule>& rules, const Gazetteer& gazetteer) {
  if (text::trim(html).empty()) throw Error(Errc::MalformedHtml, "empty document");
  const auto root = parse_html(html);
  ListingRecord rec;
  std::optional<std::string> title, description;
  for (const auto& rule : rules) {
    const HtmlNode* node = select_first(*root, rule.selector);
    if (!node) continue;
    std::string value;
    if (rule.attribute) {
      const auto it = node->attrs.find(*rule.attribute);
      if (it == node->attrs.end()) continue;
      value = text::squash_spaces(it->second);
    } else {
      value = node->text_content();
    }
    if (value.empty()) continue;

    if (rule.field == "price") {
      if (rec.price) continue;
      if (rule.post == PostProcess::currency_split) {
        rec.price = split_currency(value);
      } else if (auto n = first_number(value)) {
        rec.price = Money{*n, ""};
      }
      if (rec.price && rec.price->amount < 0) rec.price.reset();
      continue;
    }
    if (rule.post == PostProcess::number) {
      const auto n = first_number(value);
      if (!n) continue;
      value = text::format_double(*n);
    }
    if (rule.field == "title" && !title) title = value;
    else if (rule.field == "description" && !description) description = value;
    else if (rule.field == "seller" && rec.seller.empty()) rec.seller = value;
    else if (rule.field == "shipping" && !rec.shipping) rec.shipping = value;
    else if (rule.field == "url" && rec.url.empty()) rec.url = value;
  }
  if (!title) throw Error(Errc::MissingRequiredField, "listing has no title", {"title"});
  if (!description) throw Error(Errc::MissingRequiredField, "listing has no description", {"description"});
  rec.title = *title;
  rec.raw_description = *description;
  rec.specs = extract_specs(rec.raw_description, gazetteer);
  return rec;
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

std::string listing_to_json(const ListingRecord& r) {
  json j{{"url", r.url},
         {"title", r.title},
         {"seller", r.seller},
         {"shipping", opt(r.shipping)},
         {"raw_description", r.raw_description},
         {"specs", {{"caliber", opt(r.specs.caliber)}, {"model", opt(r.specs.model)}, {"quantity", opt(r.specs.quantity)}}}};
  j["price"] = r.price ? json{{"amount", r.price->amount}, {"currency", r.price->currency}} : json(nullptr);
  return j.dump();
}

ListingRecord listing_from_json(std::string_view text_in) {
  try {
    const auto j = json::parse(text_in);
    ListingRecord r;
    r.url = j.value("url", "");
    r.title = j.at("title").get<std::string>();
    r.seller = j.value("seller", "");
    r.shipping = get_opt<std::string>(j, "shipping");
    r.raw_description = j.at("raw_description").get<std::string>();
    if (j.contains("price") && !j["price"].is_null())
      r.price = Money{j["price"].at("amount").get<double>(), j["price"].at("currency").get<std::string>()};
    if (j.contains("specs")) {
      const auto& s = j["specs"];
      r.specs.caliber = get_opt<std::string>(s, "caliber");
      r.specs.model = get_opt<std::string>(s, "model");
      r.specs.quantity = get_opt<int>(s, "quantity");
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, std::string("listing JSON: ") + e.what());
  }
}

std::vector<HtmlRule> load_ruleset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::BadConfig, "cannot open ruleset '" + path + "'");
  try {
    const auto j = json::parse(in);
    std::vector<HtmlRule> out;
    static const std::set<std::string> fields{"title", "description", "price", "seller", "shipping", "url"};
    for (const auto& r : j) {
      HtmlRule rule;
      rule.field = r.at("field").get<std::string>();
      if (!fields.contains(rule.field)) throw Error(Errc::BadConfig, "unknown listing field '" + rule.field + "'");
      rule.selector = Selector::parse(r.at("selector").get<std::string>());
      const auto post = parse_post_process(r.value("post", "text"));
      if (!post) throw Error(Errc::BadConfig, "unknown post-processing in rule for '" + rule.field + "'");
      rule.post = *post;
      if (r.contains("attribute")) rule.attribute = r["attribute"].get<std::string>();
      out.push_back(std::move(rule));
    }
    return out;
  } catch (const json::exception& e) {
    throw Error(Errc::BadConfig, "ruleset '" + path + "': " + e.what());
  }
}

Gazetteer load_gazetteer(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::BadConfig, "cannot open gazetteer '" + path + "'");
  try {
    const auto j = json::parse(in);
    Gazetteer g;
    for (const auto& e : j.value("firearms", json::array()))
      g.firearms.push_back({e.at("term").get<std::string>(), e.value("canonical", e.at("term").get<std::string>())});
    for (const auto& p : j.value("places", json::array())) g.places.push_back(p.get<std::string>());
    return g;
  } catch (const json::exception& e) {
    throw Error(Errc::BadConfig, "gazetteer '" + path + "': " + e.what());
  }
}

}  // namespace fusion::nlu

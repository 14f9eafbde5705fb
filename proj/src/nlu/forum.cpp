#include "fusion/nlu/forum.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <regex>
#include <set>

#include "fusion/error.hpp"
#include "fusion/text.hpp"

namespace fusion::nlu {

LexiconClassifier::LexiconClassifier(std::map<std::string, double> weights, double threshold)
    : weights_(std::move(weights)), threshold_(threshold) {}

double LexiconClassifier::raw_sum(std::string_view text_in) const {
  if (weights_.empty()) throw Error(Errc::UnloadedLexicon, "lexicon has no phrases loaded");
  double s = 0.0;
  for (const auto& [phrase, w] : weights_) s += w * static_cast<double>(text::count_word(text_in, phrase));
  return s;
}

double LexiconClassifier::score(std::string_view text_in) const {
  const double s = raw_sum(text_in);
  return s > 0.0 ? s / (1.0 + s) : 0.0;
}

std::string_view to_string(Intent i) noexcept {
  switch (i) {
    case Intent::offer: return "offer";
    case Intent::request: return "request";
    case Intent::exchange: return "exchange";
    case Intent::other: return "other";
  }
  return "other";
}

std::optional<Intent> parse_intent(std::string_view s) noexcept {
  for (auto i : {Intent::offer, Intent::request, Intent::exchange, Intent::other})
    if (to_string(i) == s) return i;
  return std::nullopt;
}

std::string_view to_string(EntityKind k) noexcept {
  switch (k) {
    case EntityKind::firearm: return "firearm";
    case EntityKind::caliber: return "caliber";
    case EntityKind::price: return "price";
    case EntityKind::location: return "location";
  }
  return "firearm";
}

LexiconIntentRecognizer::LexiconIntentRecognizer(LexiconClassifier offer, LexiconClassifier request,
                                                 LexiconClassifier exchange)
    : offer_(std::move(offer)), request_(std::move(request)), exchange_(std::move(exchange)) {}

Intent LexiconIntentRecognizer::recognize(std::string_view message) const {
  Intent best = Intent::other;
  double best_sum = 0.0;
  // Strict comparison keeps the earlier (higher priority) intent on ties.
  for (const auto& [intent, lex] : {std::pair{Intent::offer, &offer_}, std::pair{Intent::request, &request_},
                                    std::pair{Intent::exchange, &exchange_}}) {
    const double s = lex->raw_sum(message);
    if (s > best_sum) {
      best = intent;
      best_sum = s;
    }
  }
  return best;
}

std::string thread_text(const ForumThread& thread) {
  std::string out;
  for (const auto& m : thread.messages) {
    if (!out.empty()) out += '\n';
    out += m.text;
  }
  return out;
}

CascadeVerdict classify_thread(const ForumThread& thread, const TextClassifier& relevance,
                               const TextClassifier& suspicious) {
  CascadeVerdict v;
  const std::string all = thread_text(thread);
  if (text::trim(all).empty()) return v;
  v.relevant = relevance.accepts(all);
  if (v.relevant) v.suspicious = suspicious.accepts(all);
  return v;
}

Intent recognize_intent(std::string_view message, const IntentRecognizer& recognizer) {
  return recognizer.recognize(message);
}

namespace {

std::string take_code_points(std::string_view s, std::size_t n) {
  std::size_t i = 0, count = 0;
  while (i < s.size() && count < n) {
    const auto c = static_cast<unsigned char>(s[i]);
    const std::size_t len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xE ? 3 : (c >> 3) == 0x1E ? 4 : 1;
    if (i + len > s.size()) break;
    i += len;
    ++count;
  }
  return std::string(s.substr(0, i));
}

}  // namespace

ThreadExtraction extract_thread_info(const ForumThread& thread, const CascadeVerdict& verdict,
                                     const Gazetteer& gazetteer, std::size_t summary_budget) {
  const bool actionable = std::any_of(verdict.intents.begin(), verdict.intents.end(),
                                      [](Intent i) { return i != Intent::other; });
  if (!verdict.relevant || verdict.suspicious != true || !actionable)
    throw Error(Errc::PreconditionUnmet, "extraction needs a suspicious thread with an offer, request or exchange");
  if (verdict.intents.size() != thread.messages.size())
    throw Error(Errc::PreconditionUnmet, "verdict must carry one intent per message");

  static const std::regex price(
      R"((?:(?:€|\$|£)\s?\d[\d,.]*)|(?:\b\d[\d,.]*\s?(?:€|\$|£|(?:usd|eur|euros?|dollars?|btc|xmr)\b)))",
      std::regex::icase);
  ThreadExtraction out;
  std::set<std::pair<EntityKind, std::string>> seen;
  auto add = [&](EntityKind k, std::string value, std::size_t msg) {
    if (seen.emplace(k, value).second) out.entities.push_back({k, std::move(value), msg});
  };
  for (std::size_t i = 0; i < thread.messages.size(); ++i) {
    const std::string& t = thread.messages[i].text;
    for (const auto& h : gazetteer.firearm_hits(t)) add(EntityKind::firearm, h.entry->canonical, i);
    if (const auto specs = extract_specs(t, Gazetteer{}); specs.caliber) add(EntityKind::caliber, *specs.caliber, i);
    for (auto it = std::sregex_iterator(t.begin(), t.end(), price); it != std::sregex_iterator(); ++it)
      if (const auto money = split_currency(it->str()))
        add(EntityKind::price, text::format_double(money->amount) + " " + money->currency, i);
    for (const auto& place : gazetteer.places)
      if (text::find_word(t, place)) add(EntityKind::location, place, i);
  }

  std::string summary;
  for (std::size_t i = 0; i < thread.messages.size(); ++i) {
    if (i != 0 && verdict.intents[i] == Intent::other) continue;
    if (!summary.empty()) summary += '\n';
    summary += thread.messages[i].text;
  }
  out.summary = take_code_points(summary, summary_budget);
  return out;
}

CascadeVerdict run_cascade(const ForumThread& thread, const TextClassifier& relevance, const TextClassifier& suspicious,
                           const IntentRecognizer& intents, const Gazetteer& gazetteer, std::size_t summary_budget) {
  auto v = classify_thread(thread, relevance, suspicious);
  if (v.suspicious != true) return v;
  for (const auto& m : thread.messages) v.intents.push_back(intents.recognize(m.text));
  if (std::any_of(v.intents.begin(), v.intents.end(), [](Intent i) { return i != Intent::other; }))
    v.extraction = extract_thread_info(thread, v, gazetteer, summary_budget);
  return v;
}

namespace {

LexiconClassifier lexicon_from(const nlohmann::json& j) {
  std::map<std::string, double> w;
  for (const auto& [k, v] : j.at("terms").items()) w.emplace(k, v.get<double>());
  return LexiconClassifier(std::move(w), j.value("threshold", 0.5));
}

}  // namespace

Lexicons load_lexicons(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::UnloadedLexicon, "cannot open lexicon file '" + path + "'");
  try {
    const auto j = nlohmann::json::parse(in);
    const auto& intents = j.at("intents");
    return {lexicon_from(j.at("relevance")), lexicon_from(j.at("suspicious")), lexicon_from(intents.at("offer")),
            lexicon_from(intents.at("request")), lexicon_from(intents.at("exchange"))};
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::UnloadedLexicon, "lexicon file '" + path + "': " + e.what());
  }
}

}  // namespace fusion::nlu

#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fusion/nlu/listing.hpp"

namespace fusion::nlu {

struct ForumMessage {
  std::string author;
  std::string timestamp;
  std::string text;
};

struct ForumThread {
  std::string id;
  std::vector<ForumMessage> messages;
};

/// Pluggable text scorer: score in [0, 1], positive when score >= threshold.
class TextClassifier {
 public:
  virtual ~TextClassifier() = default;
  virtual double score(std::string_view text) const = 0;
  virtual double threshold() const = 0;
  bool accepts(std::string_view text) const { return score(text) >= threshold(); }
};

/// Weighted phrase lexicon. s = sum of weight * word-bounded occurrences;
/// score = s / (1 + s) for s > 0, else 0.
class LexiconClassifier final : public TextClassifier {
 public:
  LexiconClassifier() = default;
  LexiconClassifier(std::map<std::string, double> weights, double threshold);

  /// Throws Error(UnloadedLexicon) when constructed without phrases.
  double score(std::string_view text) const override;
  double threshold() const override { return threshold_; }
  double raw_sum(std::string_view text) const;
  bool loaded() const { return !weights_.empty(); }

 private:
  std::map<std::string, double> weights_;
  double threshold_ = 0.5;
};

enum class Intent { offer, request, exchange, other };

std::string_view to_string(Intent i) noexcept;
std::optional<Intent> parse_intent(std::string_view s) noexcept;

class IntentRecognizer {
 public:
  virtual ~IntentRecognizer() = default;
  virtual Intent recognize(std::string_view message) const = 0;
};

/// Highest lexicon sum wins; ties resolve offer > request > exchange; no
/// positive sum gives `other`.
class LexiconIntentRecognizer final : public IntentRecognizer {
 public:
  LexiconIntentRecognizer(LexiconClassifier offer, LexiconClassifier request, LexiconClassifier exchange);
  Intent recognize(std::string_view message) const override;

 private:
  LexiconClassifier offer_, request_, exchange_;
};

enum class EntityKind { firearm, caliber, price, location };
std::string_view to_string(EntityKind k) noexcept;

struct ThreadEntity {
  EntityKind kind;
  std::string text;   // canonical value
  std::size_t message = 0;

  bool operator==(const ThreadEntity&) const = default;
};

struct ThreadExtraction {
  std::vector<ThreadEntity> entities;
  std::string summary;
};

/// Gated outcome: `suspicious` only when relevant, `intents` (one per
/// message) only when suspicious.
struct CascadeVerdict {
  bool relevant = false;
  std::optional<bool> suspicious;
  std::vector<Intent> intents;
  std::optional<ThreadExtraction> extraction;
};

std::string thread_text(const ForumThread& thread);

/// Relevance then suspiciousness; an empty thread is irrelevant.
CascadeVerdict classify_thread(const ForumThread& thread, const TextClassifier& relevance,
                               const TextClassifier& suspicious);

Intent recognize_intent(std::string_view message, const IntentRecognizer& recognizer);

/// Entities (gazetteer firearms, calibers, prices, places) and an extractive
/// summary: the first message plus every message with a non-`other` intent,
/// joined by newlines and cut to `summary_budget` characters (code points).
/// Throws Error(PreconditionUnmet) unless the verdict is suspicious with at
/// least one offer/request/exchange intent.
ThreadExtraction extract_thread_info(const ForumThread& thread, const CascadeVerdict& verdict,
                                     const Gazetteer& gazetteer, std::size_t summary_budget);

/// Full pipeline: classify, label intents when suspicious, extract when any
/// actionable intent is present.
CascadeVerdict run_cascade(const ForumThread& thread, const TextClassifier& relevance, const TextClassifier& suspicious,
                           const IntentRecognizer& intents, const Gazetteer& gazetteer, std::size_t summary_budget);

struct Lexicons {
  LexiconClassifier relevance;
  LexiconClassifier suspicious;
  LexiconClassifier offer, request, exchange;
};

/// {"relevance": {"threshold": t, "terms": {phrase: weight}}, "suspicious": ...,
///  "intents": {"offer": {...}, "request": {...}, "exchange": {...}}}
Lexicons load_lexicons(const std::string& path);

}  // namespace fusion::nlu

#include "fusion/nlu/detectors.hpp"

#include <fstream>
#include <json.hpp>

#include "fusion/error.hpp"

namespace fusion::nlu {

Vocabulary::Vocabulary(std::vector<std::string> classes) : classes_(std::move(classes)) {
  for (const auto& c : classes_)
    if (!set_.insert(c).second) throw Error(Errc::BadConfig, "duplicate vocabulary class '" + c + "'");
}

DetectorConfig load_detector_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::BadConfig, "cannot open vocabulary file '" + path + "'");
  try {
    const auto j = nlohmann::json::parse(in);
    DetectorConfig cfg{Vocabulary(j.at("classes").get<std::vector<std::string>>()), {}};
    for (const auto& c : j.value("secondary_subset", std::vector<std::string>{})) {
      if (!cfg.vocabulary.contains(c)) throw Error(Errc::UnknownClass, "subset class '" + c + "' not in vocabulary");
      cfg.secondary_subset.insert(c);
    }
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::BadConfig, "vocabulary file '" + path + "': " + e.what());
  }
}

namespace {

void check(const DetectorPrediction& p, const Vocabulary& vocabulary) {
  if (!vocabulary.contains(p.label))
    throw Error(Errc::UnknownClass, "class '" + p.label + "' is not in the vocabulary", {p.detector});
  if (!(p.confidence >= 0.0 && p.confidence <= 1.0))
    throw Error(Errc::BadConfig, "confidence must lie in [0, 1]", {p.detector});
  if (!(p.known_accuracy > 0.0 && p.known_accuracy < 1.0))
    throw Error(Errc::BadConfig, "known accuracy must lie in (0, 1)", {p.detector});
}

}  // namespace

FusedPrediction fuse_detectors(const DetectorPrediction& p1, const DetectorPrediction& p2,
                               const Vocabulary& vocabulary, const std::set<std::string>& p2_subset) {
  check(p1, vocabulary);
  check(p2, vocabulary);
  if (p2_subset.count(p2.label) == 0) return {p1.label, p1.confidence, p1.detector};
  if (p1.label == p2.label)
    return {p1.label, 1.0 - (1.0 - p1.confidence) * (1.0 - p2.confidence), "agreement"};
  if (p2.known_accuracy * p2.confidence > p1.known_accuracy * p1.confidence)
    return {p2.label, p2.confidence, p2.detector};
  return {p1.label, p1.confidence, p1.detector};
}

}  // namespace fusion::nlu

#pragma once

#include <set>
#include <string>
#include <vector>

namespace fusion::nlu {

/// Closed set of visual entity classes shared by both detectors.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> classes);

  bool contains(const std::string& label) const { return set_.count(label) != 0; }
  const std::vector<std::string>& classes() const { return classes_; }
  std::size_t size() const { return classes_.size(); }

 private:
  std::vector<std::string> classes_;
  std::set<std::string> set_;
};

/// {"classes": [...], "secondary_subset": [...]}
struct DetectorConfig {
  Vocabulary vocabulary;
  std::set<std::string> secondary_subset;
};
DetectorConfig load_detector_config(const std::string& path);

struct DetectorPrediction {
  std::string detector;
  std::string label;
  double confidence = 0.0;
  double known_accuracy = 0.5;
};

struct FusedPrediction {
  std::string label;
  double confidence = 0.0;
  std::string source;  // "agreement" or the id of the detector whose label won

  bool operator==(const FusedPrediction&) const = default;
};

/// Agreement: noisy-OR of the confidences. Disagreement: the label with the
/// larger accuracy * confidence, p1 on ties. When p2's label lies outside
/// `p2_subset` the second detector abstains and p1 passes through unchanged.
/// Throws UnknownClass for labels outside the vocabulary and BadConfig for
/// confidences outside [0, 1] or accuracies outside (0, 1).
FusedPrediction fuse_detectors(const DetectorPrediction& p1, const DetectorPrediction& p2,
                               const Vocabulary& vocabulary, const std::set<std::string>& p2_subset);

}  // namespace fusion::nlu

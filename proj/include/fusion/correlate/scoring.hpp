#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fusion/domain/abstraction.hpp"
#include "fusion/domain/entity.hpp"

namespace fusion::correlate {

enum class Attribute { name, username, quarter, continent, firearm_class };
enum class Comparator { exact, fuzzy };

std::string_view to_string(Attribute a) noexcept;
std::optional<Attribute> parse_attribute(std::string_view s) noexcept;
std::optional<Comparator> parse_comparator(std::string_view s) noexcept;

inline constexpr double kFuzzyThreshold = 0.8;

struct CorrelationCriterion {
  Attribute attribute = Attribute::name;
  Comparator comparator = Comparator::exact;
  double weight = 1.0;
};

/// A raw record together with its abstraction; the unit being correlated.
struct CorrelationInput {
  domain::EntityRecord record;
  domain::AbstractedEntity abstracted;
};

struct PairScore {
  double score = 0.0;
  std::vector<Attribute> matched;  // in criteria order
};

struct CorrelationEdge {
  std::string a;  // a < b
  std::string b;
  double score = 0.0;
  std::vector<Attribute> matched;
  bool operator==(const CorrelationEdge&) const = default;
};

/// Throws Error(EmptyCriteria) / Error(InvalidCriterion).
void validate_criteria(std::span<const CorrelationCriterion> criteria);

/// The attribute value a criterion compares, case-folded; nullopt when the
/// entity has no value for it (absent values never satisfy a criterion).
std::optional<std::string> attribute_value(const CorrelationInput& e, Attribute attribute);

/// score = sum of weights of satisfied criteria / sum of all weights.
PairScore score_pair(const CorrelationInput& a, const CorrelationInput& b,
                     std::span<const CorrelationCriterion> criteria);

/// Every unordered pair with score >= threshold, ordered by (a, b).
/// Scoring is split over worker threads for large inputs; the output does
/// not depend on the schedule.
std::vector<CorrelationEdge> build_correlations(std::span<const CorrelationInput> entities,
                                                std::span<const CorrelationCriterion> criteria, double threshold,
                                                unsigned threads = 0);

}  // namespace fusion::correlate

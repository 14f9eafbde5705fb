#include "fusion/correlate/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "fusion/error.hpp"
#include "fusion/text.hpp"

namespace fusion::correlate {

std::string_view to_string(Attribute a) noexcept {
  switch (a) {
    case Attribute::name: return "name";
    case Attribute::username: return "username";
    case Attribute::quarter: return "quarter";
    case Attribute::continent: return "continent";
    case Attribute::firearm_class: return "firearm_class";
  }
  return "name";
}

std::optional<Attribute> parse_attribute(std::string_view s) noexcept {
  for (auto a : {Attribute::name, Attribute::username, Attribute::quarter, Attribute::continent,
                 Attribute::firearm_class})
    if (to_string(a) == s) return a;
  return std::nullopt;
}

std::optional<Comparator> parse_comparator(std::string_view s) noexcept {
  if (s == "exact") return Comparator::exact;
  if (s == "fuzzy") return Comparator::fuzzy;
  return std::nullopt;
}

void validate_criteria(std::span<const CorrelationCriterion> criteria) {
  if (criteria.empty()) throw Error(Errc::EmptyCriteria, "at least one correlation criterion is required");
  for (const auto& c : criteria) {
    if (!(c.weight > 0.0) || !std::isfinite(c.weight))
      throw Error(Errc::InvalidCriterion, "criterion on '" + std::string(to_string(c.attribute)) +
                                              "' needs a positive finite weight");
    if (c.comparator == Comparator::fuzzy && c.attribute != Attribute::name && c.attribute != Attribute::username)
      throw Error(Errc::InvalidCriterion, "fuzzy comparison only applies to name/username");
  }
}

std::optional<std::string> attribute_value(const CorrelationInput& e, Attribute attribute) {
  switch (attribute) {
    case Attribute::name:
      return e.record.name ? std::optional(text::to_lower(*e.record.name)) : std::nullopt;
    case Attribute::username:
      return e.record.username ? std::optional(text::to_lower(*e.record.username)) : std::nullopt;
    case Attribute::quarter:
      return e.abstracted.quarter;
    case Attribute::continent:
      return std::string(domain::to_string(e.abstracted.continent));
    case Attribute::firearm_class:
      return text::to_lower(e.abstracted.firearm_class);
  }
  return std::nullopt;
}

PairScore score_pair(const CorrelationInput& a, const CorrelationInput& b,
                     std::span<const CorrelationCriterion> criteria) {
  validate_criteria(criteria);
  PairScore out;
  double total = 0.0, satisfied = 0.0;
  for (const auto& c : criteria) {
    total += c.weight;
    const auto va = attribute_value(a, c.attribute);
    const auto vb = attribute_value(b, c.attribute);
    if (!va || !vb) continue;
    const bool hit =
        c.comparator == Comparator::exact ? *va == *vb : text::edit_similarity(*va, *vb) >= kFuzzyThreshold;
    if (hit) {
      satisfied += c.weight;
      out.matched.push_back(c.attribute);
    }
  }
  out.score = satisfied == total ? 1.0 : satisfied / total;
  return out;
}

std::vector<CorrelationEdge> build_correlations(std::span<const CorrelationInput> entities,
                                                std::span<const CorrelationCriterion> criteria, double threshold,
                                                unsigned threads) {
  validate_criteria(criteria);
  const std::size_t n = entities.size();
  if (n < 2) return {};
  if (threads == 0) threads = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
  if (n < 64) threads = 1;

  std::vector<std::vector<CorrelationEdge>> partial(threads);
  auto work = [&](unsigned worker) {
    for (std::size_t i = worker; i < n; i += threads) {
      for (std::size_t j = i + 1; j < n; ++j) {
        auto s = score_pair(entities[i], entities[j], criteria);
        if (s.score < threshold) continue;
        const auto& ia = entities[i].record.id;
        const auto& ib = entities[j].record.id;
        if (ia == ib) continue;
        partial[worker].push_back(
            CorrelationEdge{std::min(ia, ib), std::max(ia, ib), s.score, std::move(s.matched)});
      }
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }

  std::vector<CorrelationEdge> out;
  for (auto& p : partial) out.insert(out.end(), std::make_move_iterator(p.begin()), std::make_move_iterator(p.end()));
  std::sort(out.begin(), out.end(), [](const CorrelationEdge& x, const CorrelationEdge& y) {
    return std::tie(x.a, x.b) < std::tie(y.a, y.b);
  });
  return out;
}

}  // namespace fusion::correlate

#pragma once

#include <span>
#include <string>
#include <vector>

#include "fusion/evaluate/inference.hpp"

namespace fusion::evaluate {

/// Which nodes of the network carry priority and modus operandi.
struct SituationConfig {
  std::string priority_node = "priority";
  std::string high_state = "high";
  std::string cause_node = "cause";
};

/// P(priority = high | evidence). Throws MissingPriorityNode when the network
/// lacks a binary priority node containing the high state.
double event_priority(const BayesNet& net, const Evidence& evidence, const SituationConfig& config = {});

/// Posterior over the cause node; a point mass when the cause is observed.
/// Throws MissingCauseNode.
std::vector<double> cause_posterior(const BayesNet& net, const Evidence& evidence, const SituationConfig& config = {});

/// Cosine overlap of two non-negative distributions, clamped to [0, 1].
double cosine_overlap(std::span<const double> a, std::span<const double> b);

double event_similarity(const BayesNet& net, const Evidence& e1, const Evidence& e2,
                        const SituationConfig& config = {});

struct EventObservation {
  std::string id;
  Evidence evidence;
  double priority = 0.0;
  std::vector<double> cause_posterior;
};

/// Computes and caches priority and cause posterior for a stored event.
EventObservation observe_event(const BayesNet& net, std::string id, Evidence evidence,
                               const SituationConfig& config = {});

struct RankedEvent {
  std::string id;
  double similarity = 0.0;

  bool operator==(const RankedEvent&) const = default;
};

/// Top-k stored events by similarity to the traces; ties broken by ascending id.
std::vector<RankedEvent> query_similar_events(const BayesNet& net, const Evidence& traces,
                                              std::span<const EventObservation> store, std::size_t k,
                                              const SituationConfig& config = {});

}  // namespace fusion::evaluate

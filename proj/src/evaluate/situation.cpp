#include "fusion/evaluate/situation.hpp"

#include <algorithm>
#include <cmath>

#include "fusion/error.hpp"

namespace fusion::evaluate {

namespace {

std::size_t cause_index(const BayesNet& net, const SituationConfig& config) {
  const auto cause = net.index_of(config.cause_node);
  if (!cause) throw Error(Errc::MissingCauseNode, "network has no cause node '" + config.cause_node + "'");
  return *cause;
}

}  // namespace

double event_priority(const BayesNet& net, const Evidence& evidence, const SituationConfig& config) {
  const auto node = net.index_of(config.priority_node);
  if (!node || net.cardinality(*node) != 2 || !net.state_index(*node, config.high_state))
    throw Error(Errc::MissingPriorityNode,
                "network has no binary node '" + config.priority_node + "' with state '" + config.high_state + "'");
  const auto posterior = infer_posterior(net, config.priority_node, evidence);
  return posterior[*net.state_index(*node, config.high_state)];
}

std::vector<double> cause_posterior(const BayesNet& net, const Evidence& evidence, const SituationConfig& config) {
  const std::size_t cause = cause_index(net, config);
  if (const auto it = evidence.find(config.cause_node); it != evidence.end()) {
    const auto s = net.state_index(cause, it->second);
    if (!s) throw Error(Errc::InvalidEvidence, "'" + it->second + "' is not a state of '" + config.cause_node + "'");
    Evidence rest = evidence;
    rest.erase(config.cause_node);
    // Still reject evidence that contradicts the observed cause.
    if (infer_posterior(net, config.cause_node, rest)[*s] <= 0.0)
      throw Error(Errc::InconsistentEvidence, "evidence has zero probability under the network");
    std::vector<double> point(net.cardinality(cause), 0.0);
    point[*s] = 1.0;
    return point;
  }
  return infer_posterior(net, config.cause_node, evidence);
}

double cosine_overlap(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(Errc::InvalidEvidence, "cause posteriors differ in length");
  if (std::equal(a.begin(), a.end(), b.begin(), b.end())) return 1.0;
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na <= 0.0 || nb <= 0.0) return 0.0;
  return std::clamp(dot / std::sqrt(na * nb), 0.0, 1.0);
}

double event_similarity(const BayesNet& net, const Evidence& e1, const Evidence& e2, const SituationConfig& config) {
  return cosine_overlap(cause_posterior(net, e1, config), cause_posterior(net, e2, config));
}

EventObservation observe_event(const BayesNet& net, std::string id, Evidence evidence, const SituationConfig& config) {
  EventObservation obs;
  obs.id = std::move(id);
  obs.priority = event_priority(net, evidence, config);
  obs.cause_posterior = cause_posterior(net, evidence, config);
  obs.evidence = std::move(evidence);
  return obs;
}

std::vector<RankedEvent> query_similar_events(const BayesNet& net, const Evidence& traces,
                                              std::span<const EventObservation> store, std::size_t k,
                                              const SituationConfig& config) {
  if (k == 0) return {};
  const auto trace = cause_posterior(net, traces, config);
  std::vector<RankedEvent> ranked;
  ranked.reserve(store.size());
  for (const auto& e : store) ranked.push_back({e.id, cosine_overlap(trace, e.cause_posterior)});
  std::sort(ranked.begin(), ranked.end(), [](const RankedEvent& x, const RankedEvent& y) {
    if (x.similarity != y.similarity) return x.similarity > y.similarity;
    return x.id < y.id;
  });
  if (ranked.size() > k) ranked.resize(k);
  return ranked;
}

}  // namespace fusion::evaluate

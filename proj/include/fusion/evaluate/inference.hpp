#pragma once

#include <map>
#include <string>
#include <vector>

#include "fusion/evaluate/network.hpp"

namespace fusion::evaluate {

/// Observed node -> observed state.
using Evidence = std::map<std::string, std::string>;

struct InferenceOptions {
  /// Names of the hidden (non-query, non-evidence) nodes in elimination order.
  /// Empty selects a greedy min-neighbour order.
  std::vector<std::string> elimination_order;
};

/// Exact posterior over the states of `query` by variable elimination.
///
/// Throws UnknownNode, InvalidEvidence (unknown node or state),
/// EvidenceOnQueryNode, InconsistentEvidence (P(evidence) = 0) and BadConfig
/// for an elimination order that is not a permutation of the hidden nodes.
std::vector<double> infer_posterior(const BayesNet& net, std::string_view query, const Evidence& evidence,
                                    const InferenceOptions& options = {});

}  // namespace fusion::evaluate

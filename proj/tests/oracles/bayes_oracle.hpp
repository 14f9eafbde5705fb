#pragma once

// Full joint enumeration over every assignment of every node. Exponential,
// only for small networks.

#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "fusion/evaluate/network.hpp"

namespace oracle {

/// Returns P(query | evidence) or nullopt when P(evidence) = 0.
inline std::optional<std::vector<double>> enumerate_posterior(const fusion::evaluate::BayesNet& net,
                                                              std::size_t query,
                                                              const std::map<std::size_t, std::size_t>& evidence) {
  const std::size_t n = net.size();
  std::vector<std::size_t> a(n, 0);
  std::vector<double> acc(net.cardinality(query), 0.0);
  while (true) {
    bool consistent = true;
    for (const auto& [node, state] : evidence) consistent = consistent && a[node] == state;
    if (consistent) {
      double p = 1.0;
      for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::size_t> ps;
        for (auto q : net.parents(i)) ps.push_back(a[q]);
        p *= net.probability(i, a[i], ps);
      }
      acc[a[query]] += p;
    }
    std::size_t k = 0;
    for (; k < n; ++k) {
      if (++a[k] < net.cardinality(k)) break;
      a[k] = 0;
    }
    if (k == n) break;
  }
  double z = 0.0;
  for (double v : acc) z += v;
  if (z <= 0.0) return std::nullopt;
  for (double& v : acc) v /= z;
  return acc;
}

inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return dot / std::sqrt(na * nb);
}

/// Random DAG: each node draws up to 3 parents among earlier nodes; rows are
/// random and occasionally contain exact zeros.
inline fusion::evaluate::NetworkSpec random_network(std::mt19937& rng, std::size_t max_nodes = 8,
                                                    std::size_t max_states = 3) {
  fusion::evaluate::NetworkSpec spec;
  const auto n = std::uniform_int_distribution<std::size_t>(1, max_nodes)(rng);
  for (std::size_t i = 0; i < n; ++i) {
    fusion::evaluate::NodeSpec node;
    node.name = "n" + std::to_string(i);
    const auto card = std::uniform_int_distribution<std::size_t>(2, max_states)(rng);
    for (std::size_t s = 0; s < card; ++s) node.states.push_back("s" + std::to_string(s));
    for (std::size_t j = 0; j < i && node.parents.size() < 3; ++j)
      if (std::bernoulli_distribution(0.4)(rng)) node.parents.push_back(spec.nodes[j].name);
    spec.nodes.push_back(node);
  }
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto& node : spec.nodes) {
    std::vector<const std::vector<std::string>*> domains;
    for (const auto& p : node.parents)
      for (const auto& other : spec.nodes)
        if (other.name == p) domains.push_back(&other.states);
    std::vector<std::size_t> digit(domains.size(), 0);
    while (true) {
      std::vector<std::string> key;
      for (std::size_t k = 0; k < domains.size(); ++k) key.push_back((*domains[k])[digit[k]]);
      std::vector<double> row(node.states.size());
      double sum = 0.0;
      for (auto& p : row) {
        p = std::bernoulli_distribution(0.1)(rng) ? 0.0 : u(rng);
        sum += p;
      }
      if (sum == 0.0) {
        row[0] = 1.0;
        sum = 1.0;
      }
      for (auto& p : row) p /= sum;
      node.rows[key] = row;
      std::size_t k = domains.size();
      while (k > 0 && ++digit[k - 1] == domains[k - 1]->size()) digit[--k] = 0;
      if (k == 0) break;
    }
  }
  return spec;
}

}  // namespace oracle

#include "fusion/evaluate/inference.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>
#include <set>

#include "fusion/error.hpp"

namespace fusion::evaluate {

namespace {

// Table over `vars` (ascending node indices); the last variable varies fastest.
struct Factor {
  std::vector<std::size_t> vars;
  std::vector<std::size_t> card;
  std::vector<double> values;

  bool has(std::size_t v) const { return std::binary_search(vars.begin(), vars.end(), v); }

  std::vector<std::size_t> strides() const {
    std::vector<std::size_t> s(vars.size(), 1);
    for (std::size_t k = vars.size(); k-- > 1;) s[k - 1] = s[k] * card[k];
    return s;
  }
};

std::size_t table_size(const std::vector<std::size_t>& card) {
  return std::accumulate(card.begin(), card.end(), std::size_t{1}, std::multiplies<>());
}

// Visits every assignment in row-major order (last digit fastest).
template <typename Fn>
void for_each_assignment(const std::vector<std::size_t>& card, Fn&& fn) {
  std::vector<std::size_t> digit(card.size(), 0);
  const std::size_t total = table_size(card);
  for (std::size_t linear = 0; linear < total; ++linear) {
    fn(digit, linear);
    for (std::size_t k = card.size(); k-- > 0;) {
      if (++digit[k] < card[k]) break;
      digit[k] = 0;
    }
  }
}

Factor cpt_factor(const BayesNet& net, std::size_t node) {
  Factor f;
  f.vars = net.parents(node);
  f.vars.push_back(node);
  std::sort(f.vars.begin(), f.vars.end());
  for (auto v : f.vars) f.card.push_back(net.cardinality(v));
  f.values.resize(table_size(f.card));

  const auto& parents = net.parents(node);
  std::vector<std::size_t> pos_of_parent;
  for (auto p : parents) pos_of_parent.push_back(static_cast<std::size_t>(std::find(f.vars.begin(), f.vars.end(), p) - f.vars.begin()));
  const auto node_pos = static_cast<std::size_t>(std::find(f.vars.begin(), f.vars.end(), node) - f.vars.begin());
  std::vector<std::size_t> parent_states(parents.size());
  for_each_assignment(f.card, [&](const std::vector<std::size_t>& a, std::size_t linear) {
    for (std::size_t k = 0; k < parents.size(); ++k) parent_states[k] = a[pos_of_parent[k]];
    f.values[linear] = net.probability(node, a[node_pos], parent_states);
  });
  return f;
}

Factor restrict(const Factor& f, std::size_t var, std::size_t state) {
  Factor out;
  std::size_t var_pos = 0;
  for (std::size_t k = 0; k < f.vars.size(); ++k) {
    if (f.vars[k] == var) {
      var_pos = k;
      continue;
    }
    out.vars.push_back(f.vars[k]);
    out.card.push_back(f.card[k]);
  }
  out.values.resize(table_size(out.card));
  const auto in_strides = f.strides();
  for_each_assignment(out.card, [&](const std::vector<std::size_t>& a, std::size_t linear) {
    std::size_t idx = state * in_strides[var_pos];
    for (std::size_t k = 0, j = 0; k < f.vars.size(); ++k) {
      if (k == var_pos) continue;
      idx += a[j++] * in_strides[k];
    }
    out.values[linear] = f.values[idx];
  });
  return out;
}

Factor product(const Factor& a, const Factor& b) {
  Factor out;
  std::set_union(a.vars.begin(), a.vars.end(), b.vars.begin(), b.vars.end(), std::back_inserter(out.vars));
  for (auto v : out.vars) {
    const auto ia = std::find(a.vars.begin(), a.vars.end(), v);
    out.card.push_back(ia != a.vars.end() ? a.card[static_cast<std::size_t>(ia - a.vars.begin())]
                                          : b.card[static_cast<std::size_t>(std::find(b.vars.begin(), b.vars.end(), v) - b.vars.begin())]);
  }
  // Stride of each output position inside a and b (0 when absent).
  auto project = [&](const Factor& f) {
    std::vector<std::size_t> s(out.vars.size(), 0);
    const auto fs = f.strides();
    for (std::size_t k = 0; k < f.vars.size(); ++k)
      s[static_cast<std::size_t>(std::find(out.vars.begin(), out.vars.end(), f.vars[k]) - out.vars.begin())] = fs[k];
    return s;
  };
  const auto sa = project(a), sb = project(b);
  out.values.resize(table_size(out.card));
  for_each_assignment(out.card, [&](const std::vector<std::size_t>& d, std::size_t linear) {
    std::size_t ia = 0, ib = 0;
    for (std::size_t k = 0; k < d.size(); ++k) {
      ia += d[k] * sa[k];
      ib += d[k] * sb[k];
    }
    out.values[linear] = a.values[ia] * b.values[ib];
  });
  return out;
}

Factor sum_out(const Factor& f, std::size_t var) {
  Factor out;
  std::size_t var_pos = 0;
  for (std::size_t k = 0; k < f.vars.size(); ++k) {
    if (f.vars[k] == var) {
      var_pos = k;
      continue;
    }
    out.vars.push_back(f.vars[k]);
    out.card.push_back(f.card[k]);
  }
  out.values.assign(table_size(out.card), 0.0);
  const auto in_strides = f.strides();
  for_each_assignment(f.card, [&](const std::vector<std::size_t>& a, std::size_t linear) {
    std::size_t idx = 0;
    for (std::size_t k = 0; k < f.vars.size(); ++k)
      if (k != var_pos) idx = idx * f.card[k] + a[k];
    out.values[idx] += f.values[linear];
  });
  return out;
}

Factor multiply_all(const std::vector<Factor>& fs) {
  Factor acc{{}, {}, {1.0}};
  for (const auto& f : fs) acc = product(acc, f);
  return acc;
}

std::size_t neighbour_count(const std::vector<Factor>& factors, std::size_t var) {
  std::set<std::size_t> seen;
  for (const auto& f : factors)
    if (f.has(var)) seen.insert(f.vars.begin(), f.vars.end());
  return seen.size();
}

}  // namespace

std::vector<double> infer_posterior(const BayesNet& net, std::string_view query_name, const Evidence& evidence,
                                    const InferenceOptions& options) {
  const std::size_t query = net.require(query_name);
  std::map<std::size_t, std::size_t> observed;
  for (const auto& [name, state] : evidence) {
    const auto node = net.index_of(name);
    if (!node) throw Error(Errc::InvalidEvidence, "evidence names unknown node '" + name + "'");
    const auto s = net.state_index(*node, state);
    if (!s) throw Error(Errc::InvalidEvidence, "'" + state + "' is not a state of '" + name + "'");
    observed.emplace(*node, *s);
  }
  if (observed.contains(query))
    throw Error(Errc::EvidenceOnQueryNode, "query node '" + std::string(query_name) + "' is observed");

  std::vector<std::size_t> hidden_order;
  if (!options.elimination_order.empty()) {
    std::set<std::size_t> given;
    for (const auto& name : options.elimination_order) {
      const auto node = net.index_of(name);
      if (!node || *node == query || observed.contains(*node) || !given.insert(*node).second)
        throw Error(Errc::BadConfig, "elimination order entry '" + name + "' is not a distinct hidden node");
      hidden_order.push_back(*node);
    }
    if (given.size() + observed.size() + 1 != net.size())
      throw Error(Errc::BadConfig, "elimination order must list every hidden node");
  }

  // Only ancestors of the query and the evidence influence the result.
  std::vector<bool> relevant(net.size(), false);
  std::vector<std::size_t> stack{query};
  for (const auto& [node, state] : observed) stack.push_back(node);
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    if (relevant[v]) continue;
    relevant[v] = true;
    for (auto p : net.parents(v)) stack.push_back(p);
  }

  std::vector<Factor> factors;
  for (std::size_t i = 0; i < net.size(); ++i) {
    if (!relevant[i]) continue;
    Factor f = cpt_factor(net, i);
    for (const auto& [node, state] : observed)
      if (f.has(node)) f = restrict(f, node, state);
    factors.push_back(std::move(f));
  }

  auto eliminate = [&](std::size_t var) {
    std::vector<Factor> touching, rest;
    for (auto& f : factors) (f.has(var) ? touching : rest).push_back(std::move(f));
    if (!touching.empty()) rest.push_back(sum_out(multiply_all(touching), var));
    factors = std::move(rest);
  };

  if (!hidden_order.empty()) {
    for (auto v : hidden_order)
      if (relevant[v]) eliminate(v);
  } else {
    std::set<std::size_t> remaining;
    for (std::size_t i = 0; i < net.size(); ++i)
      if (relevant[i] && i != query && !observed.contains(i)) remaining.insert(i);
    while (!remaining.empty()) {
      std::size_t best = *remaining.begin();
      std::size_t best_cost = std::numeric_limits<std::size_t>::max();
      for (auto v : remaining) {
        const auto cost = neighbour_count(factors, v);
        if (cost < best_cost) {
          best = v;
          best_cost = cost;
        }
      }
      eliminate(best);
      remaining.erase(best);
    }
  }

  const Factor joint = multiply_all(factors);  // over {query} only
  std::vector<double> posterior = joint.values;
  const double z = std::accumulate(posterior.begin(), posterior.end(), 0.0);
  if (!(z > 0.0))
    throw Error(Errc::InconsistentEvidence, "evidence has zero probability under the network");
  for (auto& p : posterior) p /= z;
  return posterior;
}

}  // namespace fusion::evaluate

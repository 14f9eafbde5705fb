#include "fusion/evaluate/network.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "fusion/error.hpp"
#include "fusion/text.hpp"

namespace fusion::evaluate {

std::string_view to_string(ViolationKind k) noexcept {
  switch (k) {
    case ViolationKind::duplicate_node: return "DuplicateNodeViolation";
    case ViolationKind::empty_states: return "EmptyStatesViolation";
    case ViolationKind::duplicate_state: return "DuplicateStateViolation";
    case ViolationKind::unknown_parent: return "UnknownParentViolation";
    case ViolationKind::duplicate_parent: return "DuplicateParentViolation";
    case ViolationKind::cycle: return "CycleViolation";
    case ViolationKind::missing_row: return "MissingRowViolation";
    case ViolationKind::unexpected_row: return "UnexpectedRowViolation";
    case ViolationKind::row_arity: return "RowArityViolation";
    case ViolationKind::negative_probability: return "NegativeProbabilityViolation";
    case ViolationKind::normalization: return "NormalizationViolation";
  }
  return "Violation";
}

std::string Violation::describe() const {
  std::string out(to_string(kind));
  out += " node=" + node;
  if (!row.empty()) out += " row=[" + row + "]";
  if (!message.empty()) out += ": " + message;
  return out;
}

namespace {

std::string row_label(const std::vector<std::string>& parents, const std::vector<std::string>& key) {
  if (parents.empty() && key.empty()) return "prior";
  std::vector<std::string> parts;
  for (std::size_t i = 0; i < key.size(); ++i)
    parts.push_back((i < parents.size() ? parents[i] : "?") + "=" + key[i]);
  return text::join(parts, ", ");
}

// Calls fn for every combination of parent states, first parent most significant.
void for_each_combination(const std::vector<const std::vector<std::string>*>& domains,
                          const std::function<void(const std::vector<std::string>&)>& fn) {
  std::vector<std::size_t> digit(domains.size(), 0);
  for (const auto* d : domains)
    if (d->empty()) return;
  std::vector<std::string> key(domains.size());
  while (true) {
    for (std::size_t i = 0; i < domains.size(); ++i) key[i] = (*domains[i])[digit[i]];
    fn(key);
    std::size_t pos = domains.size();
    while (pos > 0) {
      --pos;
      if (++digit[pos] < domains[pos]->size()) break;
      digit[pos] = 0;
      if (pos == 0) return;
    }
    if (domains.empty()) return;
  }
}

}  // namespace

std::vector<Violation> validate_network(const NetworkSpec& spec) {
  std::vector<Violation> out;
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < spec.nodes.size(); ++i) {
    const auto& n = spec.nodes[i];
    if (!index.emplace(n.name, i).second)
      out.push_back({ViolationKind::duplicate_node, n.name, "", "node declared more than once"});
    if (n.states.empty()) out.push_back({ViolationKind::empty_states, n.name, "", "node has no states"});
    std::set<std::string> seen;
    for (const auto& s : n.states)
      if (!seen.insert(s).second)
        out.push_back({ViolationKind::duplicate_state, n.name, "", "state '" + s + "' repeated"});
  }

  std::vector<bool> parents_ok(spec.nodes.size(), true);
  for (std::size_t i = 0; i < spec.nodes.size(); ++i) {
    const auto& n = spec.nodes[i];
    std::set<std::string> seen;
    for (const auto& p : n.parents) {
      if (!index.contains(p)) {
        out.push_back({ViolationKind::unknown_parent, n.name, "", "parent '" + p + "' is not declared"});
        parents_ok[i] = false;
      }
      if (!seen.insert(p).second) {
        out.push_back({ViolationKind::duplicate_parent, n.name, "", "parent '" + p + "' listed twice"});
        parents_ok[i] = false;
      }
    }
  }

  // Cycles: group nodes that reach themselves into strongly connected sets.
  const std::size_t n = spec.nodes.size();
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> stack;
    for (const auto& p : spec.nodes[i].parents)
      if (auto it = index.find(p); it != index.end()) stack.push_back(it->second);
    while (!stack.empty()) {
      const std::size_t j = stack.back();
      stack.pop_back();
      if (reach[i][j]) continue;
      reach[i][j] = true;
      for (const auto& p : spec.nodes[j].parents)
        if (auto it = index.find(p); it != index.end()) stack.push_back(it->second);
    }
  }
  std::vector<bool> reported(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (!reach[i][i] || reported[i]) continue;
    std::vector<std::string> members;
    for (std::size_t j = 0; j < n; ++j)
      if (reach[i][j] && reach[j][i]) {
        members.push_back(spec.nodes[j].name);
        reported[j] = true;
      }
    out.push_back({ViolationKind::cycle, spec.nodes[i].name, "", "cycle through " + text::join(members, ", ")});
  }

  for (std::size_t i = 0; i < n; ++i) {
    const auto& node = spec.nodes[i];
    if (!parents_ok[i]) continue;
    std::vector<const std::vector<std::string>*> domains;
    for (const auto& p : node.parents) domains.push_back(&spec.nodes[index.at(p)].states);

    std::set<std::vector<std::string>> expected;
    for_each_combination(domains, [&](const std::vector<std::string>& key) {
      expected.insert(key);
      const auto it = node.rows.find(key);
      if (it == node.rows.end()) {
        out.push_back({ViolationKind::missing_row, node.name, row_label(node.parents, key), "no distribution given"});
        return;
      }
      const auto& probs = it->second;
      const std::string label = row_label(node.parents, key);
      if (probs.size() != node.states.size()) {
        out.push_back({ViolationKind::row_arity, node.name, label,
                       std::to_string(probs.size()) + " probabilities for " + std::to_string(node.states.size()) +
                           " states"});
        return;
      }
      double sum = 0.0;
      bool bad = false;
      for (double p : probs) {
        if (!std::isfinite(p) || p < 0.0) bad = true;
        sum += p;
      }
      if (bad) out.push_back({ViolationKind::negative_probability, node.name, label, "probabilities must be finite and >= 0"});
      if (!(std::fabs(sum - 1.0) <= kRowTolerance))
        out.push_back({ViolationKind::normalization, node.name, label, "row sums to " + text::format_double(sum)});
    });
    for (const auto& [key, probs] : node.rows)
      if (!expected.contains(key))
        out.push_back({ViolationKind::unexpected_row, node.name, row_label(node.parents, key),
                       "row does not match the parent states"});
  }
  return out;
}

BayesNet BayesNet::from_spec(const NetworkSpec& spec) {
  const auto violations = validate_network(spec);
  if (!violations.empty()) {
    std::vector<std::string> details;
    for (const auto& v : violations) details.push_back(v.describe());
    throw Error(Errc::InvalidNetwork, std::to_string(violations.size()) + " network violation(s)", details);
  }
  BayesNet net;
  for (std::size_t i = 0; i < spec.nodes.size(); ++i) {
    net.names_.push_back(spec.nodes[i].name);
    net.states_.push_back(spec.nodes[i].states);
    net.index_.emplace(spec.nodes[i].name, i);
  }
  for (const auto& node : spec.nodes) {
    std::vector<std::size_t> parents;
    std::vector<const std::vector<std::string>*> domains;
    for (const auto& p : node.parents) {
      parents.push_back(net.index_.at(p));
      domains.push_back(&net.states_[parents.back()]);
    }
    std::vector<double> flat;
    for_each_combination(domains, [&](const std::vector<std::string>& key) {
      const auto& row = node.rows.at(key);
      flat.insert(flat.end(), row.begin(), row.end());
    });
    net.parents_.push_back(std::move(parents));
    net.cpts_.push_back(std::move(flat));
  }

  // Kahn's algorithm; ties resolved by declaration order.
  std::vector<std::size_t> pending(net.size());
  std::vector<std::vector<std::size_t>> children(net.size());
  for (std::size_t i = 0; i < net.size(); ++i) {
    pending[i] = net.parents_[i].size();
    for (auto p : net.parents_[i]) children[p].push_back(i);
  }
  std::set<std::size_t> ready;
  for (std::size_t i = 0; i < net.size(); ++i)
    if (pending[i] == 0) ready.insert(i);
  while (!ready.empty()) {
    const std::size_t i = *ready.begin();
    ready.erase(ready.begin());
    net.topo_.push_back(i);
    for (auto c : children[i])
      if (--pending[c] == 0) ready.insert(c);
  }
  return net;
}

std::optional<std::size_t> BayesNet::index_of(std::string_view name) const {
  const auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t BayesNet::require(std::string_view name) const {
  if (auto i = index_of(name)) return *i;
  throw Error(Errc::UnknownNode, "network has no node '" + std::string(name) + "'");
}

std::optional<std::size_t> BayesNet::state_index(std::size_t node, std::string_view state) const {
  const auto& s = states_[node];
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i] == state) return i;
  return std::nullopt;
}

double BayesNet::probability(std::size_t node, std::size_t state, std::span<const std::size_t> parent_states) const {
  std::size_t row = 0;
  const auto& ps = parents_[node];
  for (std::size_t k = 0; k < ps.size(); ++k) row = row * states_[ps[k]].size() + parent_states[k];
  return cpts_[node][row * states_[node].size() + state];
}

NetworkSpec BayesNet::to_spec() const {
  NetworkSpec spec;
  for (std::size_t i = 0; i < size(); ++i) {
    NodeSpec n{names_[i], states_[i], {}, {}};
    std::vector<const std::vector<std::string>*> domains;
    for (auto p : parents_[i]) {
      n.parents.push_back(names_[p]);
      domains.push_back(&states_[p]);
    }
    std::size_t row = 0;
    const std::size_t card = states_[i].size();
    for_each_combination(domains, [&](const std::vector<std::string>& key) {
      n.rows[key].assign(cpts_[i].begin() + static_cast<std::ptrdiff_t>(row * card),
                         cpts_[i].begin() + static_cast<std::ptrdiff_t>((row + 1) * card));
      ++row;
    });
    spec.nodes.push_back(std::move(n));
  }
  return spec;
}

// ---- text format -----------------------------------------------------------

namespace {

[[noreturn]] void parse_fail(std::size_t line, const std::string& msg) {
  throw Error(Errc::ParseError, "network line " + std::to_string(line) + ": " + msg);
}

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!text::is_word_char(c) && c != '-' && c != '.') return false;
  return true;
}

std::vector<std::string> identifier_list(std::string_view s, std::size_t line) {
  std::vector<std::string> out;
  if (text::trim(s).empty()) return out;
  for (const auto& part : text::split(s, ',')) {
    auto id = text::trim(part);
    if (!is_identifier(id)) parse_fail(line, "bad identifier '" + id + "'");
    out.push_back(std::move(id));
  }
  return out;
}

}  // namespace

NetworkSpec parse_network(std::istream& in) {
  NetworkSpec spec;
  std::map<std::string, std::size_t> index;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string line = text::trim(raw);
    if (line.empty()) continue;

    if (line.starts_with("node ")) {
      const auto open = line.find('{'), close = line.find('}');
      if (open == std::string::npos || close == std::string::npos || close < open)
        parse_fail(line_no, "expected 'node <name> {states}'");
      NodeSpec node;
      node.name = text::trim(std::string_view(line).substr(5, open - 5));
      if (!is_identifier(node.name)) parse_fail(line_no, "bad node name '" + node.name + "'");
      node.states = identifier_list(std::string_view(line).substr(open + 1, close - open - 1), line_no);
      const std::string rest = text::trim(std::string_view(line).substr(close + 1));
      if (!rest.empty()) {
        if (rest[0] != '|') parse_fail(line_no, "expected '| parents' after states");
        node.parents = identifier_list(std::string_view(rest).substr(1), line_no);
      }
      index[node.name] = spec.nodes.size();
      spec.nodes.push_back(std::move(node));
    } else if (line.starts_with("prob ")) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) parse_fail(line_no, "expected '=' in prob statement");
      std::string head = text::trim(std::string_view(line).substr(5, eq - 5));
      std::vector<std::string> key;
      if (const auto bar = head.find('|'); bar != std::string::npos) {
        key = identifier_list(std::string_view(head).substr(bar + 1), line_no);
        head = text::trim(std::string_view(head).substr(0, bar));
      }
      const auto it = index.find(head);
      if (it == index.end()) parse_fail(line_no, "prob for undeclared node '" + head + "'");
      std::vector<double> probs;
      for (const auto& part : text::split(std::string_view(line).substr(eq + 1), ',')) {
        const auto v = text::parse_double(text::trim(part));
        if (!v) parse_fail(line_no, "bad probability '" + text::trim(part) + "'");
        probs.push_back(*v);
      }
      auto& rows = spec.nodes[it->second].rows;
      if (rows.contains(key)) parse_fail(line_no, "duplicate row for '" + head + "'");
      rows.emplace(std::move(key), std::move(probs));
    } else {
      parse_fail(line_no, "unknown statement");
    }
  }
  return spec;
}

NetworkSpec parse_network_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ParseError, "cannot open network file '" + path + "'");
  return parse_network(in);
}

std::string serialize_network(const NetworkSpec& spec) {
  std::ostringstream out;
  for (const auto& n : spec.nodes) {
    out << "node " << n.name << " {" << text::join(n.states, ", ") << "}";
    if (!n.parents.empty()) out << " | " << text::join(n.parents, ", ");
    out << "\n";
  }
  for (const auto& n : spec.nodes) {
    for (const auto& [key, probs] : n.rows) {
      out << "prob " << n.name;
      if (!key.empty()) out << " | " << text::join(key, ", ");
      out << " =";
      for (std::size_t i = 0; i < probs.size(); ++i) out << (i ? ", " : " ") << text::format_double(probs[i]);
      out << "\n";
    }
  }
  return out.str();
}

}  // namespace fusion::evaluate

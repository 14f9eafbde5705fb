#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fusion::evaluate {

/// Unvalidated node description as read from a network file.
struct NodeSpec {
  std::string name;
  std::vector<std::string> states;
  std::vector<std::string> parents;
  /// Parent-state combination (in `parents` order) -> distribution over `states`.
  /// Parentless nodes use the empty key.
  std::map<std::vector<std::string>, std::vector<double>> rows;
};

struct NetworkSpec {
  std::vector<NodeSpec> nodes;
};

enum class ViolationKind {
  duplicate_node,
  empty_states,
  duplicate_state,
  unknown_parent,
  duplicate_parent,
  cycle,
  missing_row,
  unexpected_row,
  row_arity,
  negative_probability,
  normalization,
};

std::string_view to_string(ViolationKind k) noexcept;

struct Violation {
  ViolationKind kind;
  std::string node;
  std::string row;  // "a=x, b=y"; empty when not about a row
  std::string message;

  std::string describe() const;
};

inline constexpr double kRowTolerance = 1e-9;

/// Checks structure and CPTs; reports every violation found instead of throwing.
std::vector<Violation> validate_network(const NetworkSpec& spec);

/// Immutable, validated network. CPTs are flat: row index is the mixed-radix
/// number of the parent states (first parent most significant), and entry
/// (row, s) lives at row * cardinality + s.
class BayesNet {
 public:
  /// Throws Error(InvalidNetwork) carrying each violation as a detail.
  static BayesNet from_spec(const NetworkSpec& spec);

  std::size_t size() const { return names_.size(); }
  std::optional<std::size_t> index_of(std::string_view name) const;
  /// Throws Error(UnknownNode).
  std::size_t require(std::string_view name) const;

  const std::string& name(std::size_t i) const { return names_[i]; }
  const std::vector<std::string>& states(std::size_t i) const { return states_[i]; }
  std::size_t cardinality(std::size_t i) const { return states_[i].size(); }
  std::optional<std::size_t> state_index(std::size_t node, std::string_view state) const;
  const std::vector<std::size_t>& parents(std::size_t i) const { return parents_[i]; }
  const std::vector<double>& cpt(std::size_t i) const { return cpts_[i]; }
  const std::vector<std::size_t>& topological_order() const { return topo_; }

  /// P(node = state | parents = parent_states).
  double probability(std::size_t node, std::size_t state, std::span<const std::size_t> parent_states) const;

  NetworkSpec to_spec() const;

 private:
  std::vector<std::string> names_;
  std::vector<std::vector<std::string>> states_;
  std::vector<std::vector<std::size_t>> parents_;
  std::vector<std::vector<double>> cpts_;
  std::vector<std::size_t> topo_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

/// Text format, one statement per line, '#' starts a comment:
///   node <name> {<state>, ...} [| <parent>, ...]
///   prob <name> = p1, p2, ...
///   prob <name> | <parent_state>, ... = p1, p2, ...
/// Throws Error(ParseError) naming the offending line.
NetworkSpec parse_network(std::istream& in);
NetworkSpec parse_network_file(const std::string& path);
std::string serialize_network(const NetworkSpec& spec);

}  // namespace fusion::evaluate

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace fusion::graph {

using Properties = std::map<std::string, std::string>;

struct PropertyNode {
  std::string id;
  std::string label;
  Properties properties;
  bool operator==(const PropertyNode&) const = default;
};

struct EdgeKey {
  std::string src;
  std::string dst;
  std::string relation;
  auto operator<=>(const EdgeKey&) const = default;
};

struct PropertyEdge {
  std::string src;
  std::string dst;
  std::string relation;
  Properties properties;
  EdgeKey key() const { return {src, dst, relation}; }
  bool operator==(const PropertyEdge&) const = default;
};

/// A link declared by a record whose target has not been ingested yet.
struct PendingLink {
  std::string owner;  // record key that declared the link
  std::string target;
  std::string relation;
  auto operator<=>(const PendingLink&) const = default;
};

struct TopicOffset {
  std::string key;
  std::string topic;
  auto operator<=>(const TopicOffset&) const = default;
};

/// Immutable view of the graph. Readers hold a shared_ptr and are never
/// affected by later commits.
class GraphSnapshot {
 public:
  std::uint64_t version() const { return version_; }
  const std::map<std::string, PropertyNode>& nodes() const { return nodes_; }
  const std::map<EdgeKey, PropertyEdge>& edges() const { return edges_; }
  const std::set<PendingLink>& pending_links() const { return pending_; }
  const std::map<TopicOffset, std::int64_t>& offsets() const { return offsets_; }

  bool has_node(const std::string& id) const { return nodes_.contains(id); }
  const PropertyNode* node(const std::string& id) const;
  /// Undirected adjacency.
  const std::set<std::string>& neighbors(const std::string& id) const;

  /// Nodes within <= hops (undirected) of `id` plus every edge between them.
  /// Throws Error(UnknownNode).
  GraphSnapshot neighborhood(const std::string& id, int hops) const;

  /// Every edge references existing nodes and the adjacency index agrees with the edge set.
  bool check_integrity() const;

  /// Canonical newline-delimited export of nodes then edges (sorted).
  std::string export_ndjson() const;
  /// Export plus pending links, offsets and version; reloadable with load_state.
  std::string state_ndjson() const;
  static GraphSnapshot load_state(const std::string& ndjson);

 private:
  friend class MutableGraph;
  friend class GraphStore;

  std::uint64_t version_ = 0;
  std::map<std::string, PropertyNode> nodes_;
  std::map<EdgeKey, PropertyEdge> edges_;
  std::map<std::string, std::set<std::string>> adjacency_;
  std::set<PendingLink> pending_;
  std::map<TopicOffset, std::int64_t> offsets_;
};

/// Write access handed to a transaction. All changes land atomically when
/// the transaction returns without throwing.
class MutableGraph {
 public:
  explicit MutableGraph(GraphSnapshot& data) : data_(data) {}

  const GraphSnapshot& view() const { return data_; }

  /// Last-writer-wins: replaces label and properties.
  void upsert_node(PropertyNode node);
  /// Throws Error(DanglingEdge) if an endpoint is missing.
  void upsert_edge(PropertyEdge edge);
  /// Removes edges whose "origin" property equals `owner`, and that owner's pending links.
  void remove_owned(const std::string& owner);
  void add_pending(PendingLink link);
  /// Materializes pending links whose target is now present.
  void resolve_pending(const std::string& target);

  std::optional<std::int64_t> offset(const TopicOffset& key) const;
  void set_offset(const TopicOffset& key, std::int64_t offset);

  bool dirty() const { return dirty_; }

 private:
  GraphSnapshot& data_;
  bool dirty_ = false;
};

/// Property-graph store: single committer, copy-on-write snapshots, optional
/// file persistence (whole state rewritten atomically on every commit).
class GraphStore {
 public:
  GraphStore();
  explicit GraphStore(std::filesystem::path persist_path);

  std::shared_ptr<const GraphSnapshot> snapshot() const;

  /// Runs `mutate` on a private copy; publishes it (version + 1) if it made
  /// changes. Exceptions leave the store untouched.
  std::uint64_t transact(const std::function<void(MutableGraph&)>& mutate);

  std::uint64_t upsert_node(PropertyNode node);
  std::uint64_t upsert_edge(PropertyEdge edge);

  /// Replaces the whole state (used when loading a persisted file).
  void reset(GraphSnapshot state);

 private:
  void persist(const GraphSnapshot& state) const;

  mutable std::mutex read_mutex_;
  std::mutex commit_mutex_;
  std::shared_ptr<const GraphSnapshot> current_;
  std::optional<std::filesystem::path> persist_path_;
};

}  // namespace fusion::graph

#include "fusion/graph/store.hpp"

#include <deque>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "fusion/error.hpp"

namespace fusion::graph {

using nlohmann::json;

namespace {

bool connected(const std::map<EdgeKey, PropertyEdge>& edges, const std::string& a, const std::string& b) {
  auto any_between = [&](const std::string& s, const std::string& d) {
    auto it = edges.lower_bound(EdgeKey{s, d, ""});
    return it != edges.end() && it->first.src == s && it->first.dst == d;
  };
  return any_between(a, b) || any_between(b, a);
}

json node_json(const PropertyNode& n) {
  return json{{"type", "node"}, {"id", n.id}, {"label", n.label}, {"properties", n.properties}};
}

json edge_json(const PropertyEdge& e) {
  return json{{"type", "edge"}, {"src", e.src}, {"dst", e.dst}, {"relation", e.relation}, {"properties", e.properties}};
}

}  // namespace

const PropertyNode* GraphSnapshot::node(const std::string& id) const {
  auto it = nodes_.find(id);
  return it == nodes_.end() ? nullptr : &it->second;
}

const std::set<std::string>& GraphSnapshot::neighbors(const std::string& id) const {
  static const std::set<std::string> empty;
  auto it = adjacency_.find(id);
  return it == adjacency_.end() ? empty : it->second;
}

GraphSnapshot GraphSnapshot::neighborhood(const std::string& id, int hops) const {
  if (!has_node(id)) throw Error(Errc::UnknownNode, "no node '" + id + "'");
  if (hops < 0) throw Error(Errc::UnknownNode, "negative hop count");

  std::map<std::string, int> depth{{id, 0}};
  std::deque<std::string> frontier{id};
  while (!frontier.empty()) {
    const std::string cur = frontier.front();
    frontier.pop_front();
    const int d = depth[cur];
    if (d == hops) continue;
    for (const auto& next : neighbors(cur)) {
      if (depth.emplace(next, d + 1).second) frontier.push_back(next);
    }
  }

  GraphSnapshot sub;
  sub.version_ = version_;
  for (const auto& [nid, _] : depth) sub.nodes_.emplace(nid, nodes_.at(nid));
  for (const auto& [key, edge] : edges_) {
    if (depth.contains(key.src) && depth.contains(key.dst)) {
      sub.edges_.emplace(key, edge);
      sub.adjacency_[key.src].insert(key.dst);
      sub.adjacency_[key.dst].insert(key.src);
    }
  }
  return sub;
}

bool GraphSnapshot::check_integrity() const {
  std::map<std::string, std::set<std::string>> expected;
  for (const auto& [key, edge] : edges_) {
    if (!nodes_.contains(key.src) || !nodes_.contains(key.dst)) return false;
    if (edge.key() != key) return false;
    expected[key.src].insert(key.dst);
    expected[key.dst].insert(key.src);
  }
  for (const auto& [id, node] : nodes_)
    if (node.id != id) return false;
  std::map<std::string, std::set<std::string>> actual;
  for (const auto& [k, v] : adjacency_)
    if (!v.empty()) actual.emplace(k, v);
  return actual == expected;
}

std::string GraphSnapshot::export_ndjson() const {
  std::string out;
  for (const auto& [_, n] : nodes_) out += node_json(n).dump() + "\n";
  for (const auto& [_, e] : edges_) out += edge_json(e).dump() + "\n";
  return out;
}

std::string GraphSnapshot::state_ndjson() const {
  std::string out = json{{"type", "meta"}, {"version", version_}}.dump() + "\n";
  out += export_ndjson();
  for (const auto& p : pending_)
    out += json{{"type", "pending"}, {"owner", p.owner}, {"target", p.target}, {"relation", p.relation}}.dump() + "\n";
  for (const auto& [k, off] : offsets_)
    out += json{{"type", "offset"}, {"key", k.key}, {"topic", k.topic}, {"offset", off}}.dump() + "\n";
  return out;
}

GraphSnapshot GraphSnapshot::load_state(const std::string& ndjson) {
  GraphSnapshot s;
  std::istringstream in(ndjson);
  std::string line;
  std::size_t lineno = 0;
  try {
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      const json j = json::parse(line);
      const std::string type = j.at("type");
      if (type == "meta") {
        s.version_ = j.at("version").get<std::uint64_t>();
      } else if (type == "node") {
        PropertyNode n{j.at("id"), j.at("label"), j.at("properties").get<Properties>()};
        s.nodes_[n.id] = std::move(n);
      } else if (type == "edge") {
        PropertyEdge e{j.at("src"), j.at("dst"), j.at("relation"), j.at("properties").get<Properties>()};
        s.adjacency_[e.src].insert(e.dst);
        s.adjacency_[e.dst].insert(e.src);
        s.edges_[e.key()] = std::move(e);
      } else if (type == "pending") {
        s.pending_.insert(PendingLink{j.at("owner"), j.at("target"), j.at("relation")});
      } else if (type == "offset") {
        s.offsets_[TopicOffset{j.at("key"), j.at("topic")}] = j.at("offset").get<std::int64_t>();
      }
    }
  } catch (const json::exception& e) {
    throw Error(Errc::StorageUnavailable, "corrupt graph state at line " + std::to_string(lineno) + ": " + e.what());
  }
  if (!s.check_integrity()) throw Error(Errc::StorageUnavailable, "graph state violates referential integrity");
  return s;
}

void MutableGraph::upsert_node(PropertyNode node) {
  const std::string id = node.id;
  auto it = data_.nodes_.find(id);
  if (it != data_.nodes_.end() && it->second == node) return;
  const bool fresh = it == data_.nodes_.end();
  data_.nodes_[id] = std::move(node);
  dirty_ = true;
  if (fresh) resolve_pending(id);
}

void MutableGraph::upsert_edge(PropertyEdge edge) {
  if (!data_.nodes_.contains(edge.src) || !data_.nodes_.contains(edge.dst))
    throw Error(Errc::DanglingEdge, "edge " + edge.src + " -[" + edge.relation + "]-> " + edge.dst +
                                        " references a missing node");
  const EdgeKey key = edge.key();
  auto it = data_.edges_.find(key);
  if (it != data_.edges_.end() && it->second == edge) return;
  data_.adjacency_[key.src].insert(key.dst);
  data_.adjacency_[key.dst].insert(key.src);
  data_.edges_[key] = std::move(edge);
  dirty_ = true;
}

void MutableGraph::remove_owned(const std::string& owner) {
  std::vector<EdgeKey> doomed;
  for (const auto& [key, edge] : data_.edges_) {
    auto origin = edge.properties.find("origin");
    if (origin != edge.properties.end() && origin->second == owner) doomed.push_back(key);
  }
  for (const auto& key : doomed) {
    data_.edges_.erase(key);
    if (!connected(data_.edges_, key.src, key.dst)) {
      data_.adjacency_[key.src].erase(key.dst);
      data_.adjacency_[key.dst].erase(key.src);
    }
    dirty_ = true;
  }
  for (auto it = data_.pending_.begin(); it != data_.pending_.end();) {
    if (it->owner == owner) {
      it = data_.pending_.erase(it);
      dirty_ = true;
    } else {
      ++it;
    }
  }
}

void MutableGraph::add_pending(PendingLink link) {
  if (data_.pending_.insert(std::move(link)).second) dirty_ = true;
}

void MutableGraph::resolve_pending(const std::string& target) {
  std::vector<PendingLink> ready;
  for (const auto& p : data_.pending_)
    if (p.target == target && data_.nodes_.contains(p.owner)) ready.push_back(p);
  for (const auto& p : ready) {
    data_.pending_.erase(p);
    upsert_edge(PropertyEdge{p.owner, p.target, p.relation, {{"origin", p.owner}}});
    dirty_ = true;
  }
}

std::optional<std::int64_t> MutableGraph::offset(const TopicOffset& key) const {
  auto it = data_.offsets_.find(key);
  if (it == data_.offsets_.end()) return std::nullopt;
  return it->second;
}

void MutableGraph::set_offset(const TopicOffset& key, std::int64_t offset) {
  auto& slot = data_.offsets_[key];
  if (slot != offset) dirty_ = true;
  slot = offset;
}

GraphStore::GraphStore() : current_(std::make_shared<GraphSnapshot>()) {}

GraphStore::GraphStore(std::filesystem::path persist_path) : GraphStore() {
  persist_path_ = std::move(persist_path);
  if (std::filesystem::exists(*persist_path_)) {
    std::ifstream in(*persist_path_);
    if (!in) throw Error(Errc::StorageUnavailable, "cannot read " + persist_path_->string());
    std::stringstream buf;
    buf << in.rdbuf();
    current_ = std::make_shared<GraphSnapshot>(GraphSnapshot::load_state(buf.str()));
  }
}

std::shared_ptr<const GraphSnapshot> GraphStore::snapshot() const {
  std::lock_guard lock(read_mutex_);
  return current_;
}

std::uint64_t GraphStore::transact(const std::function<void(MutableGraph&)>& mutate) {
  std::lock_guard commit(commit_mutex_);
  auto base = snapshot();
  auto next = std::make_shared<GraphSnapshot>(*base);
  MutableGraph tx(*next);
  mutate(tx);
  if (!tx.dirty()) return base->version();
  next->version_ = base->version() + 1;
  if (persist_path_) persist(*next);
  {
    std::lock_guard lock(read_mutex_);
    current_ = std::move(next);
    return current_->version();
  }
}

std::uint64_t GraphStore::upsert_node(PropertyNode node) {
  return transact([&](MutableGraph& g) { g.upsert_node(std::move(node)); });
}

std::uint64_t GraphStore::upsert_edge(PropertyEdge edge) {
  return transact([&](MutableGraph& g) { g.upsert_edge(std::move(edge)); });
}

void GraphStore::reset(GraphSnapshot state) {
  std::lock_guard commit(commit_mutex_);
  if (persist_path_) persist(state);
  std::lock_guard lock(read_mutex_);
  current_ = std::make_shared<GraphSnapshot>(std::move(state));
}

void GraphStore::persist(const GraphSnapshot& state) const {
  auto tmp = *persist_path_;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error(Errc::StorageUnavailable, "cannot write " + tmp.string());
    out << state.state_ndjson();
    if (!out.flush()) throw Error(Errc::StorageUnavailable, "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, *persist_path_, ec);
  if (ec) throw Error(Errc::StorageUnavailable, "cannot replace " + persist_path_->string() + ": " + ec.message());
}

}  // namespace fusion::graph

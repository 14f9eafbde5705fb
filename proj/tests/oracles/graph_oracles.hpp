#pragma once

// Reference models used only by tests. They deliberately avoid the
// production data structures.

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fusion/graph/ingest.hpp"

namespace oracle {

/// Undirected BFS over a plain edge list; returns the node ids within `hops`.
inline std::set<std::string> bfs_ball(const std::vector<std::pair<std::string, std::string>>& edges,
                                      const std::string& start, int hops) {
  std::map<std::string, std::vector<std::string>> adj;
  for (const auto& [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::map<std::string, int> dist{{start, 0}};
  std::queue<std::string> q;
  q.push(start);
  while (!q.empty()) {
    auto u = q.front();
    q.pop();
    if (dist[u] >= hops) continue;
    for (const auto& v : adj[u])
      if (!dist.count(v)) {
        dist[v] = dist[u] + 1;
        q.push(v);
      }
  }
  std::set<std::string> out;
  for (const auto& [k, _] : dist) out.insert(k);
  return out;
}

/// Keeps, per (key, topic), only the highest-offset message; preserves the
/// first-arrival order of the surviving messages.
inline std::vector<fusion::graph::IngestMessage> dedup_latest(const std::vector<fusion::graph::IngestMessage>& in) {
  std::map<std::pair<std::string, std::string>, std::size_t> best;
  for (std::size_t i = 0; i < in.size(); ++i) {
    const auto k = std::make_pair(in[i].key, in[i].topic);
    auto it = best.find(k);
    if (it == best.end() || in[i].offset > in[it->second].offset) best[k] = i;
  }
  std::vector<std::size_t> keep;
  for (const auto& [_, i] : best) keep.push_back(i);
  std::sort(keep.begin(), keep.end(), [&](std::size_t a, std::size_t b) {
    return in[a].offset < in[b].offset || (in[a].offset == in[b].offset && a < b);
  });
  std::vector<fusion::graph::IngestMessage> out;
  for (auto i : keep) out.push_back(in[i]);
  return out;
}

}  // namespace oracle

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <deque>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "fusion/domain/features.hpp"
#include "fusion/error.hpp"

namespace fusion::correlate {

enum class Metric { euclidean, hamming };

std::optional<Metric> parse_metric(std::string_view s) noexcept;

struct DbscanParams {
  double eps = 0.5;
  int min_pts = 3;
  Metric metric = Metric::euclidean;
};

struct ClusterAssignment {
  static constexpr int kNoise = -1;
  std::vector<int> labels;  // per input point, 0..cluster_count-1 or kNoise
  int cluster_count = 0;

  bool operator==(const ClusterAssignment&) const = default;
};

void validate(const DbscanParams& p);

/// Distance between two rows under `metric`. Hamming counts differing coordinates.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar distance(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b,
                                   Metric metric) {
  using Scalar = typename DerivedA::Scalar;
  if (metric == Metric::euclidean) return (a - b).norm();
  return static_cast<Scalar>((a.array() != b.array()).count());
}

/// DBSCAN over the rows of `points`.
///
/// A point is core iff at least min_pts points (itself included) lie within
/// distance <= eps. Clusters are numbered in the order their first core point
/// appears; a border point joins the cluster that reaches it first, i.e. the
/// one whose seeding core comes earliest in input order.
template <typename Derived>
ClusterAssignment dbscan(const Eigen::MatrixBase<Derived>& points, const DbscanParams& params) {
  validate(params);
  const Eigen::Index n = points.rows();
  ClusterAssignment out;
  out.labels.assign(static_cast<std::size_t>(n), ClusterAssignment::kNoise);
  if (n == 0) return out;

  std::vector<std::vector<Eigen::Index>> neighbors(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    neighbors[i].push_back(i);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (distance(points.row(i), points.row(j), params.metric) <= params.eps) {
        neighbors[i].push_back(j);
        neighbors[j].push_back(i);
      }
    }
  }
  auto is_core = [&](Eigen::Index i) {
    return neighbors[i].size() >= static_cast<std::size_t>(params.min_pts);
  };

  std::vector<bool> visited(static_cast<std::size_t>(n), false);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (visited[i] || !is_core(i)) continue;
    const int label = out.cluster_count++;
    std::deque<Eigen::Index> queue{i};
    visited[i] = true;
    out.labels[i] = label;
    while (!queue.empty()) {
      const Eigen::Index p = queue.front();
      queue.pop_front();
      if (!is_core(p)) continue;
      for (Eigen::Index q : neighbors[p]) {
        if (out.labels[q] == ClusterAssignment::kNoise) out.labels[q] = label;
        if (!visited[q]) {
          visited[q] = true;
          if (is_core(q)) queue.push_back(q);
        }
      }
    }
  }
  return out;
}

/// Stacks feature vectors into a matrix; throws Error(MixedSchemas) when
/// schema ids or dimensions disagree.
Eigen::MatrixXd stack_features(std::span<const domain::FeatureVector> points);

ClusterAssignment dbscan(std::span<const domain::FeatureVector> points, const DbscanParams& params);

}  // namespace fusion::correlate

#include "fusion/correlate/clustering.hpp"

#include <algorithm>

namespace fusion::correlate {

std::optional<Metric> parse_metric(std::string_view s) noexcept {
  if (s == "euclidean") return Metric::euclidean;
  if (s == "hamming") return Metric::hamming;
  return std::nullopt;
}

void validate(const DbscanParams& p) {
  if (!(p.eps >= 0.0) || !std::isfinite(p.eps)) throw Error(Errc::BadConfig, "dbscan eps must be finite and >= 0");
  if (p.min_pts < 1) throw Error(Errc::BadConfig, "dbscan min_pts must be >= 1");
}

Eigen::MatrixXd stack_features(std::span<const domain::FeatureVector> points) {
  if (points.empty()) return Eigen::MatrixXd(0, 0);
  const auto& first = points.front();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(points.size()), first.values.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].schema_id != first.schema_id || points[i].values.size() != first.values.size())
      throw Error(Errc::MixedSchemas, "point " + std::to_string(i) + " uses schema '" + points[i].schema_id +
                                          "', expected '" + first.schema_id + "'");
    m.row(static_cast<Eigen::Index>(i)) = points[i].values.transpose();
  }
  return m;
}

ClusterAssignment dbscan(std::span<const domain::FeatureVector> points, const DbscanParams& params) {
  return dbscan(stack_features(points), params);
}

int EntityClustering::label_of(const std::string& id) const {
  for (std::size_t i = 0; i < entity_ids.size(); ++i)
    if (entity_ids[i] == id) return assignment.labels[i];
  return ClusterAssignment::kNoise;
}

namespace {

template <typename Map>
typename Map::key_type argmax(const Map& counts) {
  auto best = counts.begin();
  for (auto it = counts.begin(); it != counts.end(); ++it)
    if (it->second > best->second) best = it;  // map order gives the smaller key on ties
  return best->first;
}

}  // namespace

EntityClustering cluster_entities(std::span<const domain::AbstractedEntity> entities, const DbscanParams& params,
                                  const domain::EncodingSchema& schema) {
  EntityClustering out;
  std::vector<domain::FeatureVector> features;
  features.reserve(entities.size());
  for (const auto& e : entities) {
    out.entity_ids.push_back(e.entity_id);
    features.push_back(domain::encode_features(e, schema));
  }
  out.assignment = dbscan(std::span<const domain::FeatureVector>(features), params);

  struct Tally {
    std::size_t size = 0;
    std::map<std::string, std::size_t> continents;
    std::map<std::string, std::size_t> classes;
    std::map<std::string, std::size_t> quarters;
  };
  std::vector<Tally> tallies(static_cast<std::size_t>(out.assignment.cluster_count));
  for (std::size_t i = 0; i < entities.size(); ++i) {
    const int label = out.assignment.labels[i];
    if (label == ClusterAssignment::kNoise) continue;
    auto& t = tallies[static_cast<std::size_t>(label)];
    ++t.size;
    ++t.continents[std::string(domain::to_string(entities[i].continent))];
    ++t.classes[entities[i].firearm_class];
    ++t.quarters[entities[i].quarter.value_or(std::string(kAbsentQuarter))];
  }
  for (std::size_t label = 0; label < tallies.size(); ++label) {
    const auto& t = tallies[label];
    ClusterSummary s;
    s.label = static_cast<int>(label);
    s.size = t.size;
    s.dominant_continent = domain::parse_continent(argmax(t.continents)).value_or(domain::Continent::Unknown);
    s.dominant_firearm_class = argmax(t.classes);
    s.quarter_histogram = t.quarters;
    out.summaries.push_back(std::move(s));
  }
  return out;
}

}  // namespace fusion::correlate

#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "fusion/correlate/dbscan.hpp"
#include "fusion/domain/features.hpp"

namespace fusion::correlate {

inline constexpr std::string_view kAbsentQuarter = "absent";

struct ClusterSummary {
  int label = 0;
  std::size_t size = 0;
  domain::Continent dominant_continent = domain::Continent::Unknown;
  std::string dominant_firearm_class;
  std::map<std::string, std::size_t> quarter_histogram;  // "YYYY-Qn" or "absent"
};

struct EntityClustering {
  std::vector<std::string> entity_ids;  // input order
  ClusterAssignment assignment;
  std::vector<ClusterSummary> summaries;  // one per label, ascending

  int label_of(const std::string& id) const;
};

/// DBSCAN over encode_features outputs plus per-cluster summaries. Dominance
/// ties break toward the lexicographically smaller value.
EntityClustering cluster_entities(std::span<const domain::AbstractedEntity> entities, const DbscanParams& params,
                                  const domain::EncodingSchema& schema);

}  // namespace fusion::correlate

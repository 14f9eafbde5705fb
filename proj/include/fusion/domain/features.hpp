#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "fusion/domain/abstraction.hpp"

namespace fusion::domain {

template <typename Scalar>
struct BasicFeatureVector {
  using Values = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  Values values;
  std::string schema_id;
};

using FeatureVector = BasicFeatureVector<double>;

/// Layout of an encoded entity:
///   [continent one-hot | firearm-class one-hot | quarter-of-year one-hot (Q1..Q4, absent) | year]
/// The year is mapped linearly so that year_min -> 0 and year_max -> 1; an
/// absent year encodes as 0 and is disambiguated by the "absent" quarter slot.
struct EncodingSchema {
  std::string schema_id;
  std::vector<std::string> continents;      // vocabulary, in slot order
  std::vector<std::string> firearm_classes; // top-10 + OTHER, in slot order
  int year_min = 2000;
  int year_max = 2030;

  static EncodingSchema from_taxonomy(std::string schema_id, const FirearmTaxonomy& taxonomy, int year_min,
                                      int year_max);

  Eigen::Index dimension() const {
    return static_cast<Eigen::Index>(continents.size() + firearm_classes.size() + 5 + 1);
  }
  Eigen::Index continent_offset() const { return 0; }
  Eigen::Index class_offset() const { return static_cast<Eigen::Index>(continents.size()); }
  Eigen::Index quarter_offset() const { return class_offset() + static_cast<Eigen::Index>(firearm_classes.size()); }
  Eigen::Index year_offset() const { return quarter_offset() + 5; }
};

/// Deterministic encoding; throws Error(UnknownSchema) when the schema is
/// malformed or an attribute value is outside its vocabulary.
FeatureVector encode_features(const AbstractedEntity& a, const EncodingSchema& schema);

}  // namespace fusion::domain

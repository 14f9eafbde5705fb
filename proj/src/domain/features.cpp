#include "fusion/domain/features.hpp"

#include <algorithm>

#include "fusion/error.hpp"

namespace fusion::domain {
namespace {

Eigen::Index slot_of(const std::vector<std::string>& vocab, std::string_view value, const char* what) {
  auto it = std::find(vocab.begin(), vocab.end(), value);
  if (it == vocab.end())
    throw Error(Errc::UnknownSchema, std::string(what) + " '" + std::string(value) + "' not in schema vocabulary");
  return static_cast<Eigen::Index>(it - vocab.begin());
}

}  // namespace

EncodingSchema EncodingSchema::from_taxonomy(std::string schema_id, const FirearmTaxonomy& taxonomy, int year_min,
                                             int year_max) {
  EncodingSchema s;
  s.schema_id = std::move(schema_id);
  for (int i = 0; i < kContinentCount; ++i) s.continents.emplace_back(to_string(static_cast<Continent>(i)));
  s.firearm_classes = taxonomy.top10;
  s.firearm_classes.emplace_back(kOtherClass);
  s.year_min = year_min;
  s.year_max = year_max;
  return s;
}

FeatureVector encode_features(const AbstractedEntity& a, const EncodingSchema& schema) {
  if (schema.schema_id.empty() || schema.continents.empty() || schema.firearm_classes.empty() ||
      schema.year_max <= schema.year_min)
    throw Error(Errc::UnknownSchema, "malformed encoding schema '" + schema.schema_id + "'");

  FeatureVector fv;
  fv.schema_id = schema.schema_id;
  fv.values = Eigen::VectorXd::Zero(schema.dimension());

  fv.values(schema.continent_offset() + slot_of(schema.continents, to_string(a.continent), "continent")) = 1.0;
  fv.values(schema.class_offset() + slot_of(schema.firearm_classes, a.firearm_class, "firearm class")) = 1.0;

  const auto q = a.quarter_of_year();
  fv.values(schema.quarter_offset() + (q ? *q - 1 : 4)) = 1.0;
  if (a.year)
    fv.values(schema.year_offset()) =
        static_cast<double>(*a.year - schema.year_min) / static_cast<double>(schema.year_max - schema.year_min);
  return fv;
}

}  // namespace fusion::domain

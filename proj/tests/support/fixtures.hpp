#pragma once

#include <string>
#include <vector>

#include "fusion/correlate/scoring.hpp"
#include "fusion/domain/abstraction.hpp"
#include "fusion/domain/entity.hpp"

namespace fixtures {

inline fusion::domain::FirearmTaxonomy taxonomy() {
  fusion::domain::FirearmTaxonomy t;
  t.top10 = {"pistol",         "revolver",    "rifle",        "assault_rifle", "shotgun",
             "submachine_gun", "machine_gun", "sniper_rifle", "carbine",       "converted_blank"};
  t.model_to_class = {{"Glock 17", "pistol"},       {"Glock 19", "pistol"},         {"Colt Python", "revolver"},
                      {"AK-47", "assault_rifle"},   {"AR-15", "assault_rifle"},     {"Remington 870", "shotgun"},
                      {"Uzi", "submachine_gun"},    {"Zoraki 914", "converted_blank"}, {"M1 Carbine", "carbine"}};
  return t;
}

inline fusion::correlate::CorrelationInput input(const fusion::domain::RawRecord& raw) {
  auto rec = fusion::domain::validate_record(raw);
  auto abs = fusion::domain::abstract_entity(rec, taxonomy());
  return {std::move(rec), std::move(abs)};
}

}  // namespace fixtures

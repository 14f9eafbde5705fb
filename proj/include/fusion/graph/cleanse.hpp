#pragma once

#include <map>
#include <string>

#include "fusion/domain/entity.hpp"

namespace fusion::graph {

struct CleanseConfig {
  /// Currency code -> USD per unit. USD is implicitly 1.0.
  std::map<std::string, double, std::less<>> usd_rates{{"USD", 1.0}};
};

/// Normalizes a raw payload:
///  - trims keys and values, drops empty values, first key wins on collision;
///  - date-valued keys ("date", "published", "*_date") become ISO-8601
///    (accepts YYYY-MM-DD and DD/MM/YYYY, throws Error(UnparseableDate) otherwise);
///  - "country" is uppercased;
///  - currency-tagged amounts ("amount", "price", "*_amount") are converted
///    to "<value> USD" rounded to cents. Unknown currencies are left as-is.
/// cleanse(cleanse(x)) == cleanse(x).
domain::RawRecord cleanse(const domain::RawRecord& payload, const CleanseConfig& config = {});

bool is_date_key(std::string_view key);
bool is_amount_key(std::string_view key);

}  // namespace fusion::graph

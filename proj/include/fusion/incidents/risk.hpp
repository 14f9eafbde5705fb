#pragma once

#include <string>
#include <vector>

#include "fusion/incidents/tracker.hpp"

namespace fusion::incidents {

struct RiskIndicator {
  std::string country;
  std::string quarter;  // "YYYY-Qn"
  IncidentType type = IncidentType::seizure;
  int count = 0;
  double baseline_mean = 0.0;
  double baseline_std = 0.0;
  std::size_t baseline_quarters = 0;
  double z_score = 0.0;  // +/-infinity when the baseline has zero variance

  bool operator==(const RiskIndicator&) const = default;
};

struct RedFlag {
  std::size_t indicator = 0;  // index into RiskReport::indicators
  double threshold = 0.0;
};

struct RiskReport {
  std::vector<RiskIndicator> indicators;
  std::vector<RedFlag> flags;
};

/// Counts per (country, quarter, type) over the contiguous quarter range
/// spanned by all dated records, zero-filled, for every (country, type) pair
/// that occurs. Each cell's baseline is the population mean and standard
/// deviation of the same pair's counts in all other quarters. A cell is
/// flagged when z >= z_threshold and the baseline has at least two quarters.
/// Records with an unknown country are skipped. Output ordered by country,
/// type priority, quarter.
RiskReport compute_risk_indicators(const std::vector<IncidentRecord>& records, double z_threshold);

/// z rendered as a number, or "+inf" / "-inf".
std::string indicator_to_json(const RiskIndicator& i);

}  // namespace fusion::incidents

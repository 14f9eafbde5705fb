#include "fusion/incidents/risk.hpp"

#include <cmath>
#include <json.hpp>
#include <limits>
#include <map>

namespace fusion::incidents {

namespace {

int quarter_index(const Date& d) { return d.year * 4 + (d.quarter() - 1); }

std::string quarter_name(int index) {
  return std::to_string(index / 4) + "-Q" + std::to_string(index % 4 + 1);
}

int priority(IncidentType t) {
  for (int i = 0; i < 4; ++i)
    if (kIncidentPriority[i] == t) return i;
  return 4;
}

}  // namespace

RiskReport compute_risk_indicators(const std::vector<IncidentRecord>& records, double z_threshold) {
  RiskReport report;
  // (country, type priority) -> quarter index -> count
  std::map<std::pair<std::string, int>, std::map<int, int>> cells;
  int lo = std::numeric_limits<int>::max(), hi = std::numeric_limits<int>::min();
  for (const auto& r : records) {
    if (r.country == kUnknownCountry || r.country.empty()) continue;
    const int q = quarter_index(r.date);
    ++cells[{r.country, priority(r.type)}][q];
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  if (cells.empty()) return report;

  const std::size_t span = static_cast<std::size_t>(hi - lo + 1);
  for (const auto& [key, by_quarter] : cells) {
    std::vector<int> counts(span, 0);
    for (const auto& [q, n] : by_quarter) counts[static_cast<std::size_t>(q - lo)] = n;
    double total = 0.0;
    for (int c : counts) total += c;

    for (std::size_t i = 0; i < span; ++i) {
      RiskIndicator ind;
      ind.country = key.first;
      ind.type = kIncidentPriority[key.second];
      ind.quarter = quarter_name(lo + static_cast<int>(i));
      ind.count = counts[i];
      ind.baseline_quarters = span - 1;
      if (ind.baseline_quarters > 0) {
        const double n = static_cast<double>(ind.baseline_quarters);
        ind.baseline_mean = (total - counts[i]) / n;
        double ss = 0.0;
        for (std::size_t j = 0; j < span; ++j)
          if (j != i) ss += (counts[j] - ind.baseline_mean) * (counts[j] - ind.baseline_mean);
        ind.baseline_std = std::sqrt(ss / n);
      }
      const double diff = ind.count - ind.baseline_mean;
      if (ind.baseline_std > 0.0) ind.z_score = diff / ind.baseline_std;
      else if (diff > 0.0) ind.z_score = std::numeric_limits<double>::infinity();
      else if (diff < 0.0) ind.z_score = -std::numeric_limits<double>::infinity();
      else ind.z_score = 0.0;

      if (ind.baseline_quarters >= 2 && ind.z_score >= z_threshold)
        report.flags.push_back({report.indicators.size(), z_threshold});
      report.indicators.push_back(std::move(ind));
    }
  }
  return report;
}

std::string indicator_to_json(const RiskIndicator& i) {
  nlohmann::json j{{"country", i.country},
                   {"quarter", i.quarter},
                   {"incident_type", to_string(i.type)},
                   {"count", i.count},
                   {"baseline_mean", i.baseline_mean},
                   {"baseline_std", i.baseline_std},
                   {"baseline_quarters", i.baseline_quarters}};
  if (std::isinf(i.z_score)) j["z_score"] = i.z_score > 0 ? "+inf" : "-inf";
  else j["z_score"] = i.z_score;
  return j.dump();
}

}  // namespace fusion::incidents

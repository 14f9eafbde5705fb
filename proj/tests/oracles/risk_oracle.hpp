#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "fusion/incidents/tracker.hpp"

namespace oracle {

struct Cell {
  int count;
  double mean, std, z;
  bool flagged;
};

// Key: (country, type name, "YYYY-Qn"). Quarters enumerated by stepping
// (year, q) from the earliest to the latest dated known-country record.
inline std::map<std::tuple<std::string, std::string, std::string>, Cell> risk_cells(
    const std::vector<fusion::incidents::IncidentRecord>& records, double threshold) {
  using fusion::incidents::kUnknownCountry;
  std::vector<std::pair<int, int>> quarters;
  std::pair<int, int> lo{99999, 9}, hi{-1, 0};
  for (const auto& r : records) {
    if (r.country == kUnknownCountry) continue;
    const std::pair<int, int> q{r.date.year, (r.date.month - 1) / 3 + 1};
    if (q < lo) lo = q;
    if (hi < q) hi = q;
  }
  std::map<std::tuple<std::string, std::string, std::string>, Cell> out;
  if (hi.first < 0) return out;
  for (auto q = lo; q <= hi; q = q.second == 4 ? std::pair{q.first + 1, 1} : std::pair{q.first, q.second + 1})
    quarters.push_back(q);

  std::map<std::pair<std::string, std::string>, bool> pairs;
  for (const auto& r : records)
    if (r.country != kUnknownCountry) pairs[{r.country, std::string(to_string(r.type))}] = true;

  for (const auto& [pair, unused] : pairs) {
    std::vector<int> counts;
    for (const auto& q : quarters) {
      int n = 0;
      for (const auto& r : records)
        if (r.country == pair.first && to_string(r.type) == pair.second && r.date.year == q.first &&
            (r.date.month - 1) / 3 + 1 == q.second)
          ++n;
      counts.push_back(n);
    }
    for (std::size_t i = 0; i < quarters.size(); ++i) {
      std::vector<double> others;
      for (std::size_t j = 0; j < counts.size(); ++j)
        if (j != i) others.push_back(counts[j]);
      double mean = 0, var = 0;
      for (double v : others) mean += v;
      if (!others.empty()) mean /= others.size();
      for (double v : others) var += (v - mean) * (v - mean);
      if (!others.empty()) var /= others.size();
      const double sd = std::sqrt(var);
      double z;
      if (sd > 0) z = (counts[i] - mean) / sd;
      else if (counts[i] > mean) z = std::numeric_limits<double>::infinity();
      else if (counts[i] < mean) z = -std::numeric_limits<double>::infinity();
      else z = 0;
      const std::string qname = std::to_string(quarters[i].first) + "-Q" + std::to_string(quarters[i].second);
      out[{pair.first, pair.second, qname}] = {counts[i], mean, sd, z, others.size() >= 2 && z >= threshold};
    }
  }
  return out;
}

}  // namespace oracle

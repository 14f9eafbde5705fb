#pragma once

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>
#include <string>
#include <vector>

namespace oracle {

using Table = std::vector<std::map<std::string, std::string>>;

// Character-by-character CSV reader; only what the fixtures need.
inline Table read_table(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string s = ss.str();
  std::vector<std::vector<std::string>> lines(1, std::vector<std::string>(1));
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (quoted) {
      if (c == '"' && i + 1 < s.size() && s[i + 1] == '"') {
        lines.back().back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        lines.back().back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      lines.back().emplace_back();
    } else if (c == '\n') {
      lines.emplace_back(1);
    } else if (c != '\r') {
      lines.back().back() += c;
    }
  }
  while (!lines.empty() && lines.back().size() == 1 && lines.back()[0].empty()) lines.pop_back();
  Table out;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    std::map<std::string, std::string> row;
    for (std::size_t c = 0; c < lines[0].size(); ++c)
      if (!lines[r][c].empty()) row[lines[0][c]] = lines[r][c];
    out.push_back(row);
  }
  return out;
}

struct StoreSpec {
  std::string id;
  std::string table_path;
  std::map<std::string, std::string> mapping;  // canonical -> store
  std::set<std::string> ops;
};

struct Cond {
  std::string field, op, lo, hi;
};

inline bool is_number(const std::string& s) {
  if (s.empty()) return false;
  char* end = nullptr;
  std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

inline bool holds(const Cond& c, const std::map<std::string, std::string>& row) {
  if (!row.count(c.field)) return false;
  const std::string& v = row.at(c.field);
  if (c.op == "eq") return v == c.lo;
  if (c.op == "contains") {
    std::string a = v, b = c.lo;
    for (auto& ch : a) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    for (auto& ch : b) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return a.find(b) != std::string::npos;
  }
  const bool numeric = is_number(v) && (c.lo.empty() || is_number(c.lo)) && (c.hi.empty() || is_number(c.hi));
  if (numeric) {
    const double x = std::strtod(v.c_str(), nullptr);
    return (c.lo.empty() || x >= std::strtod(c.lo.c_str(), nullptr)) &&
           (c.hi.empty() || x <= std::strtod(c.hi.c_str(), nullptr));
  }
  return (c.lo.empty() || v >= c.lo) && (c.hi.empty() || v <= c.hi);
}

struct OracleRow {
  std::map<std::string, std::string> fields;
  std::vector<std::string> provenance;
  bool operator<(const OracleRow& o) const {
    return std::tie(fields, provenance) < std::tie(o.fields, o.provenance);
  }
  bool operator==(const OracleRow& o) const { return fields == o.fields && provenance == o.provenance; }
};

struct Union {
  std::vector<OracleRow> rows;  // sorted multiset
  std::size_t dedup = 0;
  std::set<std::string> answered;
};

// Reads each eligible store's table directly, renames its columns, filters,
// and merges by (id, date, country). `stores` is processed in id order.
inline Union union_of(std::vector<StoreSpec> stores, const std::vector<Cond>& conds,
                      const std::set<std::string>& skip = {}) {
  std::sort(stores.begin(), stores.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  std::vector<OracleRow> acc;
  std::size_t seen = 0;
  Union u;
  for (const auto& s : stores) {
    if (skip.count(s.id)) continue;
    bool ok = true;
    for (const auto& c : conds) ok = ok && s.ops.count(c.op) && s.mapping.count(c.field);
    if (!ok) continue;
    u.answered.insert(s.id);
    for (const auto& raw : read_table(s.table_path)) {
      std::map<std::string, std::string> row;
      for (const auto& [canon, col] : s.mapping)
        if (raw.count(col)) row[canon] = raw.at(col);
      bool pass = true;
      for (const auto& c : conds) pass = pass && holds(c, row);
      if (!pass) continue;
      ++seen;
      auto key = [](const std::map<std::string, std::string>& r, const char* k) {
        return r.count(k) ? r.at(k) : std::string();
      };
      auto it = std::find_if(acc.begin(), acc.end(), [&](const OracleRow& o) {
        return key(o.fields, "id") == key(row, "id") && key(o.fields, "date") == key(row, "date") &&
               key(o.fields, "country") == key(row, "country");
      });
      if (it == acc.end()) {
        acc.push_back({row, {s.id}});
      } else {
        for (const auto& [k, v] : row)
          if (!it->fields.count(k)) it->fields[k] = v;
        it->provenance.push_back(s.id);
      }
    }
  }
  u.dedup = seen - acc.size();
  std::sort(acc.begin(), acc.end());
  u.rows = std::move(acc);
  return u;
}

}  // namespace oracle

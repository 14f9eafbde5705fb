#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fusion/date.hpp"
#include "fusion/domain/abstraction.hpp"
#include "fusion/domain/entity.hpp"

namespace fusion::service {

using Params = std::map<std::string, std::string>;

/// Common read-endpoint filters. Every key must be one the endpoint accepts
/// and every value must parse, otherwise Error(BadFilter) names the key.
struct ListQuery {
  std::optional<Date> date_from;
  std::optional<Date> date_to;
  std::optional<std::string> country;
  std::optional<std::string> firearm_class;
  std::optional<domain::Source> source;
  std::size_t limit = 50;
  std::string cursor;  // opaque; empty for the first page
  Params extra;        // endpoint-specific keys that were accepted
};

/// `accepted` lists endpoint-specific keys beyond the common ones
/// (date_from, date_to, country, firearm_class, source, limit, cursor).
ListQuery parse_list_query(const Params& params, const std::set<std::string>& accepted, std::size_t default_limit,
                           std::size_t max_limit, const domain::FirearmTaxonomy& taxonomy);

/// Date-range, country, firearm-class (via the taxonomy) and source test.
/// Undated records fail any date bound.
bool record_matches(const domain::EntityRecord& r, const ListQuery& q, const domain::FirearmTaxonomy& taxonomy);

std::string encode_cursor(const std::string& sort_key);
/// Throws BadFilter for cursors that were not produced by encode_cursor.
std::string decode_cursor(const std::string& cursor);

template <typename T>
struct Page {
  std::vector<T> items;
  std::string next_cursor;  // empty on the last page
};

/// `keyed` must be sorted by key with unique keys. Returns up to q.limit
/// items whose key is greater than the cursor's.
template <typename T>
Page<T> paginate(const std::vector<std::pair<std::string, T>>& keyed, const ListQuery& q) {
  Page<T> page;
  const std::string after = q.cursor.empty() ? std::string() : decode_cursor(q.cursor);
  std::size_t i = 0;
  if (!q.cursor.empty())
    while (i < keyed.size() && keyed[i].first <= after) ++i;
  for (; i < keyed.size() && page.items.size() < q.limit; ++i) page.items.push_back(keyed[i].second);
  if (i < keyed.size() && !page.items.empty()) page.next_cursor = encode_cursor(keyed[i - 1].first);
  return page;
}

/// Sort key "(date, id)" with undated records first.
std::string date_id_key(const std::optional<Date>& date, const std::string& id);

}  // namespace fusion::service

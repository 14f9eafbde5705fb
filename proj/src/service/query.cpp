#include "fusion/service/query.hpp"

#include "fusion/error.hpp"
#include "fusion/text.hpp"

namespace fusion::service {

namespace {

const std::set<std::string> kCommon{"date_from", "date_to", "country", "firearm_class", "source", "limit", "cursor"};

[[noreturn]] void bad(const std::string& key, const std::string& why) {
  throw Error(Errc::BadFilter, "filter '" + key + "' " + why, {key});
}

}  // namespace

ListQuery parse_list_query(const Params& params, const std::set<std::string>& accepted, std::size_t default_limit,
                           std::size_t max_limit, const domain::FirearmTaxonomy& taxonomy) {
  ListQuery q;
  q.limit = default_limit;
  for (const auto& [k, v] : params) {
    if (k == "date_from" || k == "date_to") {
      const auto d = Date::parse_iso(v);
      if (!d) bad(k, "must be YYYY-MM-DD");
      (k == "date_from" ? q.date_from : q.date_to) = d;
    } else if (k == "country") {
      if (!domain::is_country_code(v)) bad(k, "must be an ISO-3166 alpha-2 code");
      q.country = v;
    } else if (k == "firearm_class") {
      if (!taxonomy.is_class(v)) bad(k, "is not a configured firearm class");
      q.firearm_class = v;
    } else if (k == "source") {
      const auto s = domain::parse_source(v);
      if (!s) bad(k, "is not a known source");
      q.source = s;
    } else if (k == "limit") {
      const auto n = text::parse_int(v);
      if (!n || *n < 1 || static_cast<std::size_t>(*n) > max_limit) bad(k, "must be in 1.." + std::to_string(max_limit));
      q.limit = static_cast<std::size_t>(*n);
    } else if (k == "cursor") {
      decode_cursor(v);
      q.cursor = v;
    } else if (accepted.count(k)) {
      q.extra[k] = v;
    } else {
      bad(k, "is not supported here");
    }
  }
  if (q.date_from && q.date_to && *q.date_to < *q.date_from) bad("date_to", "precedes date_from");
  return q;
}

bool record_matches(const domain::EntityRecord& r, const ListQuery& q, const domain::FirearmTaxonomy& taxonomy) {
  if ((q.date_from || q.date_to) && !r.date) return false;
  if (q.date_from && *r.date < *q.date_from) return false;
  if (q.date_to && *r.date > *q.date_to) return false;
  if (q.country && r.country != q.country) return false;
  if (q.source && r.source != *q.source) return false;
  if (q.firearm_class && taxonomy.classify(r.firearm_model, r.firearm_type) != *q.firearm_class) return false;
  return true;
}

std::string encode_cursor(const std::string& sort_key) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  for (const unsigned char c : sort_key) {
    out += kDigits[c >> 4];
    out += kDigits[c & 0xF];
  }
  return out;
}

std::string decode_cursor(const std::string& cursor) {
  auto nibble = [&](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    bad("cursor", "is malformed");
  };
  if (cursor.size() % 2) bad("cursor", "is malformed");
  std::string out;
  for (std::size_t i = 0; i < cursor.size(); i += 2) out += static_cast<char>(nibble(cursor[i]) * 16 + nibble(cursor[i + 1]));
  return out;
}

std::string date_id_key(const std::optional<Date>& date, const std::string& id) {
  return (date ? date->iso() : std::string()) + '\x1f' + id;
}

}  // namespace fusion::service

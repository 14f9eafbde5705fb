#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "fusion/date.hpp"

namespace fusion::domain {

using RawRecord = std::map<std::string, std::string>;

enum class EntityKind { agent, event };

enum class Source { darkweb_listing, forum, news, chain, detector_report, federated_store };

std::string_view to_string(EntityKind kind) noexcept;
std::string_view to_string(Source source) noexcept;
std::optional<EntityKind> parse_kind(std::string_view s) noexcept;
std::optional<Source> parse_source(std::string_view s) noexcept;

struct EntityRecord {
  std::string id;
  EntityKind kind = EntityKind::event;
  std::optional<std::string> name;
  std::optional<std::string> username;
  std::optional<Date> date;
  std::optional<std::string> country;  // ISO-3166 alpha-2
  std::optional<std::string> firearm_model;
  std::optional<std::string> firearm_type;
  Source source = Source::federated_store;
  std::map<std::string, std::string> attributes;

  bool operator==(const EntityRecord&) const = default;
};

/// Builds an EntityRecord from a raw string map. Throws fusion::Error whose
/// details() list every violated field as "field:reason"; the error code is
/// that of the first violation (MissingField, BadDate or BadCountry).
///
/// Keys other than the canonical ones land in `attributes`. A missing
/// `source` falls back to `default_source`.
EntityRecord validate_record(const RawRecord& raw, Source default_source = Source::federated_store);

/// Inverse of validate_record: canonical keys plus attributes.
RawRecord to_raw(const EntityRecord& record);

bool is_country_code(std::string_view s) noexcept;

}  // namespace fusion::domain

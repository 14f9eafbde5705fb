#include "fusion/domain/entity.hpp"

#include <array>
#include <utility>
#include <vector>

#include "fusion/error.hpp"

namespace fusion::domain {
namespace {

constexpr std::array<std::pair<Source, std::string_view>, 6> kSources{{
    {Source::darkweb_listing, "darkweb_listing"},
    {Source::forum, "forum"},
    {Source::news, "news"},
    {Source::chain, "chain"},
    {Source::detector_report, "detector_report"},
    {Source::federated_store, "federated_store"},
}};

constexpr std::array<std::string_view, 9> kCanonicalKeys{
    "id", "kind", "name", "username", "date", "country", "firearm_model", "firearm_type", "source"};

bool is_canonical(const std::string& key) {
  for (auto k : kCanonicalKeys)
    if (k == key) return true;
  return false;
}

std::optional<std::string> non_empty(const RawRecord& raw, const char* key) {
  auto it = raw.find(key);
  if (it == raw.end() || it->second.empty()) return std::nullopt;
  return it->second;
}

struct Violation {
  Errc code;
  std::string detail;
};

}  // namespace

std::string_view to_string(EntityKind kind) noexcept { return kind == EntityKind::agent ? "agent" : "event"; }

std::string_view to_string(Source source) noexcept {
  for (auto& [s, name] : kSources)
    if (s == source) return name;
  return "federated_store";
}

std::optional<EntityKind> parse_kind(std::string_view s) noexcept {
  if (s == "agent") return EntityKind::agent;
  if (s == "event") return EntityKind::event;
  return std::nullopt;
}

std::optional<Source> parse_source(std::string_view s) noexcept {
  for (auto& [src, name] : kSources)
    if (name == s) return src;
  return std::nullopt;
}

bool is_country_code(std::string_view s) noexcept {
  return s.size() == 2 && s[0] >= 'A' && s[0] <= 'Z' && s[1] >= 'A' && s[1] <= 'Z';
}

EntityRecord validate_record(const RawRecord& raw, Source default_source) {
  std::vector<Violation> violations;
  EntityRecord rec;
  rec.source = default_source;

  if (raw.empty()) throw Error(Errc::MissingField, "empty record", {"id:missing", "kind:missing"});

  if (auto id = non_empty(raw, "id"))
    rec.id = *id;
  else
    violations.push_back({Errc::MissingField, "id:missing"});

  const auto kind_text = non_empty(raw, "kind");
  std::optional<EntityKind> kind = kind_text ? parse_kind(*kind_text) : std::nullopt;
  if (!kind_text)
    violations.push_back({Errc::MissingField, "kind:missing"});
  else if (!kind)
    violations.push_back({Errc::MissingField, "kind:invalid"});
  if (kind) rec.kind = *kind;

  rec.name = non_empty(raw, "name");
  rec.username = non_empty(raw, "username");
  rec.firearm_model = non_empty(raw, "firearm_model");
  rec.firearm_type = non_empty(raw, "firearm_type");

  if (auto date = non_empty(raw, "date")) {
    if (auto parsed = Date::parse_iso(*date))
      rec.date = *parsed;
    else
      violations.push_back({Errc::BadDate, "date:not_iso8601"});
  }
  if (auto country = non_empty(raw, "country")) {
    if (is_country_code(*country))
      rec.country = *country;
    else
      violations.push_back({Errc::BadCountry, "country:not_alpha2"});
  }
  if (auto source = non_empty(raw, "source")) {
    if (auto parsed = parse_source(*source))
      rec.source = *parsed;
    else
      violations.push_back({Errc::MissingField, "source:invalid"});
  }

  if (kind == EntityKind::agent && !rec.name && !rec.username)
    violations.push_back({Errc::MissingField, "name|username:missing"});
  if (kind == EntityKind::event && !rec.date && !raw.contains("date"))
    violations.push_back({Errc::MissingField, "date:missing"});

  for (const auto& [k, v] : raw)
    if (!is_canonical(k)) rec.attributes.emplace(k, v);

  if (!violations.empty()) {
    std::vector<std::string> details;
    for (auto& v : violations) details.push_back(v.detail);
    throw Error(violations.front().code, "invalid record '" + rec.id + "'", std::move(details));
  }
  return rec;
}

RawRecord to_raw(const EntityRecord& r) {
  RawRecord out = r.attributes;
  out["id"] = r.id;
  out["kind"] = std::string(to_string(r.kind));
  out["source"] = std::string(to_string(r.source));
  if (r.name) out["name"] = *r.name;
  if (r.username) out["username"] = *r.username;
  if (r.date) out["date"] = r.date->iso();
  if (r.country) out["country"] = *r.country;
  if (r.firearm_model) out["firearm_model"] = *r.firearm_model;
  if (r.firearm_type) out["firearm_type"] = *r.firearm_type;
  return out;
}

}  // namespace fusion::domain

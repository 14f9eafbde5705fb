#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fusion/domain/entity.hpp"

namespace fusion::domain {

enum class Continent { Africa, Asia, Europe, NorthAmerica, SouthAmerica, Oceania, Unknown };

inline constexpr int kContinentCount = 7;
std::string_view to_string(Continent c) noexcept;
std::optional<Continent> parse_continent(std::string_view s) noexcept;

using ContinentTable = std::map<std::string, Continent, std::less<>>;

/// Bundled ISO-3166 alpha-2 -> continent table.
const ContinentTable& default_continents();
Continent continent_of(std::string_view country, const ContinentTable& table = default_continents());

inline constexpr std::string_view kOtherClass = "OTHER";

struct FirearmTaxonomy {
  std::map<std::string, std::string, std::less<>> model_to_class;
  std::vector<std::string> top10;

  /// Empty when well-formed.
  std::vector<std::string> violations() const;
  bool is_class(std::string_view c) const;
  /// Exact model lookup, then a firearm_type that already names a class, else OTHER.
  std::string classify(const std::optional<std::string>& model, const std::optional<std::string>& type) const;
};

struct AbstractedEntity {
  std::string entity_id;
  std::optional<std::string> quarter;  // "YYYY-Qn"; absent for undated agents
  std::optional<int> year;
  Continent continent = Continent::Unknown;
  std::string firearm_class{kOtherClass};

  bool operator==(const AbstractedEntity&) const = default;
  /// 1..4, or nullopt when the temporal fields are absent.
  std::optional<int> quarter_of_year() const;
};

std::string quarter_label(const Date& d);

AbstractedEntity abstract_entity(const EntityRecord& e, const FirearmTaxonomy& taxonomy,
                                 const ContinentTable& continents = default_continents());

}  // namespace fusion::domain

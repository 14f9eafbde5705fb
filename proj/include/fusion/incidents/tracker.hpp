#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fusion/date.hpp"
#include "fusion/domain/entity.hpp"
#include "fusion/incidents/article.hpp"

namespace fusion::incidents {

/// Declaration order is extraction priority, highest first.
enum class IncidentType { homicide, shooting, armed_robbery, seizure };

inline constexpr IncidentType kIncidentPriority[] = {IncidentType::homicide, IncidentType::shooting,
                                                     IncidentType::armed_robbery, IncidentType::seizure};

std::string_view to_string(IncidentType t) noexcept;
std::optional<IncidentType> parse_incident_type(std::string_view s) noexcept;

namespace reasons {
inline constexpr std::string_view too_short = "too_short";
inline constexpr std::string_view no_date = "no_date";
inline constexpr std::string_view no_incident_keyword = "no_incident_keyword";
inline constexpr std::string_view no_firearm_keyword = "no_firearm_keyword";
inline constexpr std::string_view duplicate_url = "duplicate_url";
}  // namespace reasons

struct EligibilityCriteria {
  std::map<IncidentType, std::vector<std::string>> incident_keywords;
  std::vector<std::string> firearm_keywords;
  std::size_t min_body_length = 80;
};

struct LocationGazetteer {
  std::map<std::string, std::string> countries;  // name -> ISO alpha-2
  std::map<std::string, std::string> cities;     // name -> ISO alpha-2
};

struct TrackerConfig {
  EligibilityCriteria criteria;
  LocationGazetteer locations;
};

/// {"min_body_length", "incident_keywords": {type: [...]}, "firearm_keywords": [...],
///  "countries": {name: code}, "cities": {name: code}}
TrackerConfig load_tracker_config(const std::string& path);

struct Rejection {
  std::size_t index = 0;  // position in the input
  std::string url;
  std::string reason;
};

struct Eligibility {
  std::vector<NewsArticle> eligible;
  std::vector<std::size_t> eligible_index;
  std::vector<Rejection> rejected;
};

/// Checks run in order too_short, no_date, no_incident_keyword,
/// no_firearm_keyword; the first failing check is the reason. A repeated url
/// is rejected as duplicate_url after its first occurrence.
Eligibility filter_eligible(const std::vector<NewsArticle>& articles, const EligibilityCriteria& criteria);

inline constexpr std::string_view kUnknownCountry = "Unknown";

struct IncidentRecord {
  IncidentType type = IncidentType::seizure;
  Date date;
  std::string country;
  std::optional<std::string> city;
  std::optional<std::string> firearm;
  std::optional<int> victims;
  std::optional<int> perpetrators;
  std::string source_url;
  std::vector<std::string> warnings;

  bool operator==(const IncidentRecord&) const = default;
};

/// Leftmost explicit date in the text: ISO, DD/MM/YYYY, "14 May 2023" or
/// "May 14, 2023". Invalid calendar dates are skipped.
std::optional<Date> find_text_date(std::string_view text);
/// Leftmost "<n> <noun>" match, allowing one word in between. n is digits or
/// a number word zero..twenty.
std::optional<int> find_count(std::string_view text, const std::vector<std::string>& nouns);

/// Structured record from an eligible article's body. Location is the first
/// gazetteer mention; when it names a country, the city is that country's
/// first mentioned city. Without any mention the record carries country
/// "Unknown" and a NoLocationFound warning. Throws Error(PreconditionUnmet)
/// when no incident keyword is present.
IncidentRecord extract_incident(const NewsArticle& article, const TrackerConfig& config);

std::string incident_to_json(const IncidentRecord& r);
IncidentRecord incident_from_json(std::string_view json);

/// Raw payload for the `news` topic: an event entity keyed by `id`. The
/// country is omitted when unknown.
domain::RawRecord incident_payload(const IncidentRecord& r, const std::string& id);

}  // namespace fusion::incidents

#pragma once

#include <cstdint>
#include <json.hpp>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fusion/date.hpp"
#include "fusion/domain/entity.hpp"
#include "fusion/service/auth.hpp"

namespace fusion::service {

struct Report {
  std::string id;
  std::string service;  // originating service
  std::string owner;
  std::int64_t created = 0;
  std::set<std::string> shared_with;
  std::string title;
  nlohmann::json payload;
};

nlohmann::json report_to_json(const Report& r);

struct ReportFilter {
  std::optional<std::int64_t> created_from;  // inclusive, seconds
  std::optional<std::int64_t> created_to;    // inclusive, seconds
  std::optional<std::string> service;
  std::optional<std::string> title_contains;  // case-insensitive
};

/// Reports visible to a user are those they own or that were shared with
/// them. Only the owner may delete or share. Unknown ids and ids the user
/// cannot see both raise UnknownReport.
class ReportStore {
 public:
  explicit ReportStore(Clock clock = system_clock()) : clock_(std::move(clock)) {}

  Report create(const std::string& owner, const std::string& service, const std::string& title,
                nlohmann::json payload);
  /// Ordered by (created, id).
  std::vector<Report> list(const std::string& user, const ReportFilter& filter = {}) const;
  Report get(const std::string& user, const std::string& id) const;
  void remove(const std::string& user, const std::string& id);
  Report share(const std::string& user, const std::string& id, const std::vector<std::string>& with);
  std::size_t size() const;

 private:
  Report& visible(const std::string& user, const std::string& id);

  Clock clock_;
  mutable std::mutex mutex_;
  std::map<std::string, Report> reports_;
  std::uint64_t next_ = 1;
};

struct Box {
  long long x = 0;
  long long y = 0;
  long long width = 0;
  long long height = 0;
};

struct Detection {
  std::string cls;
  Box box;
  double confidence = 0.0;
};

struct ParcelAnalysisReport {
  std::string image_id;
  std::optional<long long> image_width;
  std::optional<long long> image_height;
  std::vector<Detection> detections;
  std::optional<Date> date;
  std::optional<std::string> country;
};

struct FirearmCandidate {
  std::string type;
  double confidence = 0.0;
};

struct FirearmIdReport {
  std::string image_id;
  std::vector<FirearmCandidate> candidates;
  std::optional<Date> date;
  std::optional<std::string> country;
};

/// Class names match the vocabulary case-insensitively and are returned in
/// the vocabulary's spelling. Throws UnknownClass, MalformedBox (negative or
/// non-integer coordinates, empty extent, outside the image) or
/// SchemaViolation (missing fields, confidence outside [0, 1]).
ParcelAnalysisReport parse_parcel_report(const nlohmann::json& j, const std::vector<std::string>& classes);

/// Throws SchemaViolation for more than `max_candidates` candidates or
/// increasing confidences, UnknownClass for types outside the vocabulary.
FirearmIdReport parse_firearm_report(const nlohmann::json& j, const std::vector<std::string>& types,
                                     std::size_t max_candidates);

/// Event records for the detector_reports topic: one per detection.
std::vector<domain::RawRecord> parcel_events(const ParcelAnalysisReport& r, const std::string& report_id,
                                             const Date& fallback_date);
/// One event carrying the top-ranked candidate.
std::vector<domain::RawRecord> firearm_events(const FirearmIdReport& r, const std::string& report_id,
                                              const Date& fallback_date);

nlohmann::json parcel_to_json(const ParcelAnalysisReport& r);
nlohmann::json firearm_to_json(const FirearmIdReport& r);

}  // namespace fusion::service

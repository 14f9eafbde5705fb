#pragma once

#include <cstdint>
#include <functional>
#include <json.hpp>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fusion/service/auth.hpp"
#include "fusion/service/reports.hpp"

namespace fusion::service {

enum class CaseStatus { open, under_review, reported };
std::string_view to_string(CaseStatus s) noexcept;
std::optional<CaseStatus> parse_case_status(std::string_view s) noexcept;

struct PinnedRecord {
  std::string source;  // "graph", "incident" or a federated store id
  std::string record_id;
  bool operator==(const PinnedRecord&) const = default;
};

struct Case {
  std::string id;
  std::string owner;
  std::string objective;
  std::int64_t created = 0;
  std::vector<PinnedRecord> pins;  // pin order
  CaseStatus status = CaseStatus::open;
};

nlohmann::json case_to_json(const Case& c);

/// Looks a record up for the acting role; nullopt when it does not exist or
/// is not visible.
using RecordResolver =
    std::function<std::optional<nlohmann::json>(const PinnedRecord& ref, const std::string& role)>;

/// Cases are private to their owner (NotOwner for anyone else). Status only
/// moves open -> under_review -> reported, and a reported case is frozen.
class CaseStore {
 public:
  CaseStore(RecordResolver resolver, Clock clock = system_clock())
      : resolver_(std::move(resolver)), clock_(std::move(clock)) {}

  Case create(const std::string& owner, const std::string& objective);
  std::vector<Case> list(const std::string& user) const;
  Case get(const std::string& user, const std::string& id) const;

  /// Pinning an already pinned record is a no-op. Throws UnknownRecord,
  /// InvalidTransition (reported case).
  Case pin(const std::string& user, const std::string& role, const std::string& id, const PinnedRecord& ref);
  Case unpin(const std::string& user, const std::string& id, const PinnedRecord& ref);
  Case transition(const std::string& user, const std::string& id, CaseStatus to);

  /// Snapshots the case and the current content of each pinned record into
  /// a new report; later case edits do not touch it.
  Report generate_report(const std::string& user, const std::string& role, const std::string& id,
                         ReportStore& reports);

 private:
  Case& owned(const std::string& user, const std::string& id);

  RecordResolver resolver_;
  Clock clock_;
  mutable std::mutex mutex_;
  std::map<std::string, Case> cases_;
  std::uint64_t next_ = 1;
};

}  // namespace fusion::service

#include "fusion/service/cases.hpp"

#include <algorithm>
#include <cstdio>

#include "fusion/error.hpp"

namespace fusion::service {

using nlohmann::json;

std::string_view to_string(CaseStatus s) noexcept {
  switch (s) {
    case CaseStatus::open: return "open";
    case CaseStatus::under_review: return "under_review";
    case CaseStatus::reported: return "reported";
  }
  return "open";
}

std::optional<CaseStatus> parse_case_status(std::string_view s) noexcept {
  if (s == "open") return CaseStatus::open;
  if (s == "under_review") return CaseStatus::under_review;
  if (s == "reported") return CaseStatus::reported;
  return std::nullopt;
}

json case_to_json(const Case& c) {
  json pins = json::array();
  for (const auto& p : c.pins) pins.push_back({{"source", p.source}, {"record_id", p.record_id}});
  return {{"id", c.id},
          {"owner", c.owner},
          {"objective", c.objective},
          {"created", c.created},
          {"status", to_string(c.status)},
          {"pins", pins}};
}

Case CaseStore::create(const std::string& owner, const std::string& objective) {
  if (objective.empty()) throw Error(Errc::SchemaViolation, "a case needs an objective", {"objective"});
  std::lock_guard lock(mutex_);
  char id[16];
  std::snprintf(id, sizeof id, "C-%06llu", static_cast<unsigned long long>(next_++));
  Case c{id, owner, objective, clock_(), {}, CaseStatus::open};
  cases_[c.id] = c;
  return c;
}

std::vector<Case> CaseStore::list(const std::string& user) const {
  std::lock_guard lock(mutex_);
  std::vector<Case> out;
  for (const auto& [id, c] : cases_)
    if (c.owner == user) out.push_back(c);
  return out;
}

Case& CaseStore::owned(const std::string& user, const std::string& id) {
  const auto it = cases_.find(id);
  if (it == cases_.end()) throw Error(Errc::UnknownCase, "no case '" + id + "'", {id});
  if (it->second.owner != user) throw Error(Errc::NotOwner, "case '" + id + "' belongs to another user");
  return it->second;
}

Case CaseStore::get(const std::string& user, const std::string& id) const {
  std::lock_guard lock(mutex_);
  return const_cast<CaseStore*>(this)->owned(user, id);
}

Case CaseStore::pin(const std::string& user, const std::string& role, const std::string& id, const PinnedRecord& ref) {
  {
    std::lock_guard lock(mutex_);
    if (owned(user, id).status == CaseStatus::reported)
      throw Error(Errc::InvalidTransition, "case '" + id + "' is reported and cannot change");
  }
  // Resolve outside the lock: federated lookups can be slow.
  if (!resolver_ || !resolver_(ref, role))
    throw Error(Errc::UnknownRecord, "no record '" + ref.record_id + "' in '" + ref.source + "'",
                {ref.source, ref.record_id});
  std::lock_guard lock(mutex_);
  Case& c = owned(user, id);
  if (c.status == CaseStatus::reported)
    throw Error(Errc::InvalidTransition, "case '" + id + "' is reported and cannot change");
  if (std::find(c.pins.begin(), c.pins.end(), ref) == c.pins.end()) c.pins.push_back(ref);
  return c;
}

Case CaseStore::unpin(const std::string& user, const std::string& id, const PinnedRecord& ref) {
  std::lock_guard lock(mutex_);
  Case& c = owned(user, id);
  if (c.status == CaseStatus::reported)
    throw Error(Errc::InvalidTransition, "case '" + id + "' is reported and cannot change");
  const auto it = std::find(c.pins.begin(), c.pins.end(), ref);
  if (it == c.pins.end())
    throw Error(Errc::UnknownRecord, "record '" + ref.record_id + "' is not pinned", {ref.source, ref.record_id});
  c.pins.erase(it);
  return c;
}

Case CaseStore::transition(const std::string& user, const std::string& id, CaseStatus to) {
  std::lock_guard lock(mutex_);
  Case& c = owned(user, id);
  const bool ok = (c.status == CaseStatus::open && to == CaseStatus::under_review) ||
                  (c.status == CaseStatus::under_review && to == CaseStatus::reported);
  if (!ok)
    throw Error(Errc::InvalidTransition,
                "cannot move case '" + id + "' from " + std::string(to_string(c.status)) + " to " +
                    std::string(to_string(to)));
  c.status = to;
  return c;
}

Report CaseStore::generate_report(const std::string& user, const std::string& role, const std::string& id,
                                  ReportStore& reports) {
  const Case c = get(user, id);
  json records = json::array();
  for (const auto& p : c.pins) {
    const auto content = resolver_ ? resolver_(p, role) : std::nullopt;
    records.push_back({{"source", p.source},
                       {"record_id", p.record_id},
                       {"record", content ? *content : json(nullptr)},
                       {"provenance", {{"source", p.source}, {"record_id", p.record_id}}}});
  }
  json payload{{"case", case_to_json(c)}, {"records", records}};
  return reports.create(user, "case-workbench", "Case " + c.id + ": " + c.objective, std::move(payload));
}

}  // namespace fusion::service

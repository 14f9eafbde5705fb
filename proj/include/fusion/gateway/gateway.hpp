#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <vector>

#include "fusion/gateway/policy.hpp"
#include "fusion/gateway/store.hpp"

namespace fusion::gateway {

enum class StoreStatus { ok, denied, unreachable, unsupported };
std::string_view to_string(StoreStatus s) noexcept;

struct FederatedRow {
  Row fields;                           // canonical names
  std::vector<std::string> provenance;  // contributing store ids, sorted

  bool operator==(const FederatedRow&) const = default;
};

struct FederatedResult {
  std::vector<FederatedRow> rows;
  std::map<std::string, StoreStatus> status;
  std::size_t dedup = 0;
};

/// Collapses rows whose (id, date, country) match across stores. The merged
/// row takes each field from the first contributing store in id order.
/// Output is ordered by (date, id, country). dedup = input rows - output rows.
FederatedResult merge_rows(const std::map<std::string, std::vector<Row>>& per_store);

struct GatewayConfig {
  std::chrono::milliseconds query_timeout{2000};
  std::chrono::milliseconds probe_timeout{1000};
};

/// Registry of stores plus the access policy. Registration takes an exclusive
/// lock; queries snapshot the registry under a shared lock and then run
/// without it.
class Gateway {
 public:
  explicit Gateway(AccessPolicy policy, GatewayConfig config = {});

  /// Throws IncompleteMapping (details: missing canonical fields) or
  /// UnhealthyStore when the probe fails or exceeds probe_timeout.
  std::string register_store(StoreDescriptor descriptor, std::shared_ptr<StoreAdapter> adapter);

  /// Policy is resolved before any adapter is contacted. Stores the role may
  /// not read are `denied`; stores lacking an operator or mapping for a filter
  /// are `unsupported`; the rest are queried concurrently and a failure or
  /// timeout marks only that store `unreachable`. A filter on a field the role
  /// may not see denies every store. Throws UnknownStore for unregistered
  /// targets and NoAccessibleStores when every target is denied.
  FederatedResult execute(const FederatedQuery& query, const std::string& role) const;

  /// Writes a canonical record into `to_store`, upserting on id. Requires the
  /// share grant on both stores (PolicyDenied otherwise); a failing
  /// destination raises DestinationUnreachable.
  bool share_record(const Row& record, const std::string& from_store, const std::string& to_store,
                    const std::string& role);

  std::vector<StoreDescriptor> stores() const;

 private:
  struct Entry {
    StoreDescriptor descriptor;
    std::shared_ptr<StoreAdapter> adapter;
  };

  std::map<std::string, std::shared_ptr<const Entry>> snapshot() const;

  AccessPolicy policy_;
  GatewayConfig config_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<const Entry>> entries_;
  mutable std::map<std::string, bool> health_;  // guarded by health_mutex_
  mutable std::mutex health_mutex_;
};

}  // namespace fusion::gateway

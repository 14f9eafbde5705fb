#include "fusion/gateway/gateway.hpp"

#include <algorithm>
#include <future>
#include <mutex>
#include <thread>
#include <tuple>

#include "fusion/error.hpp"

namespace fusion::gateway {

std::string_view to_string(StoreStatus s) noexcept {
  switch (s) {
    case StoreStatus::ok: return "ok";
    case StoreStatus::denied: return "denied";
    case StoreStatus::unreachable: return "unreachable";
    case StoreStatus::unsupported: return "unsupported";
  }
  return "denied";
}

FederatedResult merge_rows(const std::map<std::string, std::vector<Row>>& per_store) {
  FederatedResult out;
  std::map<std::tuple<std::string, std::string, std::string>, std::size_t> seen;
  auto get = [](const Row& r, const char* k) {
    const auto it = r.find(k);
    return it == r.end() ? std::string() : it->second;
  };
  std::size_t input = 0;
  for (const auto& [store, rows] : per_store) {
    for (const auto& r : rows) {
      ++input;
      const auto key = std::make_tuple(get(r, "id"), get(r, "date"), get(r, "country"));
      const auto [it, fresh] = seen.emplace(key, out.rows.size());
      if (fresh) {
        out.rows.push_back({r, {store}});
        continue;
      }
      auto& merged = out.rows[it->second];
      for (const auto& [k, v] : r) merged.fields.emplace(k, v);
      if (merged.provenance.back() != store) merged.provenance.push_back(store);
    }
  }
  out.dedup = input - out.rows.size();
  std::stable_sort(out.rows.begin(), out.rows.end(), [&](const FederatedRow& a, const FederatedRow& b) {
    return std::make_tuple(get(a.fields, "date"), get(a.fields, "id"), get(a.fields, "country")) <
           std::make_tuple(get(b.fields, "date"), get(b.fields, "id"), get(b.fields, "country"));
  });
  return out;
}

Gateway::Gateway(AccessPolicy policy, GatewayConfig config) : policy_(std::move(policy)), config_(config) {}

namespace {

// Runs `fn` on a detached thread so a slow store cannot hold the caller past
// its deadline; the adapter is kept alive by the captured shared_ptr.
template <typename T, typename Fn>
std::future<T> launch_detached(Fn fn) {
  auto promise = std::make_shared<std::promise<T>>();
  auto future = promise->get_future();
  std::thread([promise, fn = std::move(fn)]() mutable {
    try {
      promise->set_value(fn());
    } catch (...) {
      promise->set_exception(std::current_exception());
    }
  }).detach();
  return future;
}

}  // namespace

std::string Gateway::register_store(StoreDescriptor descriptor, std::shared_ptr<StoreAdapter> adapter) {
  if (descriptor.id.empty()) throw Error(Errc::BadConfig, "store id must not be empty");
  if (const auto missing = missing_fields(descriptor); !missing.empty())
    throw Error(Errc::IncompleteMapping, "store '" + descriptor.id + "' does not map every required field", missing);
  if (!adapter) throw Error(Errc::UnhealthyStore, "store '" + descriptor.id + "' has no adapter");

  auto probe = launch_detached<bool>([adapter] { return adapter->probe(); });
  bool healthy = false;
  if (probe.wait_for(config_.probe_timeout) == std::future_status::ready) {
    try {
      healthy = probe.get();
    } catch (const std::exception&) {
      healthy = false;
    }
  }
  if (!healthy) throw Error(Errc::UnhealthyStore, "store '" + descriptor.id + "' failed its health probe");

  descriptor.reachable = true;
  const std::string id = descriptor.id;
  auto entry = std::make_shared<const Entry>(Entry{std::move(descriptor), std::move(adapter)});
  {
    std::unique_lock lock(mutex_);
    entries_[id] = std::move(entry);
  }
  std::lock_guard lock(health_mutex_);
  health_[id] = true;
  return id;
}

std::map<std::string, std::shared_ptr<const Gateway::Entry>> Gateway::snapshot() const {
  std::shared_lock lock(mutex_);
  return entries_;
}

std::vector<StoreDescriptor> Gateway::stores() const {
  std::vector<StoreDescriptor> out;
  const auto snap = snapshot();
  std::lock_guard lock(health_mutex_);
  for (const auto& [id, e] : snap) {
    auto d = e->descriptor;
    if (const auto h = health_.find(id); h != health_.end()) d.reachable = h->second;
    out.push_back(std::move(d));
  }
  return out;
}

FederatedResult Gateway::execute(const FederatedQuery& query, const std::string& role) const {
  const auto snap = snapshot();
  std::vector<std::string> targets = query.targets;
  if (targets.empty())
    for (const auto& [id, e] : snap) targets.push_back(id);
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
  for (const auto& t : targets)
    if (!snap.count(t)) throw Error(Errc::UnknownStore, "no store '" + t + "' is registered", {t});

  bool fields_ok = true;
  for (const auto& f : query.filters) fields_ok = fields_ok && policy_.field_allowed(role, f.field);

  std::map<std::string, StoreStatus> status;
  struct Pending {
    std::string id;
    const Entry* entry;
    std::vector<Filter> filters;  // store field names
    std::future<std::vector<Row>> rows;
  };
  std::vector<Pending> pending;
  for (const auto& t : targets) {
    const Entry& e = *snap.at(t);
    if (!fields_ok || !policy_.allows(role, t, Operation::read)) {
      status[t] = StoreStatus::denied;
      continue;
    }
    std::vector<Filter> translated;
    bool supported = true;
    for (const auto& f : query.filters) {
      const auto m = e.descriptor.mapping.find(f.field);
      if (!e.descriptor.capabilities.count(f.op) || m == e.descriptor.mapping.end()) {
        supported = false;
        break;
      }
      translated.push_back({m->second, f.op, f.value, f.upper});
    }
    if (!supported) {
      status[t] = StoreStatus::unsupported;
      continue;
    }
    status[t] = StoreStatus::ok;
    pending.push_back({t, &e, std::move(translated), {}});
  }
  if (std::all_of(targets.begin(), targets.end(), [&](const auto& t) { return status[t] == StoreStatus::denied; }))
    throw Error(Errc::NoAccessibleStores, "the role '" + role + "' may not read any targeted store");

  // Scatter only after every policy decision is final.
  for (auto& p : pending) {
    auto adapter = p.entry->adapter;
    p.rows = launch_detached<std::vector<Row>>([adapter, filters = p.filters] { return adapter->query(filters); });
  }

  const auto deadline = std::chrono::steady_clock::now() + config_.query_timeout;
  std::map<std::string, std::vector<Row>> gathered;
  for (auto& p : pending) {
    std::vector<Row> rows;
    bool ok = p.rows.wait_until(deadline) == std::future_status::ready;
    if (ok) {
      try {
        rows = p.rows.get();
      } catch (const std::exception&) {
        ok = false;
      }
    }
    {
      std::lock_guard lock(health_mutex_);
      health_[p.id] = ok;
    }
    if (!ok) {
      status[p.id] = StoreStatus::unreachable;
      continue;
    }
    std::map<std::string, std::string> inverse;
    for (const auto& [canonical, field] : p.entry->descriptor.mapping) inverse[field] = canonical;
    auto& out = gathered[p.id];
    for (const auto& r : rows) {
      Row c;
      for (const auto& [k, v] : r)
        if (const auto it = inverse.find(k); it != inverse.end()) c[it->second] = v;
      out.push_back(std::move(c));
    }
  }

  FederatedResult result = merge_rows(gathered);
  result.status = std::move(status);
  for (auto& row : result.rows) {
    Row kept;
    for (const auto& [k, v] : row.fields) {
      const bool projected =
          query.projection.empty() || std::find(query.projection.begin(), query.projection.end(), k) != query.projection.end();
      if (projected && policy_.field_allowed(role, k)) kept.emplace(k, v);
    }
    row.fields = std::move(kept);
  }
  return result;
}

bool Gateway::share_record(const Row& record, const std::string& from_store, const std::string& to_store,
                           const std::string& role) {
  const auto snap = snapshot();
  for (const auto& s : {from_store, to_store})
    if (!snap.count(s)) throw Error(Errc::UnknownStore, "no store '" + s + "' is registered", {s});
  if (!policy_.allows(role, from_store, Operation::share) || !policy_.allows(role, to_store, Operation::share))
    throw Error(Errc::PolicyDenied, "the role '" + role + "' may not share from '" + from_store + "' to '" + to_store + "'");
  if (!record.count("id") || record.at("id").empty()) throw Error(Errc::MissingField, "shared record has no id");

  const Entry& dest = *snap.at(to_store);
  Row translated;
  for (const auto& [canonical, value] : record)
    if (const auto m = dest.descriptor.mapping.find(canonical); m != dest.descriptor.mapping.end())
      translated[m->second] = value;
  const std::string id_field = dest.descriptor.mapping.at("id");

  auto adapter = dest.adapter;
  auto write = launch_detached<bool>([adapter, translated, id_field] { return adapter->write(translated, id_field); });
  if (write.wait_for(config_.query_timeout) != std::future_status::ready)
    throw Error(Errc::DestinationUnreachable, "store '" + to_store + "' did not acknowledge the write");
  try {
    return write.get();
  } catch (const Error& e) {
    throw Error(Errc::DestinationUnreachable, "store '" + to_store + "' rejected the write: " + e.what());
  }
}

}  // namespace fusion::gateway

#include "fusion/gateway/policy.hpp"

#include <fstream>
#include <json.hpp>

#include "fusion/error.hpp"

namespace fusion::gateway {

void AccessPolicy::add_role(Role role) {
  std::string name = role.name;
  roles_[std::move(name)] = std::move(role);
}

bool AccessPolicy::has_role(std::string_view role) const { return roles_.find(role) != roles_.end(); }

bool AccessPolicy::allows(std::string_view role, std::string_view store, Operation op) const {
  const auto it = roles_.find(role);
  if (it == roles_.end()) return false;
  const Role& r = it->second;
  return r.operations.count(op) && (r.stores.count("*") || r.stores.count(std::string(store)));
}

bool AccessPolicy::field_allowed(std::string_view role, std::string_view field) const {
  const auto it = roles_.find(role);
  if (it == roles_.end()) return false;
  return it->second.fields.count("*") || it->second.fields.count(std::string(field));
}

AccessPolicy load_policy(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::BadConfig, "cannot open policy '" + path + "'");
  try {
    const auto j = nlohmann::json::parse(in);
    AccessPolicy p;
    for (const auto& [name, g] : j.at("roles").items()) {
      Role r{name, g.value("stores", std::set<std::string>{}), g.value("fields", std::set<std::string>{}), {}};
      for (const auto& op : g.value("operations", std::vector<std::string>{})) {
        if (op == "read") r.operations.insert(Operation::read);
        else if (op == "share") r.operations.insert(Operation::share);
        else throw Error(Errc::BadConfig, "unknown operation '" + op + "' for role '" + name + "'");
      }
      p.add_role(std::move(r));
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::BadConfig, "policy '" + path + "': " + e.what());
  }
}

}  // namespace fusion::gateway

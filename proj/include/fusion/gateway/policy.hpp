#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>

namespace fusion::gateway {

enum class Operation { read, share };

/// "*" in stores or fields grants everything of that kind. Anything not
/// granted is denied.
struct Role {
  std::string name;
  std::set<std::string> stores;
  std::set<std::string> fields;
  std::set<Operation> operations;
};

class AccessPolicy {
 public:
  void add_role(Role role);
  bool has_role(std::string_view role) const;
  bool allows(std::string_view role, std::string_view store, Operation op) const;
  bool field_allowed(std::string_view role, std::string_view field) const;

 private:
  std::map<std::string, Role, std::less<>> roles_;
};

/// {"roles": {"<name>": {"stores": [...], "fields": [...], "operations": ["read", "share"]}}}
AccessPolicy load_policy(const std::string& path);

}  // namespace fusion::gateway

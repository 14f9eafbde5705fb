#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace fusion::service {

/// Seconds since the Unix epoch; injectable so tests can move time.
using Clock = std::function<std::int64_t()>;
Clock system_clock();

/// PBKDF2-HMAC-SHA256, hex encoded.
std::string pbkdf2_sha256_hex(const std::string& secret, const std::string& salt, int iterations,
                              std::size_t bytes = 32);
std::string random_hex(std::size_t bytes);

struct UserEntry {
  std::string username;
  std::string role;
  std::string salt;
  int iterations = 100000;
  std::string hash;  // pbkdf2_sha256_hex(secret, salt, iterations)
};

/// {"users": [{"username", "role", "salt", "iterations", "hash"}]}
std::vector<UserEntry> load_users(const std::string& path);
UserEntry make_user(const std::string& username, const std::string& role, const std::string& secret,
                    int iterations = 100000);

struct SessionToken {
  std::string token;
  std::string user;
  std::string role;
  std::int64_t expires_at = 0;
};

/// Issues tokens accepted by every endpoint until expiry. After
/// `lockout_after` consecutive failures an account is Locked for
/// `lockout_seconds`, even for the right secret.
class Authenticator {
 public:
  Authenticator(std::vector<UserEntry> users, std::int64_t ttl_seconds, int lockout_after,
                std::int64_t lockout_seconds, Clock clock = system_clock());

  /// Throws BadCredentials or Locked.
  SessionToken authenticate(const std::string& username, const std::string& secret);
  /// Throws Unauthorized for unknown or expired tokens.
  SessionToken validate(const std::string& token) const;
  void revoke(const std::string& token);
  bool user_exists(const std::string& username) const;

 private:
  struct Failures {
    int consecutive = 0;
    std::int64_t locked_until = 0;
  };

  std::map<std::string, UserEntry> users_;
  std::int64_t ttl_;
  int lockout_after_;
  std::int64_t lockout_seconds_;
  Clock clock_;
  mutable std::mutex mutex_;
  std::map<std::string, SessionToken> tokens_;
  std::map<std::string, Failures> failures_;
};

}  // namespace fusion::service

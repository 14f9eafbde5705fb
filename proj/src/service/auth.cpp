#include "fusion/service/auth.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/rand.h>

#include <chrono>
#include <fstream>
#include <json.hpp>

#include "fusion/error.hpp"

namespace fusion::service {

using nlohmann::json;

namespace {

std::string to_hex(const unsigned char* data, std::size_t n) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(n * 2);
  for (std::size_t i = 0; i < n; ++i) {
    out += kDigits[data[i] >> 4];
    out += kDigits[data[i] & 0xF];
  }
  return out;
}

bool constant_time_equal(const std::string& a, const std::string& b) {
  return a.size() == b.size() && CRYPTO_memcmp(a.data(), b.data(), a.size()) == 0;
}

}  // namespace

Clock system_clock() {
  return [] {
    return std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch())
        .count();
  };
}

std::string pbkdf2_sha256_hex(const std::string& secret, const std::string& salt, int iterations, std::size_t bytes) {
  std::vector<unsigned char> out(bytes);
  if (iterations < 1 ||
      PKCS5_PBKDF2_HMAC(secret.data(), static_cast<int>(secret.size()),
                        reinterpret_cast<const unsigned char*>(salt.data()), static_cast<int>(salt.size()), iterations,
                        EVP_sha256(), static_cast<int>(bytes), out.data()) != 1)
    throw Error(Errc::BadConfig, "key derivation failed");
  return to_hex(out.data(), out.size());
}

std::string random_hex(std::size_t bytes) {
  std::vector<unsigned char> buf(bytes);
  if (RAND_bytes(buf.data(), static_cast<int>(bytes)) != 1) throw Error(Errc::BadConfig, "no entropy available");
  return to_hex(buf.data(), buf.size());
}

std::vector<UserEntry> load_users(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::BadConfig, "cannot open user file '" + path + "'");
  try {
    const json doc = json::parse(in);
    std::vector<UserEntry> out;
    for (const auto& u : doc.at("users"))
      out.push_back({u.at("username").get<std::string>(), u.at("role").get<std::string>(),
                     u.at("salt").get<std::string>(), u.value("iterations", 100000), u.at("hash").get<std::string>()});
    return out;
  } catch (const json::exception& e) {
    throw Error(Errc::BadConfig, "user file '" + path + "' is invalid: " + e.what());
  }
}

UserEntry make_user(const std::string& username, const std::string& role, const std::string& secret,
                    int iterations) {
  const std::string salt = random_hex(16);
  return {username, role, salt, iterations, pbkdf2_sha256_hex(secret, salt, iterations)};
}

Authenticator::Authenticator(std::vector<UserEntry> users, std::int64_t ttl_seconds, int lockout_after,
                             std::int64_t lockout_seconds, Clock clock)
    : ttl_(ttl_seconds), lockout_after_(lockout_after), lockout_seconds_(lockout_seconds), clock_(std::move(clock)) {
  for (auto& u : users) {
    const std::string name = u.username;
    if (!users_.emplace(name, std::move(u)).second) throw Error(Errc::BadConfig, "duplicate user '" + name + "'");
  }
}

SessionToken Authenticator::authenticate(const std::string& username, const std::string& secret) {
  const auto now = clock_();
  const auto it = users_.find(username);
  {
    std::lock_guard lock(mutex_);
    if (const auto f = failures_.find(username); f != failures_.end() && f->second.locked_until > now)
      throw Error(Errc::Locked, "account '" + username + "' is locked");
  }
  // Derive even for unknown users so timing does not reveal which names exist.
  const std::string derived = it == users_.end()
                                  ? pbkdf2_sha256_hex(secret, "unknown-user", 1000)
                                  : pbkdf2_sha256_hex(secret, it->second.salt, it->second.iterations);
  std::lock_guard lock(mutex_);
  if (it == users_.end() || !constant_time_equal(derived, it->second.hash)) {
    if (it != users_.end()) {
      auto& f = failures_[username];
      if (f.locked_until != 0 && f.locked_until <= now) f = {};
      if (++f.consecutive >= lockout_after_) f.locked_until = now + lockout_seconds_;
    }
    throw Error(Errc::BadCredentials, "invalid username or secret");
  }
  failures_.erase(username);
  SessionToken t{random_hex(24), username, it->second.role, now + ttl_};
  tokens_[t.token] = t;
  return t;
}

SessionToken Authenticator::validate(const std::string& token) const {
  std::lock_guard lock(mutex_);
  const auto it = tokens_.find(token);
  if (it == tokens_.end()) throw Error(Errc::Unauthorized, "unknown session token");
  if (clock_() >= it->second.expires_at) throw Error(Errc::Unauthorized, "session token expired");
  return it->second;
}

void Authenticator::revoke(const std::string& token) {
  std::lock_guard lock(mutex_);
  tokens_.erase(token);
}

bool Authenticator::user_exists(const std::string& username) const { return users_.count(username) > 0; }

}  // namespace fusion::service

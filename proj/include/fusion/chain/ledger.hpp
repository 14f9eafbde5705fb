#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fusion::chain {

enum class Chain { btc, eth };

std::string_view to_string(Chain c) noexcept;
std::optional<Chain> parse_chain(std::string_view s) noexcept;

struct ChainTx {
  Chain chain = Chain::btc;
  std::string txid;
  std::string from;
  std::string to;
  double amount = 0.0;     // chain-native units
  double usd_value = 0.0;  // >= 0
  std::int64_t timestamp = 0;  // UTC seconds, > 0
  bool self_transfer = false;  // set by preprocess

  bool operator==(const ChainTx&) const = default;
};

struct RejectedRow {
  std::size_t line = 0;
  std::string reason;
  std::string raw;
};

struct LedgerRead {
  std::vector<ChainTx> txs;
  std::vector<RejectedRow> rejected;
};

inline constexpr std::string_view kLedgerHeader = "chain,txid,from,to,amount,usd_value,timestamp";

/// Reads a ledger CSV. A wrong header throws Error(ParseError); malformed
/// rows are quarantined in `rejected` with their 1-based line number.
LedgerRead read_ledger_csv(std::istream& in);
LedgerRead read_ledger_file(const std::string& path);
std::string write_ledger_csv(std::span<const ChainTx> txs);

/// Lowercases ETH addresses and bech32 BTC addresses; base58 is case-sensitive.
std::string normalize_address(Chain chain, std::string_view address);

/// Drops repeated (chain, txid) keeping the first, normalises addresses, marks
/// self-transfers and stable-sorts by timestamp.
std::vector<ChainTx> preprocess(std::span<const ChainTx> txs);

struct BalancePoint {
  std::int64_t timestamp = 0;
  double balance = 0.0;

  bool operator==(const BalancePoint&) const = default;
};

struct AddressProfile {
  std::string address;
  Chain chain = Chain::btc;
  std::int64_t first_seen = 0;
  std::int64_t last_seen = 0;
  std::int64_t lifespan = 0;  // seconds
  std::size_t tx_count = 0;
  double tx_frequency = 0.0;  // tx_count / max(lifespan_days, 1)
  double total_usd_in = 0.0;
  double total_usd_out = 0.0;
  std::size_t degree_in = 0;   // distinct senders, self excluded
  std::size_t degree_out = 0;  // distinct receivers, self excluded
  std::vector<BalancePoint> balance_series;

  double lifespan_days() const { return static_cast<double>(lifespan) / 86400.0; }
  bool operator==(const AddressProfile&) const = default;
};

/// One profile per (chain, address), sorted by chain then address. Chains
/// are profiled in parallel. Input must be preprocessed.
std::vector<AddressProfile> build_profiles(std::span<const ChainTx> txs);

}  // namespace fusion::chain

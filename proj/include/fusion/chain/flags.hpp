#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "fusion/chain/ledger.hpp"

namespace fusion::chain {

namespace rules {
inline constexpr std::string_view watchlist = "watchlist";
inline constexpr std::string_view high_value = "high_value";
inline constexpr std::string_view watchlist_counterparty = "watchlist_counterparty";
}  // namespace rules

struct FlagRules {
  bool watchlist = true;
  std::optional<double> high_value_usd;  // flag usd_value >= threshold
  /// Flag transactions with an endpoint that trades directly with a
  /// watchlisted address anywhere in the ledger.
  bool watchlist_counterparty = false;
};

struct TxFlag {
  Chain chain = Chain::btc;
  std::string txid;
  std::string rule;
  std::vector<std::string> evidence;  // addresses or the threshold that triggered it

  auto key() const { return std::tie(chain, txid, rule); }
  bool operator==(const TxFlag&) const = default;
};

/// Evaluates every enabled rule on every transaction. One flag per
/// (transaction, rule), ordered by ledger position then rule name.
std::vector<TxFlag> flag_transactions(std::span<const ChainTx> txs, const std::set<std::string>& watchlist,
                                      const FlagRules& rules);

std::string flags_ndjson(std::span<const TxFlag> flags);

}  // namespace fusion::chain

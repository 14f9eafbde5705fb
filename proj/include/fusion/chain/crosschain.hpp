#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fusion/chain/ledger.hpp"

namespace fusion::chain {

struct CrossChainConfig {
  std::int64_t window = 72 * 3600;  // seconds after BTC last_seen
  double tolerance = 5.0;           // USD
};

struct CrossChainLink {
  std::string btc_address;
  std::string eth_address;
  std::int64_t delta_t = 0;
  double usd_gap = 0.0;
  std::optional<double> matched_price;
  double score = 0.0;

  bool operator==(const CrossChainLink&) const = default;
};

/// Emits (b, e) when e.first_seen lies in [b.last_seen, b.last_seen + window]
/// and |b.total_usd_out - e.total_usd_in| <= tolerance. matched_price is the
/// catalog price closest to either amount among those within tolerance
/// (smaller price on ties). score = 1 - 0.5 dt/window - 0.5 gap/tol, with the
/// gap term 0 when tol = 0, clamped to [0, 1]. Output sorted by (btc, eth).
/// Throws Error(BadConfig) for window <= 0 or tolerance < 0.
std::vector<CrossChainLink> link_cross_chain(std::span<const AddressProfile> btc, std::span<const AddressProfile> eth,
                                             std::span<const double> price_catalog, const CrossChainConfig& config);

std::string links_ndjson(std::span<const CrossChainLink> links);

}  // namespace fusion::chain

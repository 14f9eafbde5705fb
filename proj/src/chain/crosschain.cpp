#include "fusion/chain/crosschain.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>

#include "fusion/error.hpp"

namespace fusion::chain {

namespace {

std::optional<double> nearest_price(std::span<const double> catalog, double a, double b, double tol) {
  std::optional<double> best;
  double best_gap = 0.0;
  for (double price : catalog) {
    const double gap = std::min(std::fabs(price - a), std::fabs(price - b));
    if (gap > tol) continue;
    if (!best || gap < best_gap || (gap == best_gap && price < *best)) {
      best = price;
      best_gap = gap;
    }
  }
  return best;
}

}  // namespace

std::vector<CrossChainLink> link_cross_chain(std::span<const AddressProfile> btc, std::span<const AddressProfile> eth,
                                             std::span<const double> price_catalog, const CrossChainConfig& config) {
  if (config.window <= 0) throw Error(Errc::BadConfig, "cross-chain window must be > 0");
  if (!(config.tolerance >= 0.0)) throw Error(Errc::BadConfig, "cross-chain tolerance must be >= 0");

  // ETH profiles ordered by first_seen so each BTC address scans only its window.
  std::vector<const AddressProfile*> by_start;
  for (const auto& e : eth)
    if (e.chain == Chain::eth) by_start.push_back(&e);
  std::sort(by_start.begin(), by_start.end(),
            [](const AddressProfile* a, const AddressProfile* b) { return a->first_seen < b->first_seen; });

  std::vector<CrossChainLink> out;
  for (const auto& b : btc) {
    if (b.chain != Chain::btc) continue;
    auto it = std::lower_bound(by_start.begin(), by_start.end(), b.last_seen,
                               [](const AddressProfile* p, std::int64_t t) { return p->first_seen < t; });
    for (; it != by_start.end() && (*it)->first_seen - b.last_seen <= config.window; ++it) {
      const auto& e = **it;
      const double gap = std::fabs(b.total_usd_out - e.total_usd_in);
      if (gap > config.tolerance) continue;
      CrossChainLink link;
      link.btc_address = b.address;
      link.eth_address = e.address;
      link.delta_t = e.first_seen - b.last_seen;
      link.usd_gap = gap;
      link.matched_price = nearest_price(price_catalog, b.total_usd_out, e.total_usd_in, config.tolerance);
      const double time_term = static_cast<double>(link.delta_t) / static_cast<double>(config.window);
      const double gap_term = config.tolerance > 0.0 ? gap / config.tolerance : 0.0;
      link.score = std::clamp(1.0 - 0.5 * time_term - 0.5 * gap_term, 0.0, 1.0);
      out.push_back(std::move(link));
    }
  }
  std::sort(out.begin(), out.end(), [](const CrossChainLink& x, const CrossChainLink& y) {
    return std::tie(x.btc_address, x.eth_address) < std::tie(y.btc_address, y.eth_address);
  });
  return out;
}

std::string links_ndjson(std::span<const CrossChainLink> links) {
  std::string out;
  for (const auto& l : links) {
    nlohmann::json j{{"btc_address", l.btc_address}, {"eth_address", l.eth_address}, {"delta_t", l.delta_t},
                     {"usd_gap", l.usd_gap}, {"score", l.score}};
    j["matched_price"] = l.matched_price ? nlohmann::json(*l.matched_price) : nlohmann::json(nullptr);
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace fusion::chain

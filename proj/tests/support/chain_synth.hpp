#pragma once

// Synthetic BTC/ETH ledgers with planted cross-chain pairs. Planted BTC
// addresses pay out X_i and go quiet; the paired ETH address is first funded
// with X_i inside the window. Decoy amounts live in disjoint USD bands so the
// planted pairs are the only ones meeting the predicate.

#include <random>
#include <set>
#include <string>
#include <vector>

#include "fusion/chain/ledger.hpp"

namespace synth {

struct PlantedLedger {
  std::vector<fusion::chain::ChainTx> txs;
  std::set<std::pair<std::string, std::string>> planted;  // (btc, eth)
};

inline PlantedLedger planted_ledger(std::mt19937& rng, int pairs, int decoys, long long window) {
  using fusion::chain::Chain;
  PlantedLedger out;
  const long long base = 1'700'000'000;
  int seq = 0;
  auto tx = [&](Chain c, std::string from, std::string to, double usd, long long ts) {
    out.txs.push_back({c, (c == Chain::btc ? "b" : "e") + std::to_string(seq++), std::move(from), std::move(to),
                       usd / 1000.0, usd, ts, false});
  };
  std::uniform_real_distribution<double> frac(0.0, 1.0);
  for (int i = 0; i < pairs; ++i) {
    const double x = 1000.0 + 137.0 * i + frac(rng);
    const long long quiet = base + i * 9 * 86400 + 3600;
    const std::string b = "1Plant" + std::to_string(i), e = "0xplant" + std::to_string(i);
    tx(Chain::btc, "1Fund" + std::to_string(i), b, x + 50.0, quiet - 7200);
    tx(Chain::btc, b, "1Sink", x, quiet);
    const long long delay = std::uniform_int_distribution<long long>(0, window)(rng);
    tx(Chain::eth, "0xsource" + std::to_string(i), e, x, quiet + delay);
  }
  for (int k = 0; k < decoys; ++k) {
    const long long t0 = base + std::uniform_int_distribution<long long>(0, 120 * 86400)(rng);
    const double a = 20000.0 + 70000.0 * frac(rng);
    const std::string d = "1Decoy" + std::to_string(k);
    tx(Chain::btc, "1Exchange", d, a, t0);
    tx(Chain::btc, d, "1Sink", a, t0 + 600);
    const long long t1 = base + std::uniform_int_distribution<long long>(0, 120 * 86400)(rng);
    tx(Chain::eth, "0xexchange", "0xdecoy" + std::to_string(k), 100000.0 + 100000.0 * frac(rng), t1);
  }
  std::shuffle(out.txs.begin(), out.txs.end(), rng);
  for (int i = 0; i < pairs; ++i) out.planted.emplace("1Plant" + std::to_string(i), "0xplant" + std::to_string(i));
  return out;
}

}  // namespace synth

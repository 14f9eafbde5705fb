#include "fusion/chain/ledger.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <map>
#include <set>
#include <sstream>

#include "fusion/error.hpp"
#include "fusion/text.hpp"

namespace fusion::chain {

std::string_view to_string(Chain c) noexcept { return c == Chain::btc ? "btc" : "eth"; }

std::optional<Chain> parse_chain(std::string_view s) noexcept {
  const auto lower = text::to_lower(s);
  if (lower == "btc") return Chain::btc;
  if (lower == "eth") return Chain::eth;
  return std::nullopt;
}

LedgerRead read_ledger_csv(std::istream& in) {
  LedgerRead out;
  std::string line;
  if (!std::getline(in, line) || text::trim(line) != kLedgerHeader)
    throw Error(Errc::ParseError, "ledger header must be '" + std::string(kLedgerHeader) + "'");
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) continue;
    auto reject = [&](std::string reason) { out.rejected.push_back({line_no, std::move(reason), line}); };

    const auto cols = text::split(line, ',');
    if (cols.size() != 7) {
      reject("expected 7 columns, got " + std::to_string(cols.size()));
      continue;
    }
    ChainTx tx;
    const auto chain = parse_chain(text::trim(cols[0]));
    if (!chain) {
      reject("chain");
      continue;
    }
    tx.chain = *chain;
    tx.txid = text::trim(cols[1]);
    tx.from = text::trim(cols[2]);
    tx.to = text::trim(cols[3]);
    if (tx.txid.empty() || tx.from.empty() || tx.to.empty()) {
      reject("empty txid or address");
      continue;
    }
    const auto amount = text::parse_double(text::trim(cols[4]));
    const auto usd = text::parse_double(text::trim(cols[5]));
    const auto ts = text::parse_int(text::trim(cols[6]));
    if (!amount) {
      reject("amount");
      continue;
    }
    if (!usd || *usd < 0.0) {
      reject("usd_value");
      continue;
    }
    if (!ts || *ts <= 0) {
      reject("timestamp");
      continue;
    }
    tx.amount = *amount;
    tx.usd_value = *usd;
    tx.timestamp = *ts;
    out.txs.push_back(std::move(tx));
  }
  return out;
}

LedgerRead read_ledger_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ParseError, "cannot open ledger '" + path + "'");
  return read_ledger_csv(in);
}

std::string write_ledger_csv(std::span<const ChainTx> txs) {
  std::ostringstream out;
  out << kLedgerHeader << "\n";
  for (const auto& t : txs)
    out << to_string(t.chain) << ',' << t.txid << ',' << t.from << ',' << t.to << ',' << text::format_double(t.amount)
        << ',' << text::format_double(t.usd_value) << ',' << t.timestamp << "\n";
  return out.str();
}

std::string normalize_address(Chain chain, std::string_view address) {
  std::string a = text::trim(address);
  if (chain == Chain::eth) return text::to_lower(a);
  const auto lower = text::to_lower(a);
  if (lower.starts_with("bc1") || lower.starts_with("tb1") || lower.starts_with("bcrt1")) return lower;
  return a;
}

std::vector<ChainTx> preprocess(std::span<const ChainTx> txs) {
  std::vector<ChainTx> out;
  std::set<std::pair<Chain, std::string>> seen;
  for (const auto& t : txs) {
    if (!seen.emplace(t.chain, t.txid).second) continue;
    ChainTx n = t;
    n.from = normalize_address(t.chain, t.from);
    n.to = normalize_address(t.chain, t.to);
    n.self_transfer = n.from == n.to;
    out.push_back(std::move(n));
  }
  std::stable_sort(out.begin(), out.end(), [](const ChainTx& a, const ChainTx& b) { return a.timestamp < b.timestamp; });
  return out;
}

namespace {

std::vector<AddressProfile> profile_chain(std::span<const ChainTx> txs, Chain chain) {
  struct Acc {
    AddressProfile p;
    std::set<std::string> senders, receivers;
  };
  std::map<std::string, Acc> acc;
  auto touch = [&](const std::string& address, const ChainTx& t) -> Acc& {
    auto [it, fresh] = acc.try_emplace(address);
    auto& a = it->second;
    if (fresh) {
      a.p.address = address;
      a.p.chain = chain;
      a.p.first_seen = t.timestamp;
    }
    a.p.last_seen = t.timestamp;
    ++a.p.tx_count;
    return a;
  };
  for (const auto& t : txs) {
    if (t.chain != chain) continue;
    auto& src = touch(t.from, t);
    src.p.total_usd_out += t.usd_value;
    if (t.from != t.to) {
      src.receivers.insert(t.to);
      double bal = src.p.balance_series.empty() ? 0.0 : src.p.balance_series.back().balance;
      src.p.balance_series.push_back({t.timestamp, bal - t.usd_value});
      auto& dst = touch(t.to, t);
      dst.senders.insert(t.from);
      dst.p.total_usd_in += t.usd_value;
      bal = dst.p.balance_series.empty() ? 0.0 : dst.p.balance_series.back().balance;
      dst.p.balance_series.push_back({t.timestamp, bal + t.usd_value});
    } else {
      src.p.total_usd_in += t.usd_value;
      const double bal = src.p.balance_series.empty() ? 0.0 : src.p.balance_series.back().balance;
      src.p.balance_series.push_back({t.timestamp, bal});
    }
  }
  std::vector<AddressProfile> out;
  out.reserve(acc.size());
  for (auto& [address, a] : acc) {
    a.p.lifespan = a.p.last_seen - a.p.first_seen;
    a.p.degree_in = a.senders.size();
    a.p.degree_out = a.receivers.size();
    a.p.tx_frequency = static_cast<double>(a.p.tx_count) / std::max(a.p.lifespan_days(), 1.0);
    out.push_back(std::move(a.p));
  }
  return out;
}

}  // namespace

std::vector<AddressProfile> build_profiles(std::span<const ChainTx> txs) {
  auto btc = std::async(std::launch::async, [txs] { return profile_chain(txs, Chain::btc); });
  auto out = profile_chain(txs, Chain::eth);
  auto first = btc.get();
  first.insert(first.end(), std::make_move_iterator(out.begin()), std::make_move_iterator(out.end()));
  return first;
}

}  // namespace fusion::chain

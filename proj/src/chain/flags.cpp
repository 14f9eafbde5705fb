#include "fusion/chain/flags.hpp"

#include <algorithm>
#include <map>
#include <json.hpp>

#include "fusion/text.hpp"

namespace fusion::chain {

std::vector<TxFlag> flag_transactions(std::span<const ChainTx> txs, const std::set<std::string>& watchlist,
                                      const FlagRules& rules) {
  // Watchlisted addresses seen on the other side of any transaction.
  std::map<std::string, std::set<std::string>> listed_partners;
  if (rules.watchlist_counterparty) {
    for (const auto& t : txs) {
      if (watchlist.contains(t.to)) listed_partners[t.from].insert(t.to);
      if (watchlist.contains(t.from)) listed_partners[t.to].insert(t.from);
    }
  }

  std::vector<TxFlag> out;
  for (const auto& t : txs) {
    std::vector<TxFlag> here;
    if (rules.watchlist) {
      std::vector<std::string> hits;
      if (watchlist.contains(t.from)) hits.push_back(t.from);
      if (watchlist.contains(t.to) && t.to != t.from) hits.push_back(t.to);
      if (!hits.empty()) here.push_back({t.chain, t.txid, std::string(rules::watchlist), hits});
    }
    if (rules.high_value_usd && t.usd_value >= *rules.high_value_usd)
      here.push_back({t.chain, t.txid, std::string(rules::high_value),
                      {text::format_double(t.usd_value) + ">=" + text::format_double(*rules.high_value_usd)}});
    if (rules.watchlist_counterparty) {
      std::set<std::string> partners;
      for (const auto* end : {&t.from, &t.to})
        if (auto it = listed_partners.find(*end); it != listed_partners.end())
          partners.insert(it->second.begin(), it->second.end());
      if (!partners.empty())
        here.push_back({t.chain, t.txid, std::string(rules::watchlist_counterparty), {partners.begin(), partners.end()}});
    }
    std::sort(here.begin(), here.end(), [](const TxFlag& a, const TxFlag& b) { return a.rule < b.rule; });
    out.insert(out.end(), here.begin(), here.end());
  }
  return out;
}

std::string flags_ndjson(std::span<const TxFlag> flags) {
  std::string out;
  for (const auto& f : flags) {
    nlohmann::json j{{"chain", to_string(f.chain)}, {"txid", f.txid}, {"rule", f.rule}, {"evidence", f.evidence}};
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace fusion::chain

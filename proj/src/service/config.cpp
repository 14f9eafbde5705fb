#include "fusion/service/config.hpp"

#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "fusion/error.hpp"

namespace fusion::service {

using nlohmann::json;

namespace {

std::string resolve(const std::filesystem::path& base, const std::string& p) {
  if (p.empty()) return p;
  const std::filesystem::path path(p);
  return (path.is_absolute() ? path : base / path).lexically_normal().string();
}

}  // namespace

AppConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::BadConfig, "cannot open config '" + path + "'");
  const auto base = std::filesystem::absolute(path).parent_path();
  AppConfig c;
  std::string key;
  try {
    const json j = json::parse(in);
    auto at = [&](const char* k) -> const json& {
      key = k;
      return j.at(k);
    };

    const auto& auth = at("auth");
    c.users_path = resolve(base, auth.at("users").get<std::string>());
    c.token_ttl_seconds = auth.value("token_ttl_seconds", c.token_ttl_seconds);
    c.lockout_after = auth.value("lockout_after", c.lockout_after);
    c.lockout_seconds = auth.value("lockout_seconds", c.lockout_seconds);

    const auto& det = at("detectors");
    c.parcel_classes = det.at("parcel_classes").get<std::vector<std::string>>();
    c.firearm_id_types = det.at("firearm_types").get<std::vector<std::string>>();
    c.max_firearm_candidates = det.value("max_candidates", c.max_firearm_candidates);

    const auto& tax = at("taxonomy");
    c.taxonomy.top10 = tax.at("classes").get<std::vector<std::string>>();
    for (const auto& [model, cls] : tax.at("models").items()) c.taxonomy.model_to_class[model] = cls.get<std::string>();
    if (const auto v = c.taxonomy.violations(); !v.empty())
      throw Error(Errc::BadConfig, "taxonomy is malformed", v);

    const auto& g = at("graph");
    const json rates = g.value("usd_rates", json::object());
    for (const auto& [cur, rate] : rates.items()) c.cleanse.usd_rates[cur] = rate.get<double>();
    c.graph_state_path = resolve(base, g.value("state", std::string()));
    for (const auto& f : g.value("ingest", json::array())) c.ingest_files.push_back(resolve(base, f.get<std::string>()));

    const auto& cor = at("correlation");
    for (const auto& cj : cor.at("criteria")) {
      const auto attr = correlate::parse_attribute(cj.at("attribute").get<std::string>());
      const auto cmp = correlate::parse_comparator(cj.value("comparator", std::string("exact")));
      if (!attr || !cmp) throw Error(Errc::BadConfig, "unknown correlation criterion", {cj.dump()});
      c.criteria.push_back({*attr, *cmp, cj.value("weight", 1.0)});
    }
    correlate::validate_criteria(c.criteria);
    c.correlation_threshold = cor.value("threshold", c.correlation_threshold);
    const auto& db = cor.at("dbscan");
    c.dbscan.eps = db.value("eps", c.dbscan.eps);
    c.dbscan.min_pts = db.value("min_pts", c.dbscan.min_pts);
    if (const auto m = correlate::parse_metric(db.value("metric", std::string("euclidean"))))
      c.dbscan.metric = *m;
    else
      throw Error(Errc::BadConfig, "unknown dbscan metric");
    c.year_min = cor.value("year_min", c.year_min);
    c.year_max = cor.value("year_max", c.year_max);

    const auto& ev = at("evaluation");
    c.network_path = resolve(base, ev.at("network").get<std::string>());
    c.situation.priority_node = ev.value("priority_node", c.situation.priority_node);
    c.situation.high_state = ev.value("high_state", c.situation.high_state);
    c.situation.cause_node = ev.value("cause_node", c.situation.cause_node);
    c.evidence_prefix = ev.value("evidence_prefix", c.evidence_prefix);

    const auto& inc = at("incidents");
    c.tracker_path = resolve(base, inc.at("tracker").get<std::string>());
    c.articles_path = resolve(base, inc.value("articles", std::string()));
    c.risk_threshold = inc.value("risk_threshold", c.risk_threshold);

    const auto& ch = at("chain");
    c.ledger_path = resolve(base, ch.value("ledger", std::string()));
    for (const auto& a : ch.value("watchlist", json::array())) c.watchlist.insert(a.get<std::string>());
    if (ch.contains("high_value_usd")) c.flag_rules.high_value_usd = ch.at("high_value_usd").get<double>();
    c.flag_rules.watchlist_counterparty = ch.value("watchlist_counterparty", false);
    c.crosschain.window = ch.value("window_seconds", c.crosschain.window);
    c.crosschain.tolerance = ch.value("tolerance_usd", c.crosschain.tolerance);
    c.price_catalog = ch.value("price_catalog", std::vector<double>{});

    const auto& fed = at("federation");
    for (const auto& s : fed.at("stores")) c.store_paths.push_back(resolve(base, s.get<std::string>()));
    c.policy_path = resolve(base, fed.at("policy").get<std::string>());
    c.gateway.query_timeout = std::chrono::milliseconds(fed.value("query_timeout_ms", 2000));
    c.gateway.probe_timeout = std::chrono::milliseconds(fed.value("probe_timeout_ms", 1000));

    if (j.contains("pagination")) {
      key = "pagination";
      c.default_page_size = j["pagination"].value("default", c.default_page_size);
      c.max_page_size = j["pagination"].value("max", c.max_page_size);
    }
  } catch (const json::exception& e) {
    throw Error(Errc::BadConfig, "config '" + path + "' is invalid near '" + key + "': " + e.what());
  }
  if (c.token_ttl_seconds <= 0 || c.lockout_after <= 0)
    throw Error(Errc::BadConfig, "auth ttl and lockout must be positive");
  if (c.parcel_classes.empty() || c.default_page_size == 0 || c.max_page_size < c.default_page_size)
    throw Error(Errc::BadConfig, "detector vocabulary or pagination is invalid");
  return c;
}

}  // namespace fusion::service

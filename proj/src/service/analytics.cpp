#include "fusion/service/analytics.hpp"

#include <cmath>

#include "fusion/domain/features.hpp"
#include "fusion/error.hpp"

namespace fusion::service {

using nlohmann::json;

std::vector<domain::EntityRecord> graph_records(const graph::GraphSnapshot& snap) {
  std::vector<domain::EntityRecord> out;
  out.reserve(snap.nodes().size());
  for (const auto& [id, node] : snap.nodes()) out.push_back(domain::validate_record(node.properties));
  return out;
}

CorrelationRun run_correlation(const std::vector<domain::EntityRecord>& records, const AppConfig& cfg) {
  CorrelationRun run;
  std::vector<domain::AbstractedEntity> abstracted;
  for (const auto& r : records) {
    auto a = domain::abstract_entity(r, cfg.taxonomy);
    abstracted.push_back(a);
    run.inputs.push_back({r, std::move(a)});
  }
  run.edges = correlate::build_correlations(run.inputs, cfg.criteria, cfg.correlation_threshold);
  const auto schema = domain::EncodingSchema::from_taxonomy("entity-v1", cfg.taxonomy, cfg.year_min, cfg.year_max);
  run.clustering = correlate::cluster_entities(abstracted, cfg.dbscan, schema);
  return run;
}

evaluate::Evidence evidence_of(const domain::EntityRecord& r, const evaluate::BayesNet& net, std::string_view prefix) {
  evaluate::Evidence ev;
  for (const auto& [k, v] : r.attributes) {
    if (!k.starts_with(prefix)) continue;
    const std::string node = k.substr(prefix.size());
    const auto idx = net.index_of(node);
    if (!idx) throw Error(Errc::InvalidEvidence, "unknown network node '" + node + "'", {node});
    if (!net.state_index(*idx, v)) throw Error(Errc::InvalidEvidence, "unknown state '" + v + "' of '" + node + "'", {node});
    ev[node] = v;
  }
  return ev;
}

EvaluationRun run_evaluation(const std::vector<domain::EntityRecord>& records, const evaluate::BayesNet& net,
                             const AppConfig& cfg) {
  EvaluationRun run;
  for (const auto& r : records) {
    if (r.kind != domain::EntityKind::event) continue;
    try {
      auto ev = evidence_of(r, net, cfg.evidence_prefix);
      if (ev.empty()) continue;
      run.events.push_back(evaluate::observe_event(net, r.id, std::move(ev), cfg.situation));
    } catch (const Error& e) {
      run.skipped.push_back({r.id, std::string(to_string(e.code()))});
    }
  }
  return run;
}

ChainRun run_chain(const std::vector<chain::ChainTx>& raw, const AppConfig& cfg) {
  ChainRun run;
  run.txs = chain::preprocess(raw);
  run.profiles = chain::build_profiles(run.txs);
  run.flags = chain::flag_transactions(run.txs, cfg.watchlist, cfg.flag_rules);
  std::vector<chain::AddressProfile> btc, eth;
  for (const auto& p : run.profiles) (p.chain == chain::Chain::btc ? btc : eth).push_back(p);
  run.links = chain::link_cross_chain(btc, eth, cfg.price_catalog, cfg.crosschain);
  return run;
}

ChainRun run_chain_file(const AppConfig& cfg) {
  if (cfg.ledger_path.empty()) return {};
  auto read = chain::read_ledger_file(cfg.ledger_path);
  auto run = run_chain(read.txs, cfg);
  run.rejected = std::move(read.rejected);
  return run;
}

IncidentRun run_incidents(const std::vector<incidents::NewsArticle>& articles, const incidents::TrackerConfig& tracker,
                          double risk_threshold) {
  IncidentRun run;
  run.eligibility = incidents::filter_eligible(articles, tracker.criteria);
  for (const auto& a : run.eligibility.eligible) {
    try {
      run.records.push_back(incidents::extract_incident(a, tracker));
      run.ids.push_back("inc-" + std::to_string(run.ids.size() + 1));
    } catch (const Error& e) {
      run.extraction_errors.push_back(a.url + ": " + e.what());
    }
  }
  run.risk = incidents::compute_risk_indicators(run.records, risk_threshold);
  return run;
}

std::vector<graph::IngestMessage> incident_messages(const IncidentRun& run) {
  std::vector<graph::IngestMessage> out;
  for (std::size_t i = 0; i < run.records.size(); ++i)
    out.push_back({std::string(graph::topics::news), run.ids[i], incidents::incident_payload(run.records[i], run.ids[i]), 1});
  return out;
}

json record_to_json(const domain::EntityRecord& r) {
  json j = json::object();
  for (const auto& [k, v] : domain::to_raw(r)) j[k] = v;
  return j;
}

json edge_to_json(const correlate::CorrelationEdge& e) {
  json matched = json::array();
  for (const auto a : e.matched) matched.push_back(to_string(a));
  return {{"a", e.a}, {"b", e.b}, {"score", e.score}, {"matched", matched}};
}

json clusters_to_json(const correlate::EntityClustering& c) {
  json clusters = json::array();
  for (const auto& s : c.summaries) {
    json members = json::array();
    for (std::size_t i = 0; i < c.entity_ids.size(); ++i)
      if (c.assignment.labels[i] == s.label) members.push_back(c.entity_ids[i]);
    clusters.push_back({{"label", s.label},
                        {"size", s.size},
                        {"dominant_continent", domain::to_string(s.dominant_continent)},
                        {"dominant_firearm_class", s.dominant_firearm_class},
                        {"quarter_histogram", s.quarter_histogram},
                        {"members", members}});
  }
  json noise = json::array();
  for (std::size_t i = 0; i < c.entity_ids.size(); ++i)
    if (c.assignment.labels[i] == correlate::ClusterAssignment::kNoise) noise.push_back(c.entity_ids[i]);
  return {{"clusters", clusters}, {"noise", noise}};
}

json observation_to_json(const evaluate::EventObservation& o, const evaluate::BayesNet& net,
                         const evaluate::SituationConfig& cfg) {
  json posterior = json::object();
  const auto cause = net.require(cfg.cause_node);
  for (std::size_t s = 0; s < o.cause_posterior.size(); ++s) posterior[net.states(cause)[s]] = o.cause_posterior[s];
  return {{"id", o.id}, {"evidence", o.evidence}, {"priority", o.priority}, {"cause_posterior", posterior}};
}

json flag_to_json(const chain::TxFlag& f) {
  return {{"chain", chain::to_string(f.chain)}, {"txid", f.txid}, {"rule", f.rule}, {"evidence", f.evidence}};
}

json link_to_json(const chain::CrossChainLink& l) {
  json j{{"btc_address", l.btc_address},
         {"eth_address", l.eth_address},
         {"delta_t", l.delta_t},
         {"usd_gap", l.usd_gap},
         {"score", l.score}};
  j["matched_price"] = l.matched_price ? json(*l.matched_price) : json(nullptr);
  return j;
}

json risk_to_json(const incidents::RiskReport& r, bool flagged_only) {
  std::vector<bool> flagged(r.indicators.size(), false);
  for (const auto& f : r.flags) flagged[f.indicator] = true;
  json out = json::array();
  for (std::size_t i = 0; i < r.indicators.size(); ++i) {
    if (flagged_only && !flagged[i]) continue;
    auto j = json::parse(incidents::indicator_to_json(r.indicators[i]));
    j["red_flag"] = flagged[i];
    out.push_back(std::move(j));
  }
  return out;
}

}  // namespace fusion::service

#pragma once

#include <json.hpp>
#include <string>
#include <string_view>
#include <vector>

#include "fusion/chain/crosschain.hpp"
#include "fusion/chain/flags.hpp"
#include "fusion/chain/ledger.hpp"
#include "fusion/correlate/clustering.hpp"
#include "fusion/correlate/scoring.hpp"
#include "fusion/evaluate/network.hpp"
#include "fusion/evaluate/situation.hpp"
#include "fusion/graph/ingest.hpp"
#include "fusion/graph/store.hpp"
#include "fusion/incidents/article.hpp"
#include "fusion/incidents/risk.hpp"
#include "fusion/incidents/tracker.hpp"
#include "fusion/service/config.hpp"

namespace fusion::service {

/// Every node of the snapshot as an entity record, in id order.
std::vector<domain::EntityRecord> graph_records(const graph::GraphSnapshot& snap);

struct CorrelationRun {
  std::vector<correlate::CorrelationInput> inputs;  // id order
  std::vector<correlate::CorrelationEdge> edges;
  correlate::EntityClustering clustering;
};

CorrelationRun run_correlation(const std::vector<domain::EntityRecord>& records, const AppConfig& cfg);

/// Attributes named "<prefix><node>" become evidence on that network node.
/// Throws InvalidEvidence for unknown nodes or states.
evaluate::Evidence evidence_of(const domain::EntityRecord& r, const evaluate::BayesNet& net, std::string_view prefix);

struct SkippedEvent {
  std::string id;
  std::string reason;
};

struct EvaluationRun {
  std::vector<evaluate::EventObservation> events;  // id order; events with evidence only
  std::vector<SkippedEvent> skipped;
};

EvaluationRun run_evaluation(const std::vector<domain::EntityRecord>& records, const evaluate::BayesNet& net,
                             const AppConfig& cfg);

struct ChainRun {
  std::vector<chain::ChainTx> txs;
  std::vector<chain::RejectedRow> rejected;
  std::vector<chain::AddressProfile> profiles;
  std::vector<chain::TxFlag> flags;
  std::vector<chain::CrossChainLink> links;
};

ChainRun run_chain(const std::vector<chain::ChainTx>& raw, const AppConfig& cfg);
ChainRun run_chain_file(const AppConfig& cfg);

struct IncidentRun {
  incidents::Eligibility eligibility;
  std::vector<std::string> ids;  // parallel to records
  std::vector<incidents::IncidentRecord> records;
  std::vector<std::string> extraction_errors;
  incidents::RiskReport risk;
};

/// Ids are "inc-<n>" in eligible-article order.
IncidentRun run_incidents(const std::vector<incidents::NewsArticle>& articles, const incidents::TrackerConfig& tracker,
                          double risk_threshold);
/// The incidents as news-topic ingestion messages, offset 1 each.
std::vector<graph::IngestMessage> incident_messages(const IncidentRun& run);

nlohmann::json record_to_json(const domain::EntityRecord& r);
nlohmann::json edge_to_json(const correlate::CorrelationEdge& e);
nlohmann::json clusters_to_json(const correlate::EntityClustering& c);
nlohmann::json observation_to_json(const evaluate::EventObservation& o, const evaluate::BayesNet& net,
                                   const evaluate::SituationConfig& cfg);
nlohmann::json flag_to_json(const chain::TxFlag& f);
nlohmann::json link_to_json(const chain::CrossChainLink& l);
nlohmann::json risk_to_json(const incidents::RiskReport& r, bool flagged_only);

}  // namespace fusion::service

#pragma once

#include <atomic>
#include <json.hpp>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "fusion/error.hpp"
#include "fusion/evaluate/network.hpp"
#include "fusion/gateway/gateway.hpp"
#include "fusion/graph/ingest.hpp"
#include "fusion/graph/store.hpp"
#include "fusion/service/analytics.hpp"
#include "fusion/service/auth.hpp"
#include "fusion/service/cases.hpp"
#include "fusion/service/config.hpp"
#include "fusion/service/query.hpp"
#include "fusion/service/reports.hpp"

namespace fusion::service {

struct Request {
  std::string method;
  std::string path;
  Params query;
  std::map<std::string, std::string> headers;  // lower-case names
  std::string body;
};

struct Response {
  int status = 200;
  nlohmann::json body;
};

int http_status(Errc code) noexcept;
Response error_response(const Error& e);

/// Analysis over one immutable graph snapshot.
struct Analysis {
  std::uint64_t version = 0;
  std::vector<domain::EntityRecord> records;  // id order
  CorrelationRun correlation;
  EvaluationRun evaluation;
};

/// Transport-independent request handler. Every endpoint except /health and
/// /auth/login requires "Authorization: Bearer <token>"; the token is checked
/// before any state changes. Mutating requests carrying "Idempotency-Key"
/// replay the first response for the same user, route and key.
class Service {
 public:
  explicit Service(AppConfig config, Clock clock = system_clock());

  Response handle(const Request& req);

  graph::IngestStats ingest(std::span<const graph::IngestMessage> messages);
  std::shared_ptr<const Analysis> analysis();
  std::shared_ptr<const graph::GraphSnapshot> snapshot() const { return graph_->snapshot(); }
  const IncidentRun& incidents() const { return incidents_; }
  const ChainRun& chain() const { return chain_; }
  gateway::Gateway& gateway() { return *gateway_; }
  const AppConfig& config() const { return config_; }
  const evaluate::BayesNet& network() const { return net_; }
  /// Number of state-changing operations performed; lets tests prove that
  /// rejected requests had no side effect.
  std::uint64_t mutations() const { return mutations_.load(); }

 private:
  Response dispatch(const Request& req, const SessionToken& session, const std::vector<std::string>& parts);
  Response auth_routes(const Request& req, const std::vector<std::string>& parts);
  Response reports_routes(const Request& req, const SessionToken& s, const std::vector<std::string>& parts);
  Response ingest_routes(const Request& req, const SessionToken& s, const std::vector<std::string>& parts);
  Response entity_routes(const Request& req, const std::vector<std::string>& parts);
  Response correlation_routes(const Request& req);
  Response cluster_routes(const Request& req);
  Response evaluate_routes(const Request& req, const std::vector<std::string>& parts);
  Response incident_routes(const Request& req);
  Response risk_routes(const Request& req);
  Response federated_routes(const Request& req, const SessionToken& s, const std::vector<std::string>& parts);
  Response case_routes(const Request& req, const SessionToken& s, const std::vector<std::string>& parts);

  std::optional<nlohmann::json> resolve_record(const PinnedRecord& ref, const std::string& role);
  std::vector<std::string> emit_detector_events(const std::vector<domain::RawRecord>& events);
  ListQuery list_query(const Request& req, const std::set<std::string>& accepted = {}) const;

  AppConfig config_;
  Clock clock_;
  std::unique_ptr<Authenticator> auth_;
  evaluate::BayesNet net_;
  std::unique_ptr<graph::GraphStore> graph_;
  std::unique_ptr<graph::Ingestor> ingestor_;
  IncidentRun incidents_;
  std::vector<domain::EntityRecord> incident_records_;  // parallel to incidents_.records
  ChainRun chain_;
  std::unique_ptr<gateway::Gateway> gateway_;
  ReportStore reports_;
  std::unique_ptr<CaseStore> cases_;

  std::mutex analysis_mutex_;
  std::shared_ptr<const Analysis> analysis_;

  std::mutex detector_mutex_;
  std::int64_t detector_offset_ = 0;

  struct Replay {
    std::string body;
    Response response;
  };
  std::mutex idempotency_mutex_;
  std::map<std::string, Replay> idempotency_;
  std::map<std::string, std::shared_ptr<std::mutex>> in_flight_;  // one per idempotency key

  std::atomic<std::uint64_t> mutations_{0};
};

/// Parses "a=1&b=x%20y" into a map (later keys win).
Params parse_query_string(const std::string& qs);

}  // namespace fusion::service

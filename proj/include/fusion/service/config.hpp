#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fusion/chain/crosschain.hpp"
#include "fusion/chain/flags.hpp"
#include "fusion/correlate/dbscan.hpp"
#include "fusion/correlate/scoring.hpp"
#include "fusion/domain/abstraction.hpp"
#include "fusion/evaluate/situation.hpp"
#include "fusion/gateway/gateway.hpp"
#include "fusion/graph/cleanse.hpp"

namespace fusion::service {

/// Everything the service and CLI read from one JSON file. Relative paths
/// are resolved against the config file's directory.
struct AppConfig {
  std::string users_path;
  std::int64_t token_ttl_seconds = 8 * 3600;
  int lockout_after = 5;
  std::int64_t lockout_seconds = 15 * 60;

  std::vector<std::string> parcel_classes;  // closed 10-entry vocabulary
  std::vector<std::string> firearm_id_types;
  std::size_t max_firearm_candidates = 5;

  domain::FirearmTaxonomy taxonomy;
  graph::CleanseConfig cleanse;
  std::string graph_state_path;  // empty: in-memory only
  std::vector<std::string> ingest_files;

  std::vector<correlate::CorrelationCriterion> criteria;
  double correlation_threshold = 0.5;
  correlate::DbscanParams dbscan;
  int year_min = 2000;
  int year_max = 2030;

  std::string network_path;
  evaluate::SituationConfig situation;
  std::string evidence_prefix = "mo.";

  std::string tracker_path;
  std::string articles_path;
  double risk_threshold = 2.0;

  std::string ledger_path;
  std::set<std::string> watchlist;
  chain::FlagRules flag_rules;
  chain::CrossChainConfig crosschain;
  std::vector<double> price_catalog;

  std::vector<std::string> store_paths;
  std::string policy_path;
  gateway::GatewayConfig gateway;

  std::size_t default_page_size = 50;
  std::size_t max_page_size = 500;
};

/// Throws Error(BadConfig) naming the offending key.
AppConfig load_config(const std::string& path);

}  // namespace fusion::service

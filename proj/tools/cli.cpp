#include "cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "fusion/error.hpp"
#include "fusion/graph/ingest.hpp"
#include "fusion/graph/store.hpp"
#include "fusion/service/analytics.hpp"
#include "fusion/service/config.hpp"
#include "fusion/service/http.hpp"
#include "fusion/service/service.hpp"

namespace fusion::cli {

namespace {

using nlohmann::json;

graph::GraphSnapshot read_snapshot(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::StorageUnavailable, "cannot open snapshot '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return graph::GraphSnapshot::load_state(buf.str());
}

std::string snapshot_path(const std::string& given, const service::AppConfig& cfg) {
  if (!given.empty()) return given;
  if (cfg.graph_state_path.empty())
    throw Error(Errc::BadConfig, "no --snapshot given and the config has no graph state path");
  return cfg.graph_state_path;
}

// Writes to --out when given, otherwise to the command's stdout.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : out_(&fallback) {
    if (path.empty()) return;
    file_.open(path, std::ios::binary);
    if (!file_) throw Error(Errc::StorageUnavailable, "cannot write '" + path + "'");
    out_ = &file_;
  }
  void record(const json& j) { *out_ << j.dump() << '\n'; }
  std::ostream& stream() { return *out_; }

 private:
  std::ofstream file_;
  std::ostream* out_;
};

json typed(const char* kind, json j) {
  j["record"] = kind;
  return j;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Firearm-trafficking intelligence fusion toolkit", "fusion"};
  app.require_subcommand(1);

  std::string config_path;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string state;
  std::string export_path;
  std::vector<std::string> files;
  std::string snapshot;
  std::string out_path;
  std::string evidence;
  std::string ledger;
  bool flagged_only = false;

  auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
  serve->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  serve->add_option("--port", port, "TCP port")->check(CLI::Range(1, 65535));
  serve->add_option("--host", host, "Bind address");

  auto* ingest = app.add_subcommand("ingest", "Ingest newline-delimited record files into the persisted graph");
  ingest->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  ingest->add_option("--state", state, "Graph state file (defaults to the config's graph.state)");
  ingest->add_option("--export", export_path, "Also write the graph export here");
  ingest->add_option("files", files, "Record files; the topic defaults to the file stem")
      ->required()
      ->check(CLI::ExistingFile);

  auto* correlate = app.add_subcommand("correlate", "Correlation edges and clusters of a snapshot export");
  correlate->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  correlate->add_option("--snapshot", snapshot, "Graph export or state file (defaults to graph.state)");
  correlate->add_option("--out", out_path, "Output file (default stdout)");

  auto* evaluate = app.add_subcommand("evaluate", "Situation priorities of the events in a snapshot");
  evaluate->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--snapshot", snapshot, "Graph export or state file (defaults to graph.state)");
  evaluate->add_option("--evidence", evidence, "Evaluate one JSON evidence object instead of a snapshot");
  evaluate->add_option("--out", out_path, "Output file (default stdout)");

  auto* chain = app.add_subcommand("chain", "Transaction flags and cross-chain links");
  chain->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  chain->add_option("--ledger", ledger, "Transaction file (defaults to chain.ledger)")->check(CLI::ExistingFile);
  chain->add_option("--out", out_path, "Output file (default stdout)");

  auto* incidents = app.add_subcommand("incidents", "Tracked incidents and country-type risk indicators");
  incidents->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  incidents->add_flag("--flagged", flagged_only, "Only red-flagged indicators");
  incidents->add_option("--out", out_path, "Output file (default stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    auto cfg = service::load_config(config_path);

    if (serve->parsed()) {
      service::Service svc(cfg);
      service::HttpServer server(svc);
      const int bound = server.bind(host, port);
      if (bound < 0) {
        err << "cannot bind " << host << ":" << port << "\n";
        return 1;
      }
      err << "listening on " << host << ":" << bound << "\n";
      return server.run() ? 0 : 1;
    }

    if (ingest->parsed()) {
      const std::string path = state.empty() ? cfg.graph_state_path : state;
      if (path.empty()) throw Error(Errc::BadConfig, "no --state given and the config has no graph state path");
      graph::GraphStore store{std::filesystem::path(path)};
      graph::Ingestor ingestor(store, cfg.cleanse);
      graph::IngestStats total;
      for (const auto& f : files) {
        const auto messages = graph::read_ndjson_file(f);
        const auto s = ingestor.ingest(messages);
        total += s;
        out << json{{"file", f}, {"consumed", s.consumed}, {"upserted", s.upserted}, {"rejected", s.rejected},
                    {"skipped", s.skipped}}
                   .dump()
            << '\n';
      }
      for (const auto& q : ingestor.quarantine())
        err << "quarantined " << q.topic << "/" << q.key << "@" << q.offset << ": " << q.reason << "\n";
      if (!export_path.empty()) {
        std::ofstream ex(export_path, std::ios::binary);
        ex << store.snapshot()->export_ndjson();
        if (!ex) throw Error(Errc::StorageUnavailable, "cannot write '" + export_path + "'");
      }
      err << "graph version " << store.snapshot()->version() << ", " << store.snapshot()->nodes().size()
          << " nodes, " << total.rejected << " rejected\n";
      return 0;
    }

    Sink sink(out_path, out);

    if (correlate->parsed()) {
      const auto snap = read_snapshot(snapshot_path(snapshot, cfg));
      const auto run = service::run_correlation(service::graph_records(snap), cfg);
      for (const auto& e : run.edges) sink.record(typed("edge", service::edge_to_json(e)));
      const json clusters = service::clusters_to_json(run.clustering);
      for (const auto& c : clusters.at("clusters")) sink.record(typed("cluster", c));
      sink.record({{"record", "noise"}, {"members", clusters.at("noise")}});
      return 0;
    }

    if (evaluate->parsed()) {
      const auto net = evaluate::BayesNet::from_spec(evaluate::parse_network_file(cfg.network_path));
      if (!evidence.empty()) {
        evaluate::Evidence ev;
        const json given = json::parse(evidence);
        if (!given.is_object()) throw Error(Errc::InvalidEvidence, "--evidence must be a JSON object");
        for (const auto& [k, v] : given.items()) {
          if (!v.is_string()) throw Error(Errc::InvalidEvidence, "evidence states must be strings", {k});
          ev[k] = v.get<std::string>();
        }
        auto j = service::observation_to_json(evaluate::observe_event(net, "query", ev, cfg.situation), net,
                                              cfg.situation);
        sink.record(typed("priority", j));
        return 0;
      }
      const auto snap = read_snapshot(snapshot_path(snapshot, cfg));
      const auto run = service::run_evaluation(service::graph_records(snap), net, cfg);
      for (const auto& o : run.events) sink.record(typed("priority", service::observation_to_json(o, net, cfg.situation)));
      for (const auto& s : run.skipped) sink.record({{"record", "skipped"}, {"id", s.id}, {"reason", s.reason}});
      return 0;
    }

    if (chain->parsed()) {
      if (!ledger.empty()) cfg.ledger_path = ledger;
      const auto run = service::run_chain_file(cfg);
      for (const auto& f : run.flags) sink.record(typed("flag", service::flag_to_json(f)));
      for (const auto& l : run.links) sink.record(typed("link", service::link_to_json(l)));
      for (const auto& r : run.rejected)
        sink.record({{"record", "rejected"}, {"line", r.line}, {"reason", r.reason}});
      return 0;
    }

    if (incidents->parsed()) {
      const auto tracker = incidents::load_tracker_config(cfg.tracker_path);
      const auto run = service::run_incidents(incidents::read_articles_file(cfg.articles_path), tracker,
                                              cfg.risk_threshold);
      for (std::size_t i = 0; i < run.records.size(); ++i) {
        auto j = json::parse(incidents::incident_to_json(run.records[i]));
        j["id"] = run.ids[i];
        sink.record(typed("incident", j));
      }
      for (const auto& r : service::risk_to_json(run.risk, flagged_only)) sink.record(typed("indicator", r));
      return 0;
    }
  } catch (const Error& e) {
    err << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace fusion::cli

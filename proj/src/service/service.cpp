#include "fusion/service/service.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>

#include "fusion/text.hpp"

namespace fusion::service {

using nlohmann::json;

int http_status(Errc code) noexcept {
  switch (code) {
    case Errc::BadCredentials:
    case Errc::Unauthorized: return 401;
    case Errc::NotOwner:
    case Errc::PolicyDenied:
    case Errc::NoAccessibleStores: return 403;
    case Errc::UnknownReport:
    case Errc::UnknownCase:
    case Errc::UnknownRecord:
    case Errc::UnknownStore:
    case Errc::UnknownNode:
    case Errc::NotFound: return 404;
    case Errc::InvalidTransition:
    case Errc::IdempotencyConflict: return 409;
    case Errc::UnknownClass:
    case Errc::MalformedBox:
    case Errc::SchemaViolation:
    case Errc::InvalidEvidence:
    case Errc::InconsistentEvidence:
    case Errc::EvidenceOnQueryNode:
    case Errc::MissingField:
    case Errc::BadDate:
    case Errc::BadCountry: return 422;
    case Errc::BadFilter:
    case Errc::ParseError: return 400;
    case Errc::Locked: return 423;
    case Errc::DestinationUnreachable:
    case Errc::StoreUnavailable: return 502;
    default: return 500;
  }
}

Response error_response(const Error& e) {
  std::string message = e.what();
  const std::string prefix = std::string(to_string(e.code())) + ": ";
  if (message.starts_with(prefix)) message = message.substr(prefix.size());
  return {http_status(e.code()), {{"error", to_string(e.code())}, {"message", message}, {"details", e.details()}}};
}

Params parse_query_string(const std::string& qs) {
  auto decode = [](std::string_view s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '+') {
        out += ' ';
      } else if (s[i] == '%' && i + 2 < s.size() && std::isxdigit(static_cast<unsigned char>(s[i + 1])) &&
                 std::isxdigit(static_cast<unsigned char>(s[i + 2]))) {
        out += static_cast<char>(std::stoi(std::string(s.substr(i + 1, 2)), nullptr, 16));
        i += 2;
      } else {
        out += s[i];
      }
    }
    return out;
  };
  Params out;
  for (const auto& part : text::split(qs, '&')) {
    if (part.empty()) continue;
    const auto eq = part.find('=');
    if (eq == std::string::npos)
      out[decode(part)] = "";
    else
      out[decode(std::string_view(part).substr(0, eq))] = decode(std::string_view(part).substr(eq + 1));
  }
  return out;
}

namespace {

evaluate::BayesNet load_network(const AppConfig& cfg) {
  return evaluate::BayesNet::from_spec(evaluate::parse_network_file(cfg.network_path));
}

[[noreturn]] void not_found(const Request& req) {
  throw Error(Errc::NotFound, "no route for " + req.method + " " + req.path, {req.path});
}

json parse_body(const Request& req) {
  if (req.body.empty()) return json::object();
  try {
    return json::parse(req.body);
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, std::string("request body is not JSON: ") + e.what());
  }
}

std::string body_string(const json& body, const char* key) {
  if (!body.contains(key) || !body.at(key).is_string() || body.at(key).get<std::string>().empty())
    throw Error(Errc::SchemaViolation, std::string("field '") + key + "' must be a non-empty string", {key});
  return body.at(key).get<std::string>();
}

template <typename T>
json page_json(const Page<T>& page, std::size_t total) {
  json items = json::array();
  for (const auto& i : page.items) items.push_back(i);
  return {{"items", items}, {"next_cursor", page.next_cursor}, {"total", total}};
}

std::optional<std::int64_t> day_bound(const Params& p, const char* key, bool end_of_day) {
  const auto it = p.find(key);
  if (it == p.end()) return std::nullopt;
  const auto d = Date::parse_iso(it->second);
  if (!d) throw Error(Errc::BadFilter, std::string("filter '") + key + "' must be YYYY-MM-DD", {key});
  return d->days_since_epoch() * 86400 + (end_of_day ? 86399 : 0);
}

bool parse_bool_param(const Params& p, const char* key) {
  const auto it = p.find(key);
  if (it == p.end()) return false;
  if (it->second == "true" || it->second == "1") return true;
  if (it->second == "false" || it->second == "0") return false;
  throw Error(Errc::BadFilter, std::string("filter '") + key + "' must be true or false", {key});
}

std::vector<gateway::Filter> parse_filters(const json& body) {
  std::vector<gateway::Filter> out;
  if (!body.contains("filters")) return out;
  if (!body.at("filters").is_array()) throw Error(Errc::BadFilter, "filters must be a list", {"filters"});
  for (const auto& f : body.at("filters")) {
    if (!f.is_object() || !f.contains("field") || !f.at("field").is_string())
      throw Error(Errc::BadFilter, "each filter needs a field", {"filters"});
    const auto op = gateway::parse_op(f.value("op", std::string("eq")));
    if (!op) throw Error(Errc::BadFilter, "unknown filter operator", {f.value("op", std::string())});
    out.push_back({f.at("field").get<std::string>(), *op, f.value("value", std::string()), f.value("upper", std::string())});
  }
  return out;
}

json federated_json(const gateway::FederatedResult& r) {
  json rows = json::array();
  for (const auto& row : r.rows) rows.push_back({{"fields", row.fields}, {"provenance", row.provenance}});
  json status = json::object();
  for (const auto& [id, s] : r.status) status[id] = gateway::to_string(s);
  return {{"rows", rows}, {"status", status}, {"dedup", r.dedup}};
}

}  // namespace

Service::Service(AppConfig config, Clock clock)
    : config_(std::move(config)),
      clock_(std::move(clock)),
      net_(load_network(config_)),
      reports_(clock_) {
  auth_ = std::make_unique<Authenticator>(load_users(config_.users_path), config_.token_ttl_seconds,
                                          config_.lockout_after, config_.lockout_seconds, clock_);
  graph_ = config_.graph_state_path.empty() ? std::make_unique<graph::GraphStore>()
                                            : std::make_unique<graph::GraphStore>(config_.graph_state_path);
  ingestor_ = std::make_unique<graph::Ingestor>(*graph_, config_.cleanse);

  for (const auto& f : config_.ingest_files) {
    const auto messages = graph::read_ndjson_file(f);
    ingestor_->ingest(messages);
  }
  if (!config_.articles_path.empty()) {
    const auto tracker = incidents::load_tracker_config(config_.tracker_path);
    incidents_ = run_incidents(incidents::read_articles_file(config_.articles_path), tracker, config_.risk_threshold);
    for (std::size_t i = 0; i < incidents_.records.size(); ++i)
      incident_records_.push_back(
          domain::validate_record(incidents::incident_payload(incidents_.records[i], incidents_.ids[i])));
    const auto messages = incident_messages(incidents_);
    ingestor_->ingest(messages);
  }
  chain_ = run_chain_file(config_);

  for (const auto& [slot, offset] : graph_->snapshot()->offsets())
    if (slot.topic == graph::topics::detector_reports) detector_offset_ = std::max(detector_offset_, offset);

  gateway_ = std::make_unique<gateway::Gateway>(gateway::load_policy(config_.policy_path), config_.gateway);
  for (const auto& path : config_.store_paths) {
    const auto fx = gateway::load_store_fixture(path);
    gateway_->register_store(fx.descriptor, gateway::TableAdapter::from_csv(fx.table_path));
  }
  cases_ = std::make_unique<CaseStore>(
      [this](const PinnedRecord& ref, const std::string& role) { return resolve_record(ref, role); }, clock_);
}

graph::IngestStats Service::ingest(std::span<const graph::IngestMessage> messages) {
  auto stats = ingestor_->ingest(messages);
  if (stats.upserted) ++mutations_;
  return stats;
}

std::shared_ptr<const Analysis> Service::analysis() {
  const auto snap = graph_->snapshot();
  std::lock_guard lock(analysis_mutex_);
  if (analysis_ && analysis_->version == snap->version()) return analysis_;
  auto a = std::make_shared<Analysis>();
  a->version = snap->version();
  a->records = graph_records(*snap);
  a->correlation = run_correlation(a->records, config_);
  a->evaluation = run_evaluation(a->records, net_, config_);
  analysis_ = a;
  return a;
}

std::optional<json> Service::resolve_record(const PinnedRecord& ref, const std::string& role) {
  if (ref.source == "graph") {
    const auto snap = graph_->snapshot();
    const auto* node = snap->node(ref.record_id);
    if (!node) return std::nullopt;
    return json(node->properties);
  }
  if (ref.source == "incident") {
    for (std::size_t i = 0; i < incidents_.ids.size(); ++i)
      if (incidents_.ids[i] == ref.record_id) return record_to_json(incident_records_[i]);
    return std::nullopt;
  }
  try {
    const auto r = gateway_->execute({{{"id", gateway::Op::eq, ref.record_id, ""}}, {}, {ref.source}}, role);
    if (r.rows.empty()) return std::nullopt;
    return json(r.rows.front().fields);
  } catch (const Error&) {
    return std::nullopt;
  }
}

std::vector<std::string> Service::emit_detector_events(const std::vector<domain::RawRecord>& events) {
  std::vector<graph::IngestMessage> messages;
  {
    std::lock_guard lock(detector_mutex_);
    for (const auto& e : events)
      messages.push_back({std::string(graph::topics::detector_reports), e.at("id"), e, ++detector_offset_});
  }
  const auto stats = ingestor_->ingest(messages);
  if (stats.rejected) throw Error(Errc::SchemaViolation, "detector events were rejected by ingestion");
  std::vector<std::string> ids;
  for (const auto& e : events) ids.push_back(e.at("id"));
  return ids;
}

ListQuery Service::list_query(const Request& req, const std::set<std::string>& accepted) const {
  return parse_list_query(req.query, accepted, config_.default_page_size, config_.max_page_size, config_.taxonomy);
}

Response Service::handle(const Request& req) {
  try {
    std::vector<std::string> parts;
    for (const auto& p : text::split(req.path, '/'))
      if (!p.empty()) parts.push_back(p);
    if (parts.empty()) not_found(req);
    if (parts[0] == "health") return {200, {{"status", "ok"}, {"graph_version", graph_->snapshot()->version()}}};
    if (parts[0] == "auth" && parts.size() == 2 && parts[1] == "login") return auth_routes(req, parts);

    const auto auth = req.headers.find("authorization");
    if (auth == req.headers.end() || !auth->second.starts_with("Bearer "))
      throw Error(Errc::Unauthorized, "missing bearer token");
    const SessionToken session = auth_->validate(auth->second.substr(7));

    const auto key = req.headers.find("idempotency-key");
    if (req.method == "GET" || key == req.headers.end() || key->second.empty())
      return dispatch(req, session, parts);

    const std::string slot = session.user + '\n' + req.method + ' ' + req.path + '\n' + key->second;
    std::shared_ptr<std::mutex> gate;
    {
      std::lock_guard lock(idempotency_mutex_);
      auto& g = in_flight_[slot];
      if (!g) g = std::make_shared<std::mutex>();
      gate = g;
    }
    std::lock_guard hold(*gate);
    {
      std::lock_guard lock(idempotency_mutex_);
      if (const auto it = idempotency_.find(slot); it != idempotency_.end()) {
        if (it->second.body != req.body)
          throw Error(Errc::IdempotencyConflict, "idempotency key reused with a different body", {key->second});
        return it->second.response;
      }
    }
    Response r = dispatch(req, session, parts);
    if (r.status < 300) {
      std::lock_guard lock(idempotency_mutex_);
      idempotency_[slot] = {req.body, r};
    }
    return r;
  } catch (const Error& e) {
    return error_response(e);
  } catch (const std::exception& e) {
    return {500, {{"error", "Internal"}, {"message", e.what()}, {"details", json::array()}}};
  }
}

Response Service::dispatch(const Request& req, const SessionToken& s, const std::vector<std::string>& parts) {
  const std::string& head = parts[0];
  if (head == "auth") return auth_routes(req, parts);
  if (head == "reports") return reports_routes(req, s, parts);
  if (head == "ingest") return ingest_routes(req, s, parts);
  if (head == "entities") return entity_routes(req, parts);
  if (head == "correlations" && parts.size() == 1 && req.method == "GET") return correlation_routes(req);
  if (head == "clusters" && parts.size() == 1 && req.method == "GET") return cluster_routes(req);
  if (head == "evaluate") return evaluate_routes(req, parts);
  if (head == "incidents" && parts.size() == 1 && req.method == "GET") return incident_routes(req);
  if (head == "risk" && parts.size() == 1 && req.method == "GET") return risk_routes(req);
  if (head == "federated") return federated_routes(req, s, parts);
  if (head == "cases") return case_routes(req, s, parts);
  not_found(req);
}

Response Service::auth_routes(const Request& req, const std::vector<std::string>& parts) {
  if (parts.size() != 2) not_found(req);
  if (parts[1] == "login" && req.method == "POST") {
    const json body = parse_body(req);
    const auto t = auth_->authenticate(body_string(body, "username"), body_string(body, "secret"));
    return {200, {{"token", t.token}, {"user", t.user}, {"role", t.role}, {"expires_at", t.expires_at}}};
  }
  const auto auth = req.headers.at("authorization").substr(7);
  if (parts[1] == "session" && req.method == "GET") {
    const auto t = auth_->validate(auth);
    return {200,
            {{"user", t.user},
             {"role", t.role},
             {"expires_at", t.expires_at},
             {"services", {"reports", "ingest", "entities", "correlations", "clusters", "evaluate", "incidents", "risk",
                           "federated", "cases"}}}};
  }
  if (parts[1] == "logout" && req.method == "POST") {
    auth_->revoke(auth);
    return {200, {{"revoked", true}}};
  }
  not_found(req);
}

Response Service::reports_routes(const Request& req, const SessionToken& s, const std::vector<std::string>& parts) {
  if (parts.size() == 1 && req.method == "GET") {
    for (const auto& [k, v] : req.query)
      if (k != "date_from" && k != "date_to" && k != "service" && k != "title")
        throw Error(Errc::BadFilter, "filter '" + k + "' is not supported here", {k});
    ReportFilter f;
    f.created_from = day_bound(req.query, "date_from", false);
    f.created_to = day_bound(req.query, "date_to", true);
    if (req.query.count("service")) f.service = req.query.at("service");
    if (req.query.count("title")) f.title_contains = req.query.at("title");
    json items = json::array();
    for (const auto& r : reports_.list(s.user, f)) {
      auto j = report_to_json(r);
      j["read_only"] = r.owner != s.user;
      items.push_back(std::move(j));
    }
    return {200, {{"items", items}, {"total", items.size()}}};
  }
  if (parts.size() == 1 && req.method == "POST") {
    const json body = parse_body(req);
    const auto r = reports_.create(s.user, body_string(body, "service"), body_string(body, "title"),
                                   body.value("payload", json::object()));
    ++mutations_;
    return {201, report_to_json(r)};
  }
  if (parts.size() == 2 && req.method == "GET") return {200, report_to_json(reports_.get(s.user, parts[1]))};
  if (parts.size() == 2 && req.method == "DELETE") {
    reports_.remove(s.user, parts[1]);
    ++mutations_;
    return {200, {{"deleted", parts[1]}}};
  }
  if (parts.size() == 3 && parts[2] == "export" && req.method == "GET") {
    const auto r = reports_.get(s.user, parts[1]);
    return {200, {{"id", r.id}, {"title", r.title}, {"payload", r.payload}}};
  }
  if (parts.size() == 3 && parts[2] == "share" && req.method == "POST") {
    const json body = parse_body(req);
    if (!body.contains("users") || !body.at("users").is_array())
      throw Error(Errc::SchemaViolation, "users must be a list", {"users"});
    std::vector<std::string> users;
    for (const auto& u : body.at("users")) {
      if (!u.is_string() || !auth_->user_exists(u.get<std::string>()))
        throw Error(Errc::SchemaViolation, "unknown user in share list", {u.dump()});
      users.push_back(u.get<std::string>());
    }
    const auto r = reports_.share(s.user, parts[1], users);
    ++mutations_;
    return {200, report_to_json(r)};
  }
  not_found(req);
}

Response Service::ingest_routes(const Request& req, const SessionToken& s, const std::vector<std::string>& parts) {
  if (parts.size() != 2 || req.method != "POST") not_found(req);
  const json body = parse_body(req);
  const Date today = Date::from_unix_seconds(clock_());
  std::vector<domain::RawRecord> events;
  json stored;
  std::string service;
  std::string title;
  if (parts[1] == "parcel") {
    const auto report = parse_parcel_report(body, config_.parcel_classes);
    stored = parcel_to_json(report);
    service = "parcel-inspection";
    title = "Parcel scan " + report.image_id;
    events = parcel_events(report, "", today);
  } else if (parts[1] == "firearm") {
    const auto report = parse_firearm_report(body, config_.firearm_id_types, config_.max_firearm_candidates);
    stored = firearm_to_json(report);
    service = "firearm-identification";
    title = "Firearm identification " + report.image_id;
    events = firearm_events(report, "", today);
  } else {
    not_found(req);
  }
  // Validate every event before anything is stored.
  for (const auto& e : events) domain::validate_record(e, domain::Source::detector_report);
  const auto r = reports_.create(s.user, service, title, stored);
  for (auto& e : events) e["report_id"] = r.id;
  const auto ids = emit_detector_events(events);
  ++mutations_;
  return {201, {{"report_id", r.id}, {"record_ids", ids}}};
}

Response Service::entity_routes(const Request& req, const std::vector<std::string>& parts) {
  if (req.method != "GET" || parts.size() > 2) not_found(req);
  const auto snap = graph_->snapshot();
  auto provenance = [&](const domain::EntityRecord& r) {
    return json{{"store", "graph"}, {"source", domain::to_string(r.source)}, {"graph_version", snap->version()}};
  };
  if (parts.size() == 2) {
    const auto* node = snap->node(parts[1]);
    if (!node) throw Error(Errc::UnknownRecord, "no entity '" + parts[1] + "'", {parts[1]});
    const auto rec = domain::validate_record(node->properties);
    auto j = record_to_json(rec);
    j["provenance"] = provenance(rec);
    j["neighbors"] = snap->neighbors(parts[1]);
    return {200, j};
  }
  const auto q = list_query(req, {"kind"});
  std::optional<domain::EntityKind> kind;
  if (q.extra.count("kind")) {
    kind = domain::parse_kind(q.extra.at("kind"));
    if (!kind) throw Error(Errc::BadFilter, "filter 'kind' must be agent or event", {"kind"});
  }
  std::vector<std::pair<std::string, json>> keyed;
  for (const auto& r : graph_records(*snap)) {
    if (!record_matches(r, q, config_.taxonomy) || (kind && r.kind != *kind)) continue;
    auto j = record_to_json(r);
    j["provenance"] = provenance(r);
    keyed.emplace_back(date_id_key(r.date, r.id), std::move(j));
  }
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return {200, page_json(paginate(keyed, q), keyed.size())};
}

Response Service::correlation_routes(const Request& req) {
  const auto q = list_query(req, {"min_score", "entity"});
  double min_score = 0.0;
  if (q.extra.count("min_score")) {
    const auto v = text::parse_double(q.extra.at("min_score"));
    if (!v || *v < 0 || *v > 1) throw Error(Errc::BadFilter, "filter 'min_score' must be in [0, 1]", {"min_score"});
    min_score = *v;
  }
  const auto a = analysis();
  std::map<std::string, const domain::EntityRecord*> by_id;
  for (const auto& r : a->records) by_id[r.id] = &r;
  std::vector<std::pair<std::string, json>> keyed;
  for (const auto& e : a->correlation.edges) {
    if (e.score < min_score) continue;
    if (q.extra.count("entity") && e.a != q.extra.at("entity") && e.b != q.extra.at("entity")) continue;
    if (!record_matches(*by_id.at(e.a), q, config_.taxonomy) && !record_matches(*by_id.at(e.b), q, config_.taxonomy))
      continue;
    auto j = edge_to_json(e);
    j["provenance"] = {{"store", "graph"}, {"graph_version", a->version}};
    keyed.emplace_back(e.a + '\x1f' + e.b, std::move(j));
  }
  return {200, page_json(paginate(keyed, q), keyed.size())};
}

Response Service::cluster_routes(const Request& req) {
  const auto q = list_query(req);
  const auto a = analysis();
  const auto& c = a->correlation.clustering;
  std::map<std::string, const domain::EntityRecord*> by_id;
  for (const auto& r : a->records) by_id[r.id] = &r;
  const json all = clusters_to_json(c);
  std::vector<std::pair<std::string, json>> keyed;
  for (const auto& cluster : all.at("clusters")) {
    json members = json::array();
    for (const auto& m : cluster.at("members"))
      if (record_matches(*by_id.at(m.get<std::string>()), q, config_.taxonomy)) members.push_back(m);
    if (members.empty()) continue;
    json j = cluster;
    j["members"] = members;
    char key[16];
    std::snprintf(key, sizeof key, "%08d", cluster.at("label").get<int>());
    keyed.emplace_back(key, std::move(j));
  }
  auto out = page_json(paginate(keyed, q), keyed.size());
  json noise = json::array();
  for (const auto& m : all.at("noise"))
    if (record_matches(*by_id.at(m.get<std::string>()), q, config_.taxonomy)) noise.push_back(m);
  out["noise"] = noise;
  out["graph_version"] = a->version;
  return {200, out};
}

Response Service::evaluate_routes(const Request& req, const std::vector<std::string>& parts) {
  if (parts.size() != 2) not_found(req);
  const auto a = analysis();
  auto parse_evidence = [&](const json& body) {
    evaluate::Evidence ev;
    if (!body.contains("evidence") || !body.at("evidence").is_object())
      throw Error(Errc::InvalidEvidence, "evidence must be an object of node to state");
    for (const auto& [k, v] : body.at("evidence").items()) {
      if (!v.is_string()) throw Error(Errc::InvalidEvidence, "evidence states must be strings", {k});
      ev[k] = v.get<std::string>();
    }
    return ev;
  };
  if (parts[1] == "priority" && req.method == "GET") {
    const auto q = list_query(req);
    std::map<std::string, const domain::EntityRecord*> by_id;
    for (const auto& r : a->records) by_id[r.id] = &r;
    std::vector<std::pair<std::string, json>> keyed;
    for (const auto& o : a->evaluation.events) {
      const auto& r = *by_id.at(o.id);
      if (!record_matches(r, q, config_.taxonomy)) continue;
      auto j = observation_to_json(o, net_, config_.situation);
      j["date"] = r.date ? r.date->iso() : "";
      j["provenance"] = {{"store", "graph"}, {"source", domain::to_string(r.source)}, {"graph_version", a->version}};
      keyed.emplace_back(date_id_key(r.date, r.id), std::move(j));
    }
    std::sort(keyed.begin(), keyed.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    return {200, page_json(paginate(keyed, q), keyed.size())};
  }
  if (parts[1] == "priority" && req.method == "POST") {
    const auto ev = parse_evidence(parse_body(req));
    const auto o = evaluate::observe_event(net_, "query", ev, config_.situation);
    auto j = observation_to_json(o, net_, config_.situation);
    j.erase("id");
    return {200, j};
  }
  if (parts[1] == "similar" && (req.method == "POST" || req.method == "GET")) {
    json body = req.method == "POST" ? parse_body(req) : json::object();
    std::string exclude;
    std::size_t k = 5;
    if (req.method == "GET") {
      for (const auto& [key, v] : req.query)
        if (key != "id" && key != "k") throw Error(Errc::BadFilter, "filter '" + key + "' is not supported here", {key});
      if (!req.query.count("id")) throw Error(Errc::BadFilter, "filter 'id' is required", {"id"});
      body["event_id"] = req.query.at("id");
      if (req.query.count("k")) {
        const auto n = text::parse_int(req.query.at("k"));
        if (!n || *n < 1) throw Error(Errc::BadFilter, "filter 'k' must be a positive integer", {"k"});
        k = static_cast<std::size_t>(*n);
      }
    } else if (body.contains("k")) {
      if (!body.at("k").is_number_integer() || body.at("k").get<long long>() < 1)
        throw Error(Errc::BadFilter, "k must be a positive integer", {"k"});
      k = body.at("k").get<std::size_t>();
    }
    evaluate::Evidence traces;
    if (body.contains("event_id")) {
      exclude = body.at("event_id").get<std::string>();
      const auto it = std::find_if(a->evaluation.events.begin(), a->evaluation.events.end(),
                                   [&](const auto& o) { return o.id == exclude; });
      if (it == a->evaluation.events.end())
        throw Error(Errc::UnknownRecord, "no evaluated event '" + exclude + "'", {exclude});
      traces = it->evidence;
    } else {
      traces = parse_evidence(body);
    }
    std::vector<evaluate::EventObservation> store;
    for (const auto& o : a->evaluation.events)
      if (o.id != exclude) store.push_back(o);
    json items = json::array();
    for (const auto& r : evaluate::query_similar_events(net_, traces, store, k, config_.situation))
      items.push_back({{"id", r.id}, {"similarity", r.similarity}, {"provenance", {{"store", "graph"}, {"graph_version", a->version}}}});
    return {200, {{"items", items}, {"evidence", traces}}};
  }
  not_found(req);
}

Response Service::incident_routes(const Request& req) {
  const auto q = list_query(req, {"type"});
  std::optional<incidents::IncidentType> type;
  if (q.extra.count("type")) {
    type = incidents::parse_incident_type(q.extra.at("type"));
    if (!type) throw Error(Errc::BadFilter, "filter 'type' is not an incident type", {"type"});
  }
  std::vector<std::pair<std::string, json>> keyed;
  for (std::size_t i = 0; i < incidents_.records.size(); ++i) {
    const auto& rec = incident_records_[i];
    const auto& inc = incidents_.records[i];
    if (!record_matches(rec, q, config_.taxonomy) || (type && inc.type != *type)) continue;
    auto j = json::parse(incidents::incident_to_json(inc));
    j["id"] = incidents_.ids[i];
    j["provenance"] = {{"store", "incidents"}, {"source_url", inc.source_url}};
    keyed.emplace_back(date_id_key(rec.date, rec.id), std::move(j));
  }
  std::sort(keyed.begin(), keyed.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  return {200, page_json(paginate(keyed, q), keyed.size())};
}

Response Service::risk_routes(const Request& req) {
  for (const auto& [k, v] : req.query)
    if (k != "country" && k != "type" && k != "flagged" && k != "limit" && k != "cursor")
      throw Error(Errc::BadFilter, "filter '" + k + "' is not supported here", {k});
  Params paging;
  for (const auto& k : {"limit", "cursor"})
    if (req.query.count(k)) paging[k] = req.query.at(k);
  const auto q = parse_list_query(paging, {}, config_.default_page_size, config_.max_page_size, config_.taxonomy);
  if (req.query.count("country") && !domain::is_country_code(req.query.at("country")))
    throw Error(Errc::BadFilter, "filter 'country' must be an ISO-3166 alpha-2 code", {"country"});
  std::optional<incidents::IncidentType> type;
  if (req.query.count("type")) {
    type = incidents::parse_incident_type(req.query.at("type"));
    if (!type) throw Error(Errc::BadFilter, "filter 'type' is not an incident type", {"type"});
  }
  const bool flagged_only = parse_bool_param(req.query, "flagged");
  const json all = risk_to_json(incidents_.risk, flagged_only);
  std::vector<std::pair<std::string, json>> keyed;
  std::size_t n = 0;
  for (const auto& j : all) {
    ++n;
    if (req.query.count("country") && j.at("country") != req.query.at("country")) continue;
    if (type && j.at("type") != incidents::to_string(*type)) continue;
    char key[16];
    std::snprintf(key, sizeof key, "%08zu", n);
    keyed.emplace_back(key, j);
  }
  auto out = page_json(paginate(keyed, q), keyed.size());
  out["threshold"] = config_.risk_threshold;
  return {200, out};
}

Response Service::federated_routes(const Request& req, const SessionToken& s, const std::vector<std::string>& parts) {
  if (parts.size() == 2 && parts[1] == "query" && req.method == "POST") {
    const json body = parse_body(req);
    gateway::FederatedQuery q;
    q.filters = parse_filters(body);
    q.projection = body.value("projection", std::vector<std::string>{});
    q.targets = body.value("targets", std::vector<std::string>{});
    return {200, federated_json(gateway_->execute(q, s.role))};
  }
  if (parts.size() == 2 && parts[1] == "stores" && req.method == "GET") {
    json items = json::array();
    for (const auto& d : gateway_->stores()) {
      json caps = json::array();
      for (const auto op : d.capabilities) caps.push_back(gateway::to_string(op));
      items.push_back({{"id", d.id}, {"display_name", d.display_name}, {"capabilities", caps}, {"reachable", d.reachable}});
    }
    return {200, {{"items", items}}};
  }
  if (parts.size() == 2 && parts[1] == "share" && req.method == "POST") {
    const json body = parse_body(req);
    const std::string from = body_string(body, "from");
    const std::string to = body_string(body, "to");
    const std::string id = body_string(body, "record_id");
    const auto found = gateway_->execute({{{"id", gateway::Op::eq, id, ""}}, {}, {from}}, s.role);
    if (found.rows.empty()) throw Error(Errc::UnknownRecord, "no record '" + id + "' in '" + from + "'", {from, id});
    const bool written = gateway_->share_record(found.rows.front().fields, from, to, s.role);
    if (written) ++mutations_;
    return {200, {{"record_id", id}, {"to", to}, {"written", written}}};
  }
  not_found(req);
}

Response Service::case_routes(const Request& req, const SessionToken& s, const std::vector<std::string>& parts) {
  if (parts.size() == 1 && req.method == "GET") {
    json items = json::array();
    for (const auto& c : cases_->list(s.user)) items.push_back(case_to_json(c));
    return {200, {{"items", items}, {"total", items.size()}}};
  }
  if (parts.size() == 1 && req.method == "POST") {
    const json body = parse_body(req);
    const auto c = cases_->create(s.user, body_string(body, "objective"));
    ++mutations_;
    return {201, case_to_json(c)};
  }
  if (parts.size() == 2 && req.method == "GET") return {200, case_to_json(cases_->get(s.user, parts[1]))};
  if (parts.size() != 3 || req.method != "POST") not_found(req);
  const json body = parse_body(req);
  const std::string& id = parts[1];
  if (parts[2] == "pins" || parts[2] == "unpin") {
    const PinnedRecord ref{body_string(body, "source"), body_string(body, "record_id")};
    const auto c = parts[2] == "pins" ? cases_->pin(s.user, s.role, id, ref) : cases_->unpin(s.user, id, ref);
    ++mutations_;
    return {200, case_to_json(c)};
  }
  if (parts[2] == "status") {
    const auto to = parse_case_status(body_string(body, "status"));
    if (!to) throw Error(Errc::SchemaViolation, "unknown case status", {"status"});
    const auto c = cases_->transition(s.user, id, *to);
    ++mutations_;
    return {200, case_to_json(c)};
  }
  if (parts[2] == "report") {
    const auto r = cases_->generate_report(s.user, s.role, id, reports_);
    ++mutations_;
    return {201, report_to_json(r)};
  }
  not_found(req);
}

}  // namespace fusion::service

#include "fusion/graph/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <map>

#include "fusion/error.hpp"
#include "fusion/text.hpp"

namespace fusion::graph {

using nlohmann::json;

namespace {

struct Link {
  std::string relation;
  std::string target;
};

struct Prepared {
  const IngestMessage* message;
  std::optional<PropertyNode> node;
  std::vector<Link> links;
  std::string reason;  // non-empty when rejected
};

Prepared prepare(const IngestMessage& m, const CleanseConfig& cfg) {
  Prepared p{&m, std::nullopt, {}, {}};
  const auto source = source_for_topic(m.topic);
  if (!source) {
    p.reason = "unknown_topic";
    return p;
  }
  if (m.key.empty()) {
    p.reason = "empty_key";
    return p;
  }
  try {
    domain::RawRecord cleaned = cleanse(m.payload, cfg);
    if (!cleaned.contains("id")) cleaned["id"] = m.key;
    if (cleaned.at("id") != m.key) {
      p.reason = "key_id_mismatch";
      return p;
    }
    domain::RawRecord record_fields;
    for (auto& [k, v] : cleaned) {
      if (k.starts_with(kLinkPrefix)) {
        const std::string relation = k.substr(kLinkPrefix.size());
        for (const auto& t : text::split(v, ',')) {
          const std::string target = text::trim(t);
          if (!relation.empty() && !target.empty()) p.links.push_back({relation, target});
        }
      } else {
        record_fields.emplace(k, v);
      }
    }
    const auto record = domain::validate_record(record_fields, *source);
    p.node = PropertyNode{record.id, std::string(domain::to_string(record.kind)), domain::to_raw(record)};
  } catch (const Error& e) {
    p.reason = std::string(to_string(e.code()));
    if (!e.details().empty()) p.reason += "(" + text::join(e.details(), ",") + ")";
  }
  return p;
}

std::string scalar_to_string(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
  if (v.is_number_float()) return text::format_double(v.get<double>());
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_null()) return "";
  return v.dump();
}

domain::RawRecord to_payload(const json& obj) {
  domain::RawRecord out;
  for (auto it = obj.begin(); it != obj.end(); ++it) out[it.key()] = scalar_to_string(it.value());
  return out;
}

}  // namespace

std::optional<domain::Source> source_for_topic(std::string_view topic) {
  using domain::Source;
  if (topic == topics::listings) return Source::darkweb_listing;
  if (topic == topics::forums) return Source::forum;
  if (topic == topics::news) return Source::news;
  if (topic == topics::chain_btc || topic == topics::chain_eth) return Source::chain;
  if (topic == topics::detector_reports) return Source::detector_report;
  return std::nullopt;
}

IngestStats& IngestStats::operator+=(const IngestStats& o) {
  consumed += o.consumed;
  upserted += o.upserted;
  rejected += o.rejected;
  skipped += o.skipped;
  return *this;
}

Ingestor::Ingestor(GraphStore& store, CleanseConfig cleanse, std::size_t batch_size)
    : store_(store), cleanse_(std::move(cleanse)), batch_size_(std::max<std::size_t>(1, batch_size)) {}

IngestStats Ingestor::ingest(std::span<const IngestMessage> messages) {
  IngestStats total;
  for (std::size_t start = 0; start < messages.size(); start += batch_size_) {
    const auto batch = messages.subspan(start, std::min(batch_size_, messages.size() - start));
    std::vector<Prepared> prepared;
    prepared.reserve(batch.size());
    for (const auto& m : batch) prepared.push_back(prepare(m, cleanse_));

    IngestStats stats;
    std::vector<QuarantineEntry> rejects;
    store_.transact([&](MutableGraph& g) {
      stats = IngestStats{};
      rejects.clear();
      for (const auto& p : prepared) {
        const IngestMessage& m = *p.message;
        ++stats.consumed;
        const TopicOffset slot{m.key, m.topic};
        if (auto seen = g.offset(slot); seen && m.offset <= *seen) {
          ++stats.skipped;
          continue;
        }
        g.set_offset(slot, m.offset);
        if (!p.node) {
          ++stats.rejected;
          rejects.push_back(QuarantineEntry{m.topic, m.key, m.offset, p.reason, m.payload});
          continue;
        }
        g.upsert_node(*p.node);
        g.remove_owned(m.key);
        for (const auto& link : p.links) {
          if (g.view().has_node(link.target))
            g.upsert_edge(PropertyEdge{m.key, link.target, link.relation, {{"origin", m.key}}});
          else
            g.add_pending(PendingLink{m.key, link.target, link.relation});
        }
        g.resolve_pending(m.key);
        ++stats.upserted;
      }
    });
    total += stats;
    if (!rejects.empty()) {
      std::lock_guard lock(quarantine_mutex_);
      for (auto& r : rejects) quarantine_.push_back(std::move(r));
    }
  }
  return total;
}

std::vector<QuarantineEntry> Ingestor::quarantine() const {
  std::lock_guard lock(quarantine_mutex_);
  return quarantine_;
}

std::string Ingestor::quarantine_ndjson() const {
  std::string out;
  for (const auto& q : quarantine())
    out += json{{"topic", q.topic}, {"key", q.key}, {"offset", q.offset}, {"reason", q.reason}, {"payload", q.payload}}
               .dump() +
           "\n";
  return out;
}

std::vector<IngestMessage> read_ndjson_messages(std::istream& in, const std::string& default_topic) {
  std::vector<IngestMessage> out;
  std::string line;
  std::int64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(Errc::ParseError, "line " + std::to_string(lineno) + ": " + e.what());
    }
    if (!j.is_object()) throw Error(Errc::ParseError, "line " + std::to_string(lineno) + ": not an object");
    IngestMessage m;
    if (j.contains("payload") && j["payload"].is_object()) {
      m.topic = j.value("topic", default_topic);
      m.payload = to_payload(j["payload"]);
      m.key = j.contains("key") ? scalar_to_string(j["key"]) : m.payload["id"];
      m.offset = j.value("offset", lineno);
    } else {
      m.topic = default_topic;
      m.payload = to_payload(j);
      m.key = m.payload.contains("id") ? m.payload.at("id") : "";
      m.offset = lineno;
    }
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<IngestMessage> read_ndjson_file(const std::filesystem::path& path, const std::optional<std::string>& topic) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::StorageUnavailable, "cannot open " + path.string());
  std::string default_topic = topic.value_or(path.stem().string());
  return read_ndjson_messages(in, default_topic);
}

}  // namespace fusion::graph

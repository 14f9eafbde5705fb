#pragma once

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fusion/domain/entity.hpp"
#include "fusion/graph/cleanse.hpp"
#include "fusion/graph/store.hpp"

namespace fusion::graph {

namespace topics {
inline constexpr std::string_view listings = "listings";
inline constexpr std::string_view forums = "forums";
inline constexpr std::string_view news = "news";
inline constexpr std::string_view chain_btc = "chain.btc";
inline constexpr std::string_view chain_eth = "chain.eth";
inline constexpr std::string_view detector_reports = "detector_reports";
}  // namespace topics

/// Source tag implied by a topic; nullopt for unknown topics.
std::optional<domain::Source> source_for_topic(std::string_view topic);

struct IngestMessage {
  std::string topic;
  std::string key;
  domain::RawRecord payload;
  std::int64_t offset = 0;
};

struct QuarantineEntry {
  std::string topic;
  std::string key;
  std::int64_t offset = 0;
  std::string reason;
  domain::RawRecord payload;
};

struct IngestStats {
  std::size_t consumed = 0;
  std::size_t upserted = 0;
  std::size_t rejected = 0;
  std::size_t skipped = 0;  // already-applied redeliveries

  IngestStats& operator+=(const IngestStats& o);
};

/// Payload attributes named "link.<relation>" declare outgoing edges to the
/// comma-separated target ids; links to unknown targets are held pending
/// until the target is ingested.
inline constexpr std::string_view kLinkPrefix = "link.";

/// At-least-once ingestion front end of a GraphStore.
///
/// A message applies only if its offset is greater than every offset already
/// applied for the same (key, topic); otherwise it is counted as skipped.
/// Rejected payloads are quarantined with a reason. Safe to call from several
/// threads: preparation runs concurrently, commits are serialized by the store.
class Ingestor {
 public:
  Ingestor(GraphStore& store, CleanseConfig cleanse = {}, std::size_t batch_size = 256);

  IngestStats ingest(std::span<const IngestMessage> messages);

  std::vector<QuarantineEntry> quarantine() const;
  /// Newline-delimited quarantine records, each with a `reason` field.
  std::string quarantine_ndjson() const;

 private:
  GraphStore& store_;
  CleanseConfig cleanse_;
  std::size_t batch_size_;
  mutable std::mutex quarantine_mutex_;
  std::vector<QuarantineEntry> quarantine_;
};

/// Reads newline-delimited JSON. Each line is either an envelope
/// {"topic","key","offset","payload"} or a bare record; bare records take
/// `default_topic`, key = record "id" and offset = 1-based line number.
/// Non-string scalar values are stringified.
std::vector<IngestMessage> read_ndjson_messages(std::istream& in, const std::string& default_topic);
std::vector<IngestMessage> read_ndjson_file(const std::filesystem::path& path,
                                            const std::optional<std::string>& topic = std::nullopt);

}  // namespace fusion::graph

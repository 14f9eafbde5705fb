#pragma once

#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace fusion::gateway {

/// Canonical fields every store mapping must cover.
inline const std::vector<std::string> kRequiredFields{"id", "date", "country", "firearm_model"};

using Row = std::map<std::string, std::string>;

enum class Op { eq, range, contains };

std::string_view to_string(Op op) noexcept;
std::optional<Op> parse_op(std::string_view s) noexcept;

/// `value` is the operand for eq/contains and the lower bound for range;
/// `upper` is the range upper bound. Empty bounds are open. Range compares
/// numerically when value and bounds all parse as numbers, otherwise as
/// strings (ISO dates order correctly). contains is case-insensitive.
struct Filter {
  std::string field;
  Op op = Op::eq;
  std::string value;
  std::string upper;

  bool operator==(const Filter&) const = default;
};

bool filter_matches(const Filter& f, const Row& row);

struct FederatedQuery {
  std::vector<Filter> filters;
  std::vector<std::string> projection;  // empty: every permitted field
  std::vector<std::string> targets;     // empty: all registered stores
};

struct StoreDescriptor {
  std::string id;
  std::string display_name;
  std::map<std::string, std::string> mapping;  // canonical -> store field
  std::set<Op> capabilities{Op::eq, Op::range, Op::contains};
  bool reachable = true;
};

/// Missing required canonical fields, in kRequiredFields order.
std::vector<std::string> missing_fields(const StoreDescriptor& d);

/// Narrow contract every backing store implements. Filters and rows use the
/// store's own field names.
class StoreAdapter {
 public:
  virtual ~StoreAdapter() = default;
  virtual bool probe() = 0;
  /// Throws Error(StoreUnavailable) when the store cannot answer.
  virtual std::vector<Row> query(const std::vector<Filter>& filters) = 0;
  /// Upsert keyed on `id_field`; returns false when an identical row existed.
  virtual bool write(const Row& row, const std::string& id_field) = 0;
};

/// In-memory table loaded from a comma-separated file with a header row.
/// Outages and latency can be injected for tests and demos.
class TableAdapter final : public StoreAdapter {
 public:
  TableAdapter() = default;
  explicit TableAdapter(std::vector<Row> rows) : rows_(std::move(rows)) {}
  static std::shared_ptr<TableAdapter> from_csv(const std::string& path);

  bool probe() override;
  std::vector<Row> query(const std::vector<Filter>& filters) override;
  bool write(const Row& row, const std::string& id_field) override;

  void set_online(bool online);
  void set_latency_ms(int ms);
  std::vector<Row> rows() const;

 private:
  void wait() const;

  mutable std::mutex mutex_;
  std::vector<Row> rows_;
  bool online_ = true;
  int latency_ms_ = 0;
};

/// Parses RFC 4180-style CSV (quoted fields, doubled quotes) into rows keyed
/// by the header. Throws Error(ParseError) on ragged rows.
std::vector<Row> read_csv_rows(std::istream& in);

/// Store fixture file: {"id", "display_name", "table", "mapping", "capabilities"}.
/// `table` is resolved relative to the descriptor file.
struct StoreFixture {
  StoreDescriptor descriptor;
  std::string table_path;
};
StoreFixture load_store_fixture(const std::string& path);

}  // namespace fusion::gateway

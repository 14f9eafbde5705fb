#include "fusion/gateway/store.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <thread>

#include "fusion/error.hpp"
#include "fusion/text.hpp"

namespace fusion::gateway {

std::string_view to_string(Op op) noexcept {
  switch (op) {
    case Op::eq: return "eq";
    case Op::range: return "range";
    case Op::contains: return "contains";
  }
  return "eq";
}

std::optional<Op> parse_op(std::string_view s) noexcept {
  if (s == "eq") return Op::eq;
  if (s == "range") return Op::range;
  if (s == "contains") return Op::contains;
  return std::nullopt;
}

bool filter_matches(const Filter& f, const Row& row) {
  const auto it = row.find(f.field);
  if (it == row.end()) return false;
  const std::string& v = it->second;
  switch (f.op) {
    case Op::eq: return v == f.value;
    case Op::contains: return text::to_lower(v).find(text::to_lower(f.value)) != std::string::npos;
    case Op::range: {
      const auto x = text::parse_double(v);
      const auto lo = f.value.empty() ? std::optional<double>(0.0) : text::parse_double(f.value);
      const auto hi = f.upper.empty() ? std::optional<double>(0.0) : text::parse_double(f.upper);
      if (x && lo && hi)
        return (f.value.empty() || *x >= *lo) && (f.upper.empty() || *x <= *hi);
      return (f.value.empty() || v >= f.value) && (f.upper.empty() || v <= f.upper);
    }
  }
  return false;
}

std::vector<std::string> missing_fields(const StoreDescriptor& d) {
  std::vector<std::string> out;
  for (const auto& f : kRequiredFields) {
    const auto it = d.mapping.find(f);
    if (it == d.mapping.end() || it->second.empty()) out.push_back(f);
  }
  return out;
}

std::shared_ptr<TableAdapter> TableAdapter::from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ParseError, "cannot open store table '" + path + "'");
  return std::make_shared<TableAdapter>(read_csv_rows(in));
}

void TableAdapter::wait() const {
  int ms;
  {
    std::lock_guard lock(mutex_);
    ms = latency_ms_;
  }
  if (ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(ms));
}

bool TableAdapter::probe() {
  wait();
  std::lock_guard lock(mutex_);
  return online_;
}

std::vector<Row> TableAdapter::query(const std::vector<Filter>& filters) {
  wait();
  std::lock_guard lock(mutex_);
  if (!online_) throw Error(Errc::StoreUnavailable, "store is offline");
  std::vector<Row> out;
  for (const auto& r : rows_) {
    bool ok = true;
    for (const auto& f : filters) ok = ok && filter_matches(f, r);
    if (ok) out.push_back(r);
  }
  return out;
}

bool TableAdapter::write(const Row& row, const std::string& id_field) {
  wait();
  std::lock_guard lock(mutex_);
  if (!online_) throw Error(Errc::StoreUnavailable, "store is offline");
  const auto id = row.find(id_field);
  if (id == row.end() || id->second.empty()) throw Error(Errc::MissingField, "row has no '" + id_field + "'");
  for (auto& r : rows_) {
    const auto rid = r.find(id_field);
    if (rid != r.end() && rid->second == id->second) {
      if (r == row) return false;
      r = row;
      return true;
    }
  }
  rows_.push_back(row);
  return true;
}

void TableAdapter::set_online(bool online) {
  std::lock_guard lock(mutex_);
  online_ = online;
}

void TableAdapter::set_latency_ms(int ms) {
  std::lock_guard lock(mutex_);
  latency_ms_ = ms;
}

std::vector<Row> TableAdapter::rows() const {
  std::lock_guard lock(mutex_);
  return rows_;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line, std::istream& in, std::size_t& line_no) {
  std::vector<std::string> out;
  std::string cur, buf = line;
  bool quoted = false;
  for (std::size_t i = 0;; ++i) {
    if (i == buf.size()) {
      if (!quoted) break;
      std::string next;
      if (!std::getline(in, next)) throw Error(Errc::ParseError, "unterminated quote at line " + std::to_string(line_no));
      ++line_no;
      buf += '\n' + next;
      cur += '\n';
      continue;
    }
    const char c = buf[i];
    if (quoted) {
      if (c == '"' && i + 1 < buf.size() && buf[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

}  // namespace

std::vector<Row> read_csv_rows(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    auto cells = split_csv_line(line, in, line_no);
    if (header.empty()) {
      for (auto& c : cells) header.push_back(text::trim(c));
      continue;
    }
    if (cells.size() != header.size())
      throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                                        " columns, got " + std::to_string(cells.size()));
    Row r;
    for (std::size_t i = 0; i < header.size(); ++i)
      if (!cells[i].empty()) r[header[i]] = cells[i];
    rows.push_back(std::move(r));
  }
  return rows;
}

StoreFixture load_store_fixture(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::BadConfig, "cannot open store descriptor '" + path + "'");
  try {
    const auto j = nlohmann::json::parse(in);
    StoreFixture f;
    f.descriptor.id = j.at("id").get<std::string>();
    f.descriptor.display_name = j.value("display_name", f.descriptor.id);
    f.descriptor.mapping = j.at("mapping").get<std::map<std::string, std::string>>();
    if (j.contains("capabilities")) {
      f.descriptor.capabilities.clear();
      for (const auto& c : j["capabilities"]) {
        const auto op = parse_op(c.get<std::string>());
        if (!op) throw Error(Errc::BadConfig, "unknown operator '" + c.get<std::string>() + "'");
        f.descriptor.capabilities.insert(*op);
      }
    }
    f.table_path = (std::filesystem::path(path).parent_path() / j.at("table").get<std::string>()).string();
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::BadConfig, "store descriptor '" + path + "': " + e.what());
  }
}

}  // namespace fusion::gateway

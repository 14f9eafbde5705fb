#include "fusion/service/reports.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "fusion/domain/entity.hpp"
#include "fusion/error.hpp"
#include "fusion/text.hpp"

namespace fusion::service {

using nlohmann::json;

json report_to_json(const Report& r) {
  return {{"id", r.id},
          {"service", r.service},
          {"owner", r.owner},
          {"created", r.created},
          {"shared_with", std::vector<std::string>(r.shared_with.begin(), r.shared_with.end())},
          {"title", r.title},
          {"payload", r.payload}};
}

Report ReportStore::create(const std::string& owner, const std::string& service, const std::string& title,
                           json payload) {
  if (owner.empty() || service.empty() || title.empty())
    throw Error(Errc::SchemaViolation, "reports need an owner, a service and a title");
  std::lock_guard lock(mutex_);
  char id[16];
  std::snprintf(id, sizeof id, "R-%06llu", static_cast<unsigned long long>(next_++));
  Report r{id, service, owner, clock_(), {}, title, std::move(payload)};
  reports_[r.id] = r;
  return r;
}

std::vector<Report> ReportStore::list(const std::string& user, const ReportFilter& f) const {
  std::lock_guard lock(mutex_);
  std::vector<Report> out;
  for (const auto& [id, r] : reports_) {
    if (r.owner != user && !r.shared_with.count(user)) continue;
    if (f.created_from && r.created < *f.created_from) continue;
    if (f.created_to && r.created > *f.created_to) continue;
    if (f.service && r.service != *f.service) continue;
    if (f.title_contains && text::to_lower(r.title).find(text::to_lower(*f.title_contains)) == std::string::npos)
      continue;
    out.push_back(r);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Report& a, const Report& b) { return std::tie(a.created, a.id) < std::tie(b.created, b.id); });
  return out;
}

Report& ReportStore::visible(const std::string& user, const std::string& id) {
  const auto it = reports_.find(id);
  if (it == reports_.end() || (it->second.owner != user && !it->second.shared_with.count(user)))
    throw Error(Errc::UnknownReport, "no report '" + id + "'", {id});
  return it->second;
}

Report ReportStore::get(const std::string& user, const std::string& id) const {
  std::lock_guard lock(mutex_);
  return const_cast<ReportStore*>(this)->visible(user, id);
}

void ReportStore::remove(const std::string& user, const std::string& id) {
  std::lock_guard lock(mutex_);
  if (visible(user, id).owner != user) throw Error(Errc::NotOwner, "only the owner may delete report '" + id + "'");
  reports_.erase(id);
}

Report ReportStore::share(const std::string& user, const std::string& id, const std::vector<std::string>& with) {
  std::lock_guard lock(mutex_);
  Report& r = visible(user, id);
  if (r.owner != user) throw Error(Errc::NotOwner, "only the owner may share report '" + id + "'");
  for (const auto& u : with)
    if (u != user) r.shared_with.insert(u);
  return r;
}

std::size_t ReportStore::size() const {
  std::lock_guard lock(mutex_);
  return reports_.size();
}

namespace {

std::string require_string(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_string() || j.at(key).get<std::string>().empty())
    throw Error(Errc::SchemaViolation, std::string("field '") + key + "' must be a non-empty string", {key});
  return j.at(key).get<std::string>();
}

double require_confidence(const json& j) {
  if (!j.contains("confidence") || !j.at("confidence").is_number())
    throw Error(Errc::SchemaViolation, "confidence must be a number", {"confidence"});
  const double c = j.at("confidence").get<double>();
  if (!(c >= 0.0 && c <= 1.0)) throw Error(Errc::SchemaViolation, "confidence must lie in [0, 1]", {"confidence"});
  return c;
}

std::optional<Date> optional_date(const json& j) {
  if (!j.contains("date")) return std::nullopt;
  const auto d = j.at("date").is_string() ? Date::parse_iso(j.at("date").get<std::string>()) : std::nullopt;
  if (!d) throw Error(Errc::SchemaViolation, "date must be YYYY-MM-DD", {"date"});
  return d;
}

std::optional<std::string> optional_country(const json& j) {
  if (!j.contains("country")) return std::nullopt;
  const std::string c = j.at("country").is_string() ? j.at("country").get<std::string>() : "";
  if (!domain::is_country_code(c)) throw Error(Errc::SchemaViolation, "country must be ISO-3166 alpha-2", {"country"});
  return c;
}

std::string match_class(const std::string& name, const std::vector<std::string>& vocab) {
  const std::string lower = text::to_lower(name);
  for (const auto& v : vocab)
    if (text::to_lower(v) == lower) return v;
  throw Error(Errc::UnknownClass, "'" + name + "' is not in the configured vocabulary", {name});
}

long long box_coord(const json& box, const char* key) {
  if (!box.contains(key)) throw Error(Errc::MalformedBox, std::string("box lacks '") + key + "'", {key});
  const auto& v = box.at(key);
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::isfinite(d) && d == std::floor(d) && std::fabs(d) < 9e15) return static_cast<long long>(d);
  }
  throw Error(Errc::MalformedBox, std::string("box coordinate '") + key + "' must be an integer", {key});
}

std::optional<long long> optional_dim(const json& j, const char* key) {
  if (!j.contains(key)) return std::nullopt;
  if (!j.at(key).is_number_integer() || j.at(key).get<long long>() <= 0)
    throw Error(Errc::SchemaViolation, std::string(key) + " must be a positive integer", {key});
  return j.at(key).get<long long>();
}

}  // namespace

ParcelAnalysisReport parse_parcel_report(const json& j, const std::vector<std::string>& classes) {
  if (!j.is_object()) throw Error(Errc::SchemaViolation, "parcel report must be an object");
  ParcelAnalysisReport r;
  r.image_id = require_string(j, "image_id");
  r.image_width = optional_dim(j, "image_width");
  r.image_height = optional_dim(j, "image_height");
  r.date = optional_date(j);
  r.country = optional_country(j);
  if (!j.contains("detections") || !j.at("detections").is_array())
    throw Error(Errc::SchemaViolation, "detections must be a list", {"detections"});
  for (const auto& d : j.at("detections")) {
    if (!d.is_object()) throw Error(Errc::SchemaViolation, "detection must be an object");
    Detection det;
    det.cls = match_class(require_string(d, "class"), classes);
    if (!d.contains("box") || !d.at("box").is_object()) throw Error(Errc::MalformedBox, "detection lacks a box");
    const auto& b = d.at("box");
    det.box = {box_coord(b, "x"), box_coord(b, "y"), box_coord(b, "width"), box_coord(b, "height")};
    if (det.box.x < 0 || det.box.y < 0) throw Error(Errc::MalformedBox, "box coordinates must be non-negative");
    if (det.box.width <= 0 || det.box.height <= 0) throw Error(Errc::MalformedBox, "box must have positive extent");
    if ((r.image_width && det.box.x + det.box.width > *r.image_width) ||
        (r.image_height && det.box.y + det.box.height > *r.image_height))
      throw Error(Errc::MalformedBox, "box exceeds the image bounds");
    det.confidence = require_confidence(d);
    r.detections.push_back(std::move(det));
  }
  return r;
}

FirearmIdReport parse_firearm_report(const json& j, const std::vector<std::string>& types, std::size_t max_candidates) {
  if (!j.is_object()) throw Error(Errc::SchemaViolation, "firearm report must be an object");
  FirearmIdReport r;
  r.image_id = require_string(j, "image_id");
  r.date = optional_date(j);
  r.country = optional_country(j);
  if (!j.contains("candidates") || !j.at("candidates").is_array() || j.at("candidates").empty())
    throw Error(Errc::SchemaViolation, "candidates must be a non-empty list", {"candidates"});
  if (j.at("candidates").size() > max_candidates)
    throw Error(Errc::SchemaViolation,
                "at most " + std::to_string(max_candidates) + " candidates are allowed, got " +
                    std::to_string(j.at("candidates").size()),
                {"candidates"});
  for (const auto& c : j.at("candidates")) {
    if (!c.is_object()) throw Error(Errc::SchemaViolation, "candidate must be an object");
    FirearmCandidate fc{match_class(require_string(c, "type"), types), require_confidence(c)};
    if (!r.candidates.empty() && fc.confidence > r.candidates.back().confidence)
      throw Error(Errc::SchemaViolation, "candidate confidences must be non-increasing", {"candidates"});
    r.candidates.push_back(std::move(fc));
  }
  return r;
}

namespace {

domain::RawRecord base_event(const std::string& id, const std::string& report_id, const std::optional<Date>& date,
                             const Date& fallback, const std::optional<std::string>& country) {
  domain::RawRecord rec{{"id", id},
                        {"kind", "event"},
                        {"date", (date ? *date : fallback).iso()},
                        {"source", "detector_report"},
                        {"report_id", report_id}};
  if (country) rec["country"] = *country;
  return rec;
}

std::string type_key(const std::string& cls) {
  std::string out;
  for (const char c : text::to_lower(cls)) out += (c == ' ' || c == '-') ? '_' : c;
  return out;
}

}  // namespace

std::vector<domain::RawRecord> parcel_events(const ParcelAnalysisReport& r, const std::string& report_id,
                                             const Date& fallback_date) {
  std::vector<domain::RawRecord> out;
  for (std::size_t i = 0; i < r.detections.size(); ++i) {
    const auto& d = r.detections[i];
    auto rec = base_event(r.image_id + ":" + std::to_string(i), report_id, r.date, fallback_date, r.country);
    rec["firearm_type"] = type_key(d.cls);
    rec["detected_class"] = d.cls;
    rec["confidence"] = text::format_double(d.confidence);
    rec["box"] = std::to_string(d.box.x) + "," + std::to_string(d.box.y) + "," + std::to_string(d.box.width) + "," +
                 std::to_string(d.box.height);
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<domain::RawRecord> firearm_events(const FirearmIdReport& r, const std::string& report_id,
                                              const Date& fallback_date) {
  auto rec = base_event(r.image_id, report_id, r.date, fallback_date, r.country);
  rec["firearm_model"] = r.candidates.front().type;
  rec["confidence"] = text::format_double(r.candidates.front().confidence);
  std::vector<std::string> ranked;
  for (const auto& c : r.candidates) ranked.push_back(c.type);
  rec["candidates"] = text::join(ranked, "|");
  return {rec};
}

json parcel_to_json(const ParcelAnalysisReport& r) {
  json dets = json::array();
  for (const auto& d : r.detections)
    dets.push_back({{"class", d.cls},
                    {"box", {{"x", d.box.x}, {"y", d.box.y}, {"width", d.box.width}, {"height", d.box.height}}},
                    {"confidence", d.confidence}});
  json j{{"image_id", r.image_id}, {"detections", dets}};
  if (r.image_width) j["image_width"] = *r.image_width;
  if (r.image_height) j["image_height"] = *r.image_height;
  if (r.date) j["date"] = r.date->iso();
  if (r.country) j["country"] = *r.country;
  return j;
}

json firearm_to_json(const FirearmIdReport& r) {
  json c = json::array();
  for (const auto& x : r.candidates) c.push_back({{"type", x.type}, {"confidence", x.confidence}});
  json j{{"image_id", r.image_id}, {"candidates", c}};
  if (r.date) j["date"] = r.date->iso();
  if (r.country) j["country"] = *r.country;
  return j;
}

}  // namespace fusion::service

#include "fusion/graph/cleanse.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <optional>

#include "fusion/date.hpp"
#include "fusion/error.hpp"
#include "fusion/text.hpp"

namespace fusion::graph {
namespace {

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

struct TaggedAmount {
  double value;
  std::string currency;
};

std::optional<std::string> symbol_currency(std::string_view s) {
  if (s.starts_with("$")) return "USD";
  if (s.starts_with("\xE2\x82\xAC")) return "EUR";  // €
  if (s.starts_with("\xC2\xA3")) return "GBP";      // £
  return std::nullopt;
}

std::optional<double> parse_number(std::string s) {
  std::string cleaned;
  for (char c : s)
    if (c != ',') cleaned += c;
  return text::parse_double(cleaned);
}

bool is_currency_code(std::string_view s) {
  return s.size() == 3 && std::isalpha(static_cast<unsigned char>(s[0])) &&
         std::isalpha(static_cast<unsigned char>(s[1])) && std::isalpha(static_cast<unsigned char>(s[2]));
}

std::optional<TaggedAmount> parse_tagged_amount(std::string_view value) {
  const std::string v = text::trim(value);
  if (auto cur = symbol_currency(v)) {
    const std::size_t skip = v[0] == '$' ? 1 : (static_cast<unsigned char>(v[0]) == 0xE2 ? 3 : 2);
    if (auto n = parse_number(text::trim(std::string_view(v).substr(skip)))) return TaggedAmount{*n, *cur};
    return std::nullopt;
  }
  const auto space = v.find(' ');
  if (space == std::string::npos) return std::nullopt;
  const std::string left = v.substr(0, space);
  const std::string right = text::trim(std::string_view(v).substr(space + 1));
  if (is_currency_code(right)) {
    if (auto n = parse_number(left)) return TaggedAmount{*n, text::to_upper(right)};
  }
  if (is_currency_code(left)) {
    if (auto n = parse_number(right)) return TaggedAmount{*n, text::to_upper(left)};
  }
  return std::nullopt;
}

std::string format_usd(double usd) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f USD", std::round(usd * 100.0) / 100.0);
  return buf;
}

}  // namespace

bool is_date_key(std::string_view key) { return key == "date" || key == "published" || ends_with(key, "_date"); }

bool is_amount_key(std::string_view key) { return key == "amount" || key == "price" || ends_with(key, "_amount"); }

domain::RawRecord cleanse(const domain::RawRecord& payload, const CleanseConfig& config) {
  domain::RawRecord out;
  for (const auto& [raw_key, raw_value] : payload) {
    std::string key = text::trim(raw_key);
    std::string value = text::trim(raw_value);
    if (key.empty() || value.empty()) continue;
    if (out.contains(key)) continue;

    if (is_date_key(key)) {
      auto d = Date::parse_iso(value);
      if (!d) d = Date::parse_dmy(value);
      if (!d) throw Error(Errc::UnparseableDate, "field '" + key + "' has unparseable date '" + value + "'");
      value = d->iso();
    } else if (key == "country") {
      value = text::to_upper(value);
    } else if (is_amount_key(key)) {
      if (auto amount = parse_tagged_amount(value)) {
        auto rate = config.usd_rates.find(amount->currency);
        if (amount->currency == "USD")
          value = format_usd(amount->value);
        else if (rate != config.usd_rates.end())
          value = format_usd(amount->value * rate->second);
      }
    }
    out.emplace(std::move(key), std::move(value));
  }
  return out;
}

}  // namespace fusion::graph

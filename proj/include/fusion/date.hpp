#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace fusion {

/// Proleptic Gregorian calendar date, UTC.
struct Date {
  int year = 1970;
  int month = 1;
  int day = 1;

  auto operator<=>(const Date&) const = default;

  /// Strict "YYYY-MM-DD"; rejects impossible days (e.g. 2023-02-29).
  static std::optional<Date> parse_iso(std::string_view text);
  /// "DD/MM/YYYY".
  static std::optional<Date> parse_dmy(std::string_view text);
  static Date from_unix_seconds(std::int64_t seconds);

  std::string iso() const;
  int quarter() const { return (month + 2) / 3; }
  std::int64_t days_since_epoch() const;
};

bool is_valid_date(int year, int month, int day);

}  // namespace fusion

#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace csm {

/// Calendar date. Comparison and arithmetic go through the civil-day count
/// (days since 1970-01-01), so ordering is exact and cheap.
struct Date {
  int year = 1970;
  int month = 1;  // 1..12
  int day = 1;    // 1..31

  auto operator<=>(const Date&) const = default;

  std::string to_string() const;  // ISO-8601 YYYY-MM-DD
  int64_t serial() const;         // days since 1970-01-01
  /// 0 = Sunday .. 6 = Saturday.
  int weekday() const;
  bool is_weekday() const;
  Date next_day() const;
  /// Next Monday..Friday strictly after this date.
  Date next_weekday() const;

  static Date from_serial(int64_t days);
  /// Parses YYYY-MM-DD; throws ParseError otherwise.
  static Date parse(const std::string& iso);
};

/// Integer key YYYYMMDD, handy for seeding and map keys.
inline int64_t date_key(const Date& d) {
  return int64_t{d.year} * 10000 + d.month * 100 + d.day;
}

}  // namespace csm

#include "csm/dates.hpp"

#include <cstdio>

#include "csm/common.hpp"

namespace csm {

namespace {

// Howard Hinnant's civil-from-days / days-from-civil algorithms.
int64_t days_from_civil(int y, unsigned m, unsigned d) {
  y -= m <= 2;
  const int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<int64_t>(doe) - 719468;
}

void civil_from_days(int64_t z, int& y, unsigned& m, unsigned& d) {
  z += 719468;
  const int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const int64_t yr = static_cast<int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp + (mp < 10 ? 3 : -9);
  y = static_cast<int>(yr + (m <= 2));
}

}  // namespace

std::string Date::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
  return buf;
}

int64_t Date::serial() const {
  return days_from_civil(year, static_cast<unsigned>(month),
                         static_cast<unsigned>(day));
}

int Date::weekday() const {
  // 1970-01-01 was a Thursday (weekday 4).
  int64_t s = serial();
  return static_cast<int>(((s % 7) + 7 + 4) % 7);
}

bool Date::is_weekday() const {
  int wd = weekday();
  return wd >= 1 && wd <= 5;
}

Date Date::next_day() const { return from_serial(serial() + 1); }

Date Date::next_weekday() const {
  Date d = next_day();
  while (!d.is_weekday()) d = d.next_day();
  return d;
}

Date Date::from_serial(int64_t days) {
  int y;
  unsigned m, d;
  civil_from_days(days, y, m, d);
  return Date{y, static_cast<int>(m), static_cast<int>(d)};
}

Date Date::parse(const std::string& iso) {
  int y = 0, m = 0, d = 0;
  char tail = 0;
  if (std::sscanf(iso.c_str(), "%d-%d-%d%c", &y, &m, &d, &tail) != 3)
    throw ParseError("bad date '" + iso + "' (expected YYYY-MM-DD)");
  if (m < 1 || m > 12 || d < 1 || d > 31)
    throw ParseError("out-of-range date '" + iso + "'");
  Date out{y, m, d};
  // Round-trip through the serial to reject things like Feb 30.
  if (Date::from_serial(out.serial()) != out)
    throw ParseError("invalid calendar date '" + iso + "'");
  return out;
}

}  // namespace csm

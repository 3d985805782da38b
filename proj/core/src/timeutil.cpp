#include <chaos/timeutil.hpp>

#include <chrono>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace chaos {

namespace {
constexpr std::int64_t kDay = 86400;

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}
}  // namespace

std::int64_t day_index(Timestamp t) { return floor_div(t, kDay); }

std::string format_statement_time(Timestamp t) {
  using namespace std::chrono;
  const auto days = day_index(t);
  const auto secs = t - days * kDay;
  const year_month_day ymd{sys_days{std::chrono::days{days}}};
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d.%02u.%02u %02lld:%02lld", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<long long>(secs / 3600), static_cast<long long>((secs % 3600) / 60));
  return buf;
}

Timestamp parse_statement_time(std::string_view text) {
  int y = 0;
  unsigned mo = 0, d = 0, h = 0, mi = 0;
  const std::string s(text);
  char tail = 0;
  if (std::sscanf(s.c_str(), "%4d.%2u.%2u %2u:%2u%c", &y, &mo, &d, &h, &mi, &tail) != 5 || h > 23 || mi > 59) {
    throw std::invalid_argument("bad statement time: " + s);
  }
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{mo}, day{d}};
  if (!ymd.ok()) throw std::invalid_argument("bad statement date: " + s);
  const auto days = sys_days{ymd}.time_since_epoch().count();
  return static_cast<Timestamp>(days) * kDay + static_cast<Timestamp>(h) * 3600 + static_cast<Timestamp>(mi) * 60;
}

}  // namespace chaos

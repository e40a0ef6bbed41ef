#include "hahnfit/epoch.hpp"

#include "hahnfit/error.hpp"

#include <cmath>
#include <cstdio>

namespace hahnfit {

namespace {

using namespace std::chrono;

constexpr sys_days kGpsEpoch = sys_days{year{1980} / January / 6};
constexpr sys_days kMjdEpoch = sys_days{year{1858} / November / 17};

}  // namespace

Epoch make_epoch(int y, int mo, int d, int h, int mi, double s) {
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h < 0 || h > 23 || mi < 0 || mi > 59 || s < 0 || s >= 61)
    fail(ErrorCode::InvalidArgument, "invalid calendar epoch");
  return time_point_cast<milliseconds>(sys_days{ymd}) + hours{h} + minutes{mi} +
         milliseconds{std::llround(s * 1000.0)};
}

CivilTime to_civil(Epoch epoch) {
  const sys_days days = floor<std::chrono::days>(epoch);
  const year_month_day ymd{days};
  const hh_mm_ss<milliseconds> tod{epoch - days};
  CivilTime c;
  c.year = static_cast<int>(ymd.year());
  c.month = static_cast<int>(static_cast<unsigned>(ymd.month()));
  c.day = static_cast<int>(static_cast<unsigned>(ymd.day()));
  c.hour = static_cast<int>(tod.hours().count());
  c.minute = static_cast<int>(tod.minutes().count());
  c.second = static_cast<double>(tod.seconds().count()) + tod.subseconds().count() / 1000.0;
  return c;
}

std::string format_epoch(Epoch epoch) {
  const CivilTime c = to_civil(epoch);
  const long ms = std::lround(c.second * 1000.0) % 1000;
  char buf[48];
  if (ms == 0)
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d", c.year, c.month, c.day, c.hour, c.minute,
                  static_cast<int>(c.second));
  else
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03ld", c.year, c.month, c.day, c.hour, c.minute,
                  static_cast<int>(c.second), ms);
  return buf;
}

Epoch parse_epoch(std::string_view text) {
  int y = 0, mo = 0, d = 0, h = 0, mi = 0;
  double s = 0;
  const std::string t(text);
  char sep = 'T';
  const int n = std::sscanf(t.c_str(), "%d-%d-%d%c%d:%d:%lf", &y, &mo, &d, &sep, &h, &mi, &s);
  if (!(n == 3 || n >= 6) || (n >= 4 && sep != 'T' && sep != ' '))
    fail(ErrorCode::InvalidArgument, "cannot parse epoch '" + t + "' (expected YYYY-MM-DD[THH:MM[:SS]])");
  return make_epoch(y, mo, d, h, mi, s);
}

bool is_midnight(Epoch epoch) { return epoch == floor<days>(epoch); }

int gps_week(Epoch epoch) { return static_cast<int>(floor<weeks>(epoch - kGpsEpoch).count()); }

double gps_seconds_of_week(Epoch epoch) {
  const auto since = epoch - kGpsEpoch;
  return duration<double>(since - floor<weeks>(since)).count();
}

int modified_julian_day(Epoch epoch) { return static_cast<int>(floor<days>(epoch - kMjdEpoch).count()); }

double fraction_of_day(Epoch epoch) { return duration<double, days::period>(epoch - floor<days>(epoch)).count(); }

}  // namespace hahnfit

#include "esadrnn/calendar.hpp"

#include <chrono>
#include <cstdio>

#include "esadrnn/errors.hpp"

namespace esadrnn {

namespace chr = std::chrono;

namespace {

chr::sys_days sys_days_of(const CivilDate& d) {
  return chr::sys_days(chr::year(d.year) / d.month / d.day);
}

// 53-week ISO years are those where January 1st falls on a Thursday, or
// on a Wednesday in a leap year.
int weeks_in_iso_year(int y) {
  auto p = [](int year) {
    return (year + year / 4 - year / 100 + year / 400) % 7;
  };
  return 52 + ((p(y) == 4 || p(y - 1) == 3) ? 1 : 0);
}

}  // namespace

int64_t hours_from_civil(const CivilDate& d, int hour_of_day) {
  chr::year_month_day ymd = chr::year(d.year) / d.month / d.day;
  if (!ymd.ok())
    throw DataError("invalid calendar date " + std::to_string(d.year) + "-" +
                    std::to_string(d.month) + "-" + std::to_string(d.day));
  int64_t days = chr::sys_days(ymd).time_since_epoch().count();
  return days * 24 + hour_of_day;
}

CivilDate civil_from_hour(int64_t hour) {
  int64_t days = hour / 24;
  if (hour < 0 && hour % 24 != 0) --days;
  chr::year_month_day ymd{chr::sys_days(chr::days(days))};
  return CivilDate{int(ymd.year()), int(unsigned(ymd.month())),
                   int(unsigned(ymd.day()))};
}

int hour_of_day(int64_t hour) {
  int h = static_cast<int>(hour % 24);
  return h < 0 ? h + 24 : h;
}

int weekday_index(int64_t hour) {
  int64_t days = hour / 24;
  if (hour < 0 && hour % 24 != 0) --days;
  chr::weekday wd{chr::sys_days(chr::days(days))};
  return static_cast<int>(wd.iso_encoding()) - 1;
}

int iso_week(const CivilDate& d) {
  chr::sys_days sd = sys_days_of(d);
  chr::sys_days jan1 = chr::sys_days(chr::year(d.year) / 1 / 1);
  int doy = static_cast<int>((sd - jan1).count()) + 1;
  int dow = static_cast<int>(chr::weekday(sd).iso_encoding());
  int w = (doy - dow + 10) / 7;
  if (w < 1) return weeks_in_iso_year(d.year - 1);
  if (w > weeks_in_iso_year(d.year)) return 1;
  return w;
}

int64_t parse_timestamp(const std::string& text) {
  int y = 0, mo = 0, da = 0, hh = 0, mi = 0, se = 0;
  char sep = 0;
  int got = std::sscanf(text.c_str(), "%d-%d-%d%c%d:%d:%d", &y, &mo, &da, &sep,
                        &hh, &mi, &se);
  if (got < 6 || (sep != 'T' && sep != ' '))
    throw DataError("unparseable timestamp '" + text + "'");
  if (mi != 0 || se != 0)
    throw DataError("timestamp '" + text + "' is not on a whole hour");
  if (hh < 0 || hh > 23)
    throw DataError("timestamp '" + text + "' has hour out of range");
  return hours_from_civil(CivilDate{y, mo, da}, hh);
}

int64_t parse_date_or_timestamp(const std::string& text) {
  if (text.find(':') != std::string::npos) return parse_timestamp(text);
  int y = 0, mo = 0, da = 0;
  if (std::sscanf(text.c_str(), "%d-%d-%d", &y, &mo, &da) != 3)
    throw DataError("unparseable date '" + text + "'");
  return hours_from_civil(CivilDate{y, mo, da}, 0);
}

std::string format_timestamp(int64_t hour) {
  CivilDate d = civil_from_hour(hour);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:00:00Z", d.year, d.month,
                d.day, hour_of_day(hour));
  return std::string(buf);
}

}  // namespace esadrnn

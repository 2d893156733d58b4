#pragma once

// Time is handled as whole hours since the Unix epoch, UTC. All date
// arithmetic goes through std::chrono's civil calendar.

#include <cstdint>
#include <string>

namespace esadrnn {

struct CivilDate {
  int year;
  int month;  // 1..12
  int day;    // 1..31
};

int64_t hours_from_civil(const CivilDate& d, int hour_of_day);
CivilDate civil_from_hour(int64_t hour);
int hour_of_day(int64_t hour);

// 0 = Monday ... 6 = Sunday, for the day containing the given hour.
int weekday_index(int64_t hour);

// ISO-8601 week number (1..53) of the given civil date.
int iso_week(const CivilDate& d);

// Accepts "YYYY-MM-DDTHH:MM[:SS][Z]" or "YYYY-MM-DD HH:MM[:SS]"; minutes
// and seconds must be zero since the data is hourly. Throws DataError.
int64_t parse_timestamp(const std::string& text);

// Accepts a bare date "YYYY-MM-DD" (midnight) or a full hourly timestamp.
int64_t parse_date_or_timestamp(const std::string& text);

std::string format_timestamp(int64_t hour);

}  // namespace esadrnn

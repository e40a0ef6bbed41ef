#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace hahnfit {

/// Epoch label in the time system of its source file (GPS time for IGS
/// products). No leap-second handling is applied anywhere.
using Epoch = std::chrono::sys_time<std::chrono::milliseconds>;

struct CivilTime {
  int year = 0, month = 0, day = 0, hour = 0, minute = 0;
  double second = 0.0;
};

Epoch make_epoch(int year, int month, int day, int hour = 0, int minute = 0, double second = 0.0);
CivilTime to_civil(Epoch epoch);

/// "YYYY-MM-DDTHH:MM:SS", with ".sss" appended when milliseconds are non-zero.
std::string format_epoch(Epoch epoch);

/// Accepts "YYYY-MM-DD", "YYYY-MM-DDTHH:MM" and "YYYY-MM-DDTHH:MM:SS[.fff]" ('T' or ' ').
Epoch parse_epoch(std::string_view text);

bool is_midnight(Epoch epoch);

int gps_week(Epoch epoch);
double gps_seconds_of_week(Epoch epoch);
int modified_julian_day(Epoch epoch);
double fraction_of_day(Epoch epoch);

}  // namespace hahnfit

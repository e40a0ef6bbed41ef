#pragma once

// Reader and writer for SP3-c / SP3-d precise ephemeris files (position
// records only; velocity and correlation records are skipped).

#include "hahnfit/epoch.hpp"

#include <array>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace hahnfit {

/// Where a value came from: index of the file in the caller's list and
/// 1-based line number.
struct LineSource {
  std::size_t file = std::numeric_limits<std::size_t>::max();
  std::size_t line = 0;

  bool valid() const noexcept { return file != std::numeric_limits<std::size_t>::max(); }
};

struct Sp3Header {
  char version = 'c';
  char content_flag = 'P';  ///< P (positions) or V (positions and velocities)
  Epoch start{};
  int epoch_count = 0;
  std::string data_used = "ORBIT";
  std::string coord_system = "IGS14";
  std::string orbit_type = "FIT";
  std::string agency = "IGS";
  int gps_week = 0;
  double seconds_of_week = 0.0;
  double interval_s = 900.0;
  int mjd = 0;
  double fraction_of_day = 0.0;
  std::vector<std::string> satellites;
  std::string file_type = "G";
  std::string time_system = "GPS";
};

struct Sp3Record {
  Epoch epoch{};
  std::string satellite;  ///< letter + 2 digits, e.g. G08
  std::array<double, 3> position_km{};
  double clock_us = 0.0;
  bool position_bad = false;  ///< all coordinates zero: the SP3 missing-position marker
  bool clock_bad = false;     ///< clock >= 999999: the SP3 bad-clock marker
  LineSource source;
};

struct ParseIssue {
  std::size_t line = 0;
  std::string message;
};

struct Sp3File {
  std::string name;
  Sp3Header header;
  std::vector<Sp3Record> records;
  std::vector<ParseIssue> issues;  ///< recoverable per-line problems
  std::vector<Epoch> epochs;       ///< epoch lines in file order
};

/// Parses a whole SP3 stream. Throws MalformedHeader, UnknownVersion or
/// MalformedEpochLine; damaged position lines are collected in issues.
Sp3File parse_sp3(std::istream& in, std::string name = {}, std::size_t file_index = 0);

Sp3File read_sp3_file(const std::filesystem::path& path, std::size_t file_index = 0);

/// Regular files in a directory whose names match the regex, sorted by name.
std::vector<std::filesystem::path> scan_sp3_directory(const std::filesystem::path& dir,
                                                      const std::string& name_regex = R"(.*\.(sp3|SP3)$)");

/// Reads every file found by scan_sp3_directory; file indices follow the sorted order.
std::vector<Sp3File> read_sp3_directory(const std::filesystem::path& dir,
                                        const std::string& name_regex = R"(.*\.(sp3|SP3)$)");

/// "P" record text: id, then x, y, z and clock as F14.6.
std::string format_position_line(const Sp3Record& record);

/// "*" epoch line.
std::string format_epoch_line(Epoch epoch);

/// Writes a complete file: header, one epoch block per distinct record epoch, EOF.
void write_sp3(std::ostream& out, const Sp3Header& header, const std::vector<Sp3Record>& records,
               const std::vector<std::string>& comments = {});

bool is_valid_satellite_id(const std::string& id);

}  // namespace hahnfit

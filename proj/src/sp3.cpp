#include "hahnfit/sp3.hpp"

#include "hahnfit/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <regex>

namespace hahnfit {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

// Fixed-width column slice [first, first + width), empty past the end of line.
std::string_view column(std::string_view line, std::size_t first, std::size_t width) {
  if (first >= line.size()) return {};
  return line.substr(first, std::min(width, line.size() - first));
}

std::optional<double> to_double(std::string_view field) {
  const std::string t = trim(field);
  if (t.empty()) return std::nullopt;
  double v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) return std::nullopt;
  return v;
}

std::optional<int> to_int(std::string_view field) {
  const std::string t = trim(field);
  if (t.empty()) return std::nullopt;
  int v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) return std::nullopt;
  return v;
}

// Old files write "P  1" or "PG 1"; both normalize to G01.
std::string normalize_satellite(std::string_view raw) {
  std::string id(raw);
  if (id.size() != 3) return id;
  if (id[0] == ' ') id[0] = 'G';
  if (id[1] == ' ') id[1] = '0';
  return id;
}

std::optional<Epoch> parse_epoch_fields(std::string_view line) {
  const auto y = to_int(column(line, 3, 4));
  const auto mo = to_int(column(line, 8, 2));
  const auto d = to_int(column(line, 11, 2));
  const auto h = to_int(column(line, 14, 2));
  const auto mi = to_int(column(line, 17, 2));
  const auto s = to_double(column(line, 20, 11));
  if (!y || !mo || !d || !h || !mi || !s) return std::nullopt;
  try {
    return make_epoch(*y, *mo, *d, *h, *mi, *s);
  } catch (const Error&) {
    return std::nullopt;
  }
}

void parse_first_line(std::string_view line, Sp3Header& h) {
  if (line.size() < 2 || line[0] != '#') fail(ErrorCode::MalformedHeader, "SP3 file must start with a '#' line");
  h.version = line[1];
  if (h.version != 'c' && h.version != 'd')
    fail(ErrorCode::UnknownVersion, std::string("unsupported SP3 version '") + h.version + "' (need c or d)");
  h.content_flag = line.size() > 2 ? line[2] : 'P';
  const auto start = parse_epoch_fields(line);
  const auto count = to_int(column(line, 32, 7));
  if (!start || !count) fail(ErrorCode::MalformedHeader, "SP3 first header line has a bad start epoch or epoch count");
  h.start = *start;
  h.epoch_count = *count;
  h.data_used = trim(column(line, 40, 5));
  h.coord_system = trim(column(line, 46, 5));
  h.orbit_type = trim(column(line, 52, 3));
  h.agency = trim(column(line, 56, 4));
}

void parse_second_line(std::string_view line, Sp3Header& h) {
  if (line.substr(0, 2) != "##") fail(ErrorCode::MalformedHeader, "SP3 second header line must start with '##'");
  const auto week = to_int(column(line, 3, 4));
  const auto sow = to_double(column(line, 8, 15));
  const auto interval = to_double(column(line, 24, 14));
  const auto mjd = to_int(column(line, 39, 5));
  const auto frac = to_double(column(line, 45, 15));
  if (!week || !sow || !interval || !mjd || !frac || !(*interval > 0))
    fail(ErrorCode::MalformedHeader, "SP3 '##' line has malformed week, interval or MJD fields");
  h.gps_week = *week;
  h.seconds_of_week = *sow;
  h.interval_s = *interval;
  h.mjd = *mjd;
  h.fraction_of_day = *frac;
}

}  // namespace

bool is_valid_satellite_id(const std::string& id) {
  return id.size() == 3 && std::isupper(static_cast<unsigned char>(id[0])) &&
         std::isdigit(static_cast<unsigned char>(id[1])) && std::isdigit(static_cast<unsigned char>(id[2]));
}

Sp3File parse_sp3(std::istream& in, std::string name, std::size_t file_index) {
  Sp3File file;
  file.name = std::move(name);
  std::string line;
  std::size_t line_no = 0;
  auto next = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };

  if (!next()) fail(ErrorCode::MalformedHeader, "empty SP3 input");
  parse_first_line(line, file.header);
  if (!next()) fail(ErrorCode::MalformedHeader, "SP3 input ends after the first header line");
  parse_second_line(line, file.header);

  int declared_sats = -1;
  bool in_header = true;
  std::optional<Epoch> current;
  bool first_percent_c = true;
  while (next()) {
    if (line.empty()) continue;
    if (in_header) {
      if (line.rfind("++", 0) == 0) continue;
      if (line[0] == '+') {
        if (declared_sats < 0) {
          const auto n = to_int(column(line, 1, 5));
          if (!n || *n < 0) fail(ErrorCode::MalformedHeader, "SP3 '+' line has no satellite count");
          declared_sats = *n;
        }
        for (std::size_t c = 9; c + 3 <= line.size(); c += 3) {
          if (static_cast<int>(file.header.satellites.size()) >= declared_sats) break;
          const std::string id = normalize_satellite(line.substr(c, 3));
          if (trim(id).empty() || trim(id) == "0" || id == "000" || id == "G00") continue;
          file.header.satellites.push_back(id);
        }
        continue;
      }
      if (line.rfind("%c", 0) == 0) {
        if (first_percent_c) {
          file.header.file_type = trim(column(line, 3, 2));
          file.header.time_system = trim(column(line, 9, 3));
          first_percent_c = false;
        }
        continue;
      }
      if (line.rfind("%f", 0) == 0 || line.rfind("%i", 0) == 0 || line.rfind("/*", 0) == 0) continue;
      if (line[0] == '*') {
        in_header = false;
        if (declared_sats < 0) fail(ErrorCode::MalformedHeader, "SP3 header has no '+' satellite lines");
        if (static_cast<int>(file.header.satellites.size()) != declared_sats)
          file.issues.push_back({line_no, "header lists " + std::to_string(file.header.satellites.size()) +
                                              " satellites but declares " + std::to_string(declared_sats)});
      } else {
        file.issues.push_back({line_no, "unrecognized header line"});
        continue;
      }
    }

    if (line.rfind("EOF", 0) == 0) break;
    switch (line[0]) {
      case '*': {
        current = parse_epoch_fields(line);
        if (!current)
          fail(ErrorCode::MalformedEpochLine, file.name + ":" + std::to_string(line_no) + ": malformed epoch line");
        file.epochs.push_back(*current);
        break;
      }
      case 'P': {
        if (!current) {
          file.issues.push_back({line_no, "position record before any epoch line"});
          break;
        }
        Sp3Record rec;
        rec.epoch = *current;
        rec.satellite = normalize_satellite(column(line, 1, 3));
        const auto x = to_double(column(line, 4, 14));
        const auto y = to_double(column(line, 18, 14));
        const auto z = to_double(column(line, 32, 14));
        if (!is_valid_satellite_id(rec.satellite) || !x || !y || !z) {
          file.issues.push_back({line_no, "malformed position record"});
          break;
        }
        rec.position_km = {*x, *y, *z};
        rec.position_bad = *x == 0.0 && *y == 0.0 && *z == 0.0;
        const auto clk = to_double(column(line, 46, 14));
        rec.clock_us = clk.value_or(999999.999999);
        rec.clock_bad = !clk || *clk >= 999999.0;
        rec.source = {file_index, line_no};
        file.records.push_back(std::move(rec));
        break;
      }
      case 'V':
      case 'E':
        break;  // velocities and correlation records
      default:
        file.issues.push_back({line_no, "unrecognized data line"});
    }
  }
  if (in_header) fail(ErrorCode::MalformedHeader, "SP3 input has no epoch records");
  if (static_cast<int>(file.epochs.size()) != file.header.epoch_count)
    file.issues.push_back({0, "header declares " + std::to_string(file.header.epoch_count) + " epochs, found " +
                                  std::to_string(file.epochs.size())});
  return file;
}

Sp3File read_sp3_file(const std::filesystem::path& path, std::size_t file_index) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
  return parse_sp3(in, path.filename().string(), file_index);
}

std::vector<std::filesystem::path> scan_sp3_directory(const std::filesystem::path& dir, const std::string& name_regex) {
  if (!std::filesystem::is_directory(dir)) fail(ErrorCode::Io, dir.string() + " is not a directory");
  const std::regex re(name_regex);
  std::vector<std::filesystem::path> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && std::regex_match(entry.path().filename().string(), re)) out.push_back(entry.path());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Sp3File> read_sp3_directory(const std::filesystem::path& dir, const std::string& name_regex) {
  std::vector<Sp3File> files;
  const auto paths = scan_sp3_directory(dir, name_regex);
  for (std::size_t i = 0; i < paths.size(); ++i) files.push_back(read_sp3_file(paths[i], i));
  return files;
}

std::string format_position_line(const Sp3Record& r) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "P%3s%14.6f%14.6f%14.6f%14.6f", r.satellite.c_str(), r.position_km[0],
                r.position_km[1], r.position_km[2], r.clock_us);
  return buf;
}

std::string format_epoch_line(Epoch epoch) {
  const CivilTime c = to_civil(epoch);
  char buf[64];
  std::snprintf(buf, sizeof buf, "*  %4d %2d %2d %2d %2d %11.8f", c.year, c.month, c.day, c.hour, c.minute, c.second);
  return buf;
}

void write_sp3(std::ostream& out, const Sp3Header& h, const std::vector<Sp3Record>& records,
               const std::vector<std::string>& comments) {
  std::map<Epoch, std::vector<const Sp3Record*>> by_epoch;
  for (const auto& r : records) by_epoch[r.epoch].push_back(&r);

  const CivilTime c = to_civil(h.start);
  char buf[128];
  std::snprintf(buf, sizeof buf, "#%c%c%4d %2d %2d %2d %2d %11.8f %7d %-5s %-5s %-3s %-4s", h.version, h.content_flag,
                c.year, c.month, c.day, c.hour, c.minute, c.second, static_cast<int>(by_epoch.size()),
                h.data_used.c_str(), h.coord_system.c_str(), h.orbit_type.c_str(), h.agency.c_str());
  out << buf << '\n';
  std::snprintf(buf, sizeof buf, "## %4d %15.8f %14.8f %5d %15.13f", gps_week(h.start), gps_seconds_of_week(h.start),
                h.interval_s, modified_julian_day(h.start), fraction_of_day(h.start));
  out << buf << '\n';

  const std::size_t nsat = h.satellites.size();
  const std::size_t sat_lines = std::max<std::size_t>(5, (nsat + 16) / 17);
  for (std::size_t l = 0; l < sat_lines; ++l) {
    std::string row = l == 0 ? "+  " : "+     ";
    if (l == 0) {
      std::snprintf(buf, sizeof buf, "%3d   ", static_cast<int>(nsat));
      row += buf;
    } else {
      row += "   ";
    }
    for (std::size_t k = 0; k < 17; ++k) {
      const std::size_t i = l * 17 + k;
      row += i < nsat ? h.satellites[i] : std::string("  0");
    }
    out << row << '\n';
  }
  for (std::size_t l = 0; l < sat_lines; ++l) {
    std::string row = "++       ";
    for (std::size_t k = 0; k < 17; ++k) row += l * 17 + k < nsat ? "  2" : "  0";
    out << row << '\n';
  }
  std::snprintf(buf, sizeof buf, "%%c %-2s cc %-3s ccc cccc cccc cccc cccc ccccc ccccc ccccc ccccc",
                h.file_type.c_str(), h.time_system.c_str());
  out << buf << '\n';
  out << "%c cc cc ccc ccc cccc cccc cccc cccc ccccc ccccc ccccc ccccc\n";
  out << "%f  1.2500000  1.025000000  0.00000000000  0.000000000000000\n";
  out << "%f  0.0000000  0.000000000  0.00000000000  0.000000000000000\n";
  out << "%i    0    0    0    0      0      0      0      0         0\n";
  out << "%i    0    0    0    0      0      0      0      0         0\n";
  for (std::size_t i = 0; i < std::max<std::size_t>(4, comments.size()); ++i)
    out << "/* " << (i < comments.size() ? comments[i] : std::string()) << '\n';
  for (const auto& [epoch, recs] : by_epoch) {
    out << format_epoch_line(epoch) << '\n';
    for (const auto* r : recs) out << format_position_line(*r) << '\n';
  }
  out << "EOF\n";
}

}  // namespace hahnfit

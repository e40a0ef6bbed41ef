#pragma once

// Synthetic test signals: unit step and impulse series, and an orbit-scale
// generator that writes daily SP3 files with optional injected anomalies.

#include "hahnfit/series.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <filesystem>

namespace hahnfit {

/// 0 before position, magnitude from position on.
Eigen::VectorXd jump_series(Index points, Index position, double magnitude = 1.0);

/// magnitude at position, 0 elsewhere.
Eigen::VectorXd outlier_series(Index points, Index position, double magnitude = 1.0);

/// Circular orbit seen in an Earth-fixed frame.
struct OrbitParams {
  double radius_km = 26560.0;
  double period_s = 11.967 * 3600.0;
  double inclination_deg = 55.0;
  double raan_deg = 0.0;
  double phase_deg = 0.0;
  double earth_rotation_s = 86164.0905;  ///< sidereal day
};

/// Orbit parameters for a satellite drawn from a seeded generator; the same
/// (seed, satellite) always gives the same orbit.
OrbitParams orbit_for(std::uint64_t seed, const std::string& satellite);

/// ECEF position in km, t seconds after the reference epoch.
std::array<double, 3> orbit_position(const OrbitParams& orbit, double t_seconds);

/// Nearest multiple of 1e-6 km (the SP3 print resolution).
double round_to_mm(double km);

enum class InjectionKind { jump, outlier };

struct Injection {
  InjectionKind kind = InjectionKind::jump;
  std::string satellite;
  Coordinate coordinate = Coordinate::x;
  Epoch epoch{};
  double magnitude_km = 0.0;  ///< a jump applies from epoch on
};

struct CorpusSpec {
  Epoch start = make_epoch(2024, 1, 7);
  int days = 10;
  std::vector<std::string> satellites{"G08"};
  std::uint64_t seed = 1;
  bool round_mm = true;
  std::chrono::milliseconds interval = std::chrono::seconds(900);
  std::vector<Injection> injections;
};

/// One file per day, each holding the epochs 00:00 .. 24:00 - interval.
std::vector<Sp3File> generate_corpus(const CorpusSpec& spec);

/// Signal of one satellite coordinate on the corpus grid, including injections.
Eigen::VectorXd corpus_values(const CorpusSpec& spec, const std::string& satellite, Coordinate coordinate);

nlohmann::json truth_json(const CorpusSpec& spec);

/// Writes the daily SP3 files and "truth.json" into dir; returns the SP3 paths.
std::vector<std::filesystem::path> write_corpus(const CorpusSpec& spec, const std::filesystem::path& dir);

/// Daily file name, e.g. syn22960.sp3 for GPS week 2296, day 0.
std::string corpus_file_name(Epoch day_start);

}  // namespace hahnfit

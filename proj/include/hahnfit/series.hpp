#pragma once

// Per-satellite, per-coordinate series on the nominal epoch grid, and
// analysis windows cut from them.
//
// Duplicate epochs (the same satellite and epoch in several files) are
// resolved as follows: usable records beat records flagged bad; among usable
// records the file with the later header start epoch wins, ties broken by the
// larger file name. Losing values stay available as shadows. The rule looks
// only at file contents, so the result does not depend on file order.

#include "hahnfit/lsq_fit.hpp"
#include "hahnfit/sp3.hpp"

#include <span>

namespace hahnfit {

enum class Coordinate { x, y, z };

std::string_view to_string(Coordinate c) noexcept;
Coordinate coordinate_from_string(std::string_view s);

struct ShadowValue {
  Index index = 0;  ///< grid index
  double value = 0.0;
  LineSource source;
};

struct SatelliteSeries {
  std::string satellite;
  Coordinate coordinate = Coordinate::x;
  std::chrono::milliseconds interval{900000};
  std::vector<Epoch> epochs;       ///< nominal grid
  Eigen::VectorXd values;          ///< kilometers, NaN at gaps
  std::vector<Index> gaps;         ///< grid indices without a usable value
  std::vector<LineSource> provenance;  ///< per grid index; invalid at gaps
  std::vector<ShadowValue> shadows;    ///< duplicate values that lost precedence
  std::vector<std::string> files;      ///< file names indexed by LineSource::file

  Index size() const noexcept { return static_cast<Index>(epochs.size()); }
  bool present(Index i) const { return !std::isnan(values[i]); }
};

/// Series on the grid start + i * interval, i = 0..n_points-1.
SatelliteSeries assemble_series(std::span<const Sp3File> files, const std::string& satellite, Coordinate coordinate,
                                Epoch start, Index n_points,
                                std::chrono::milliseconds interval = std::chrono::seconds(900));

/// Series spanning every epoch found for the satellite, on the interval of the first file.
SatelliteSeries assemble_series(std::span<const Sp3File> files, const std::string& satellite, Coordinate coordinate);

/// Satellites with at least one usable record, sorted.
std::vector<std::string> satellites_in(std::span<const Sp3File> files);

/// A window of a series: the present points with abscissas equal to grid
/// offsets from the window start. Missing points make the lattice perturbed.
struct Window {
  Index first = 0;  ///< grid index of the window start within the parent series
  Index length = 0; ///< nominal points
  std::vector<Index> present;  ///< grid indices (parent series) of the lattice points
  std::vector<Index> gaps;     ///< grid indices (parent series) omitted
  DataSeries data;
  std::vector<Epoch> epochs;   ///< epoch of each lattice point
};

Window make_window(const SatelliteSeries& series, Index first, Index length, double max_gap_fraction = 0.05);

/// n_days * (86400 s / interval) points starting at start_epoch.
Window assemble_window(std::span<const Sp3File> files, const std::string& satellite, Coordinate coordinate,
                       Epoch start_epoch, int n_days, double max_gap_fraction = 0.05,
                       std::chrono::milliseconds interval = std::chrono::seconds(900));

}  // namespace hahnfit

#include "hahnfit/series.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>

namespace hahnfit {

std::string_view to_string(Coordinate c) noexcept {
  switch (c) {
    case Coordinate::x: return "X";
    case Coordinate::y: return "Y";
    case Coordinate::z: return "Z";
  }
  return "?";
}

Coordinate coordinate_from_string(std::string_view s) {
  if (s == "X" || s == "x") return Coordinate::x;
  if (s == "Y" || s == "y") return Coordinate::y;
  if (s == "Z" || s == "z") return Coordinate::z;
  fail(ErrorCode::InvalidArgument, "coordinate must be X, Y or Z, got '" + std::string(s) + "'");
}

namespace {

struct Candidate {
  const Sp3Record* record;
  const Sp3File* file;
};

// True when a takes precedence over b.
bool wins(const Candidate& a, const Candidate& b) {
  if (a.record->position_bad != b.record->position_bad) return !a.record->position_bad;
  if (a.file->header.start != b.file->header.start) return a.file->header.start > b.file->header.start;
  if (a.file->name != b.file->name) return a.file->name > b.file->name;
  return a.record->source.line > b.record->source.line;
}

}  // namespace

SatelliteSeries assemble_series(std::span<const Sp3File> files, const std::string& satellite, Coordinate coordinate,
                                Epoch start, Index n_points, std::chrono::milliseconds interval) {
  if (n_points < 1) fail(ErrorCode::InvalidArgument, "series needs at least one point");
  if (interval.count() <= 0) fail(ErrorCode::InvalidArgument, "interval must be positive");
  const int axis = static_cast<int>(coordinate);

  SatelliteSeries s;
  s.satellite = satellite;
  s.coordinate = coordinate;
  s.interval = interval;
  s.epochs.resize(static_cast<std::size_t>(n_points));
  for (Index i = 0; i < n_points; ++i) s.epochs[static_cast<std::size_t>(i)] = start + i * interval;
  s.values = Eigen::VectorXd::Constant(n_points, std::numeric_limits<double>::quiet_NaN());
  s.provenance.assign(static_cast<std::size_t>(n_points), LineSource{});
  s.files.resize(files.size());

  std::vector<std::vector<Candidate>> candidates(static_cast<std::size_t>(n_points));
  for (const auto& f : files) {
    for (const auto& r : f.records) {
      if (r.satellite != satellite) continue;
      const auto offset = r.epoch - start;
      if (offset.count() < 0 || offset % interval != std::chrono::milliseconds(0)) continue;
      const Index i = offset / interval;
      if (i >= n_points) continue;
      candidates[static_cast<std::size_t>(i)].push_back({&r, &f});
    }
    if (!f.records.empty() && f.records.front().source.valid() && f.records.front().source.file < s.files.size())
      s.files[f.records.front().source.file] = f.name;
  }

  for (Index i = 0; i < n_points; ++i) {
    auto& c = candidates[static_cast<std::size_t>(i)];
    if (c.empty()) {
      s.gaps.push_back(i);
      continue;
    }
    std::sort(c.begin(), c.end(), [](const Candidate& a, const Candidate& b) { return wins(a, b); });
    const Sp3Record& best = *c.front().record;
    if (best.position_bad) {
      s.gaps.push_back(i);
      continue;
    }
    s.values[i] = best.position_km[static_cast<std::size_t>(axis)];
    s.provenance[static_cast<std::size_t>(i)] = best.source;
    for (std::size_t k = 1; k < c.size(); ++k)
      if (!c[k].record->position_bad)
        s.shadows.push_back({i, c[k].record->position_km[static_cast<std::size_t>(axis)], c[k].record->source});
  }
  return s;
}

SatelliteSeries assemble_series(std::span<const Sp3File> files, const std::string& satellite, Coordinate coordinate) {
  if (files.empty()) fail(ErrorCode::InvalidArgument, "no SP3 files given");
  std::optional<Epoch> lo, hi;
  for (const auto& f : files)
    for (const auto& r : f.records)
      if (r.satellite == satellite) {
        if (!lo || r.epoch < *lo) lo = r.epoch;
        if (!hi || r.epoch > *hi) hi = r.epoch;
      }
  if (!lo) fail(ErrorCode::InsufficientCoverage, "no records for satellite " + satellite);
  const auto interval = std::chrono::milliseconds(static_cast<long long>(std::llround(files.front().header.interval_s * 1000)));
  return assemble_series(files, satellite, coordinate, *lo, (*hi - *lo) / interval + 1, interval);
}

std::vector<std::string> satellites_in(std::span<const Sp3File> files) {
  std::set<std::string> ids;
  for (const auto& f : files)
    for (const auto& r : f.records)
      if (!r.position_bad) ids.insert(r.satellite);
  return {ids.begin(), ids.end()};
}

Window make_window(const SatelliteSeries& series, Index first, Index length, double max_gap_fraction) {
  if (length < 2) fail(ErrorCode::InvalidArgument, "window needs at least two points");
  if (first < 0 || first + length > series.size())
    fail(ErrorCode::InsufficientCoverage, "window [" + std::to_string(first) + ", " + std::to_string(first + length) +
                                              ") exceeds the series of " + std::to_string(series.size()) + " points");
  std::vector<Index> present, gaps;
  for (Index i = first; i < first + length; ++i) (series.present(i) ? present : gaps).push_back(i);
  const double missing = static_cast<double>(gaps.size()) / static_cast<double>(length);
  if (missing > max_gap_fraction || present.size() < 2)
    fail(ErrorCode::InsufficientCoverage, "window at " + format_epoch(series.epochs[static_cast<std::size_t>(first)]) +
                                              " misses " + std::to_string(gaps.size()) + " of " +
                                              std::to_string(length) + " epochs");
  Eigen::VectorXd x(static_cast<Index>(present.size())), v(static_cast<Index>(present.size()));
  std::vector<Epoch> epochs;
  epochs.reserve(present.size());
  for (std::size_t k = 0; k < present.size(); ++k) {
    x[static_cast<Index>(k)] = static_cast<double>(present[k] - first);
    v[static_cast<Index>(k)] = series.values[present[k]];
    epochs.push_back(series.epochs[static_cast<std::size_t>(present[k])]);
  }
  return Window{first, length, std::move(present), std::move(gaps), DataSeries(Lattice(std::move(x)), std::move(v), "km"),
                std::move(epochs)};
}

Window assemble_window(std::span<const Sp3File> files, const std::string& satellite, Coordinate coordinate,
                       Epoch start_epoch, int n_days, double max_gap_fraction, std::chrono::milliseconds interval) {
  if (n_days < 1) fail(ErrorCode::InvalidArgument, "window must span at least one day");
  if (std::chrono::milliseconds(std::chrono::hours(24)) % interval != std::chrono::milliseconds(0))
    fail(ErrorCode::InvalidArgument, "interval must divide one day");
  const Index per_day = std::chrono::milliseconds(std::chrono::hours(24)) / interval;
  const SatelliteSeries s = assemble_series(files, satellite, coordinate, start_epoch, per_day * n_days, interval);
  return make_window(s, 0, s.size(), max_gap_fraction);
}

}  // namespace hahnfit

#include "hahnfit/synth.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>

namespace hahnfit {

Eigen::VectorXd jump_series(Index points, Index position, double magnitude) {
  require(points >= 2, "series needs at least two points");
  require(position >= 0 && position < points, "jump position outside the series");
  Eigen::VectorXd v = Eigen::VectorXd::Zero(points);
  v.tail(points - position).setConstant(magnitude);
  return v;
}

Eigen::VectorXd outlier_series(Index points, Index position, double magnitude) {
  require(points >= 1, "series needs at least one point");
  require(position >= 0 && position < points, "outlier position outside the series");
  Eigen::VectorXd v = Eigen::VectorXd::Zero(points);
  v[position] = magnitude;
  return v;
}

OrbitParams orbit_for(std::uint64_t seed, const std::string& satellite) {
  std::uint64_t h = seed;
  for (const char c : satellite) h = h * 1099511628211ULL + static_cast<unsigned char>(c);
  std::mt19937_64 rng(h);
  // Raw 53-bit draws keep the stream identical across standard libraries.
  auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  OrbitParams o;
  o.raan_deg = 360.0 * uniform();
  o.phase_deg = 360.0 * uniform();
  return o;
}

std::array<double, 3> orbit_position(const OrbitParams& o, double t) {
  constexpr double deg = std::numbers::pi / 180.0;
  const double u = o.phase_deg * deg + 2.0 * std::numbers::pi * t / o.period_s;
  const double inc = o.inclination_deg * deg;
  const double raan = o.raan_deg * deg;
  const double xi = o.radius_km * (std::cos(u) * std::cos(raan) - std::sin(u) * std::cos(inc) * std::sin(raan));
  const double yi = o.radius_km * (std::cos(u) * std::sin(raan) + std::sin(u) * std::cos(inc) * std::cos(raan));
  const double zi = o.radius_km * std::sin(u) * std::sin(inc);
  const double theta = 2.0 * std::numbers::pi * t / o.earth_rotation_s;
  return {std::cos(theta) * xi + std::sin(theta) * yi, -std::sin(theta) * xi + std::cos(theta) * yi, zi};
}

double round_to_mm(double km) { return std::round(km * 1e6) / 1e6; }

namespace {

Index points_of(const CorpusSpec& spec) {
  require(spec.days >= 1, "corpus needs at least one day");
  require(spec.interval.count() > 0 && std::chrono::milliseconds(std::chrono::hours(24)) % spec.interval ==
                                           std::chrono::milliseconds(0),
          "interval must divide one day");
  return spec.days * (std::chrono::milliseconds(std::chrono::hours(24)) / spec.interval);
}

double value_at(const CorpusSpec& spec, const OrbitParams& orbit, const std::string& sat, Coordinate c, Epoch epoch) {
  const double t = std::chrono::duration<double>(epoch - spec.start).count();
  double v = orbit_position(orbit, t)[static_cast<std::size_t>(c)];
  for (const auto& inj : spec.injections) {
    if (inj.satellite != sat || inj.coordinate != c) continue;
    if ((inj.kind == InjectionKind::jump && epoch >= inj.epoch) ||
        (inj.kind == InjectionKind::outlier && epoch == inj.epoch))
      v += inj.magnitude_km;
  }
  return spec.round_mm ? round_to_mm(v) : v;
}

}  // namespace

Eigen::VectorXd corpus_values(const CorpusSpec& spec, const std::string& satellite, Coordinate coordinate) {
  const Index n = points_of(spec);
  const OrbitParams orbit = orbit_for(spec.seed, satellite);
  Eigen::VectorXd v(n);
  for (Index i = 0; i < n; ++i) v[i] = value_at(spec, orbit, satellite, coordinate, spec.start + i * spec.interval);
  return v;
}

std::vector<Sp3File> generate_corpus(const CorpusSpec& spec) {
  const Index per_day = points_of(spec) / spec.days;
  for (const auto& s : spec.satellites) require(is_valid_satellite_id(s), "bad satellite id '" + s + "'");
  std::vector<OrbitParams> orbits;
  for (const auto& s : spec.satellites) orbits.push_back(orbit_for(spec.seed, s));

  std::vector<Sp3File> files;
  for (int d = 0; d < spec.days; ++d) {
    Sp3File f;
    f.header.start = spec.start + std::chrono::days(d);
    f.name = corpus_file_name(f.header.start);
    f.header.epoch_count = static_cast<int>(per_day);
    f.header.interval_s = std::chrono::duration<double>(spec.interval).count();
    f.header.satellites = spec.satellites;
    f.header.gps_week = gps_week(f.header.start);
    f.header.seconds_of_week = gps_seconds_of_week(f.header.start);
    f.header.mjd = modified_julian_day(f.header.start);
    for (Index i = 0; i < per_day; ++i) {
      const Epoch e = f.header.start + i * spec.interval;
      f.epochs.push_back(e);
      for (std::size_t s = 0; s < spec.satellites.size(); ++s) {
        Sp3Record r;
        r.epoch = e;
        r.satellite = spec.satellites[s];
        for (int c = 0; c < 3; ++c)
          r.position_km[static_cast<std::size_t>(c)] =
              value_at(spec, orbits[s], spec.satellites[s], static_cast<Coordinate>(c), e);
        r.clock_us = 0.0;
        r.source = {static_cast<std::size_t>(d), 0};
        f.records.push_back(std::move(r));
      }
    }
    files.push_back(std::move(f));
  }
  return files;
}

nlohmann::json truth_json(const CorpusSpec& spec) {
  nlohmann::json inj = nlohmann::json::array();
  for (const auto& i : spec.injections)
    inj.push_back({{"kind", i.kind == InjectionKind::jump ? "jump" : "outlier"},
                   {"satellite", i.satellite},
                   {"coordinate", std::string(to_string(i.coordinate))},
                   {"epoch", format_epoch(i.epoch)},
                   {"magnitude_km", i.magnitude_km}});
  nlohmann::json sats = spec.satellites;
  return {{"start", format_epoch(spec.start)},
          {"days", spec.days},
          {"interval_s", std::chrono::duration<double>(spec.interval).count()},
          {"satellites", sats},
          {"seed", spec.seed},
          {"round_mm", spec.round_mm},
          {"injections", inj}};
}

std::string corpus_file_name(Epoch day_start) {
  const int dow = static_cast<int>(gps_seconds_of_week(day_start) / 86400.0);
  char buf[32];
  std::snprintf(buf, sizeof buf, "syn%04d%d.sp3", gps_week(day_start), dow);
  return buf;
}

std::vector<std::filesystem::path> write_corpus(const CorpusSpec& spec, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> paths;
  for (const auto& f : generate_corpus(spec)) {
    const auto path = dir / f.name;
    std::ofstream out(path);
    if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
    write_sp3(out, f.header, f.records, {"synthetic circular orbit, seed " + std::to_string(spec.seed)});
    paths.push_back(path);
  }
  std::ofstream truth(dir / "truth.json");
  if (!truth) fail(ErrorCode::Io, "cannot write " + (dir / "truth.json").string());
  truth << truth_json(spec).dump(2) << '\n';
  return paths;
}

}  // namespace hahnfit

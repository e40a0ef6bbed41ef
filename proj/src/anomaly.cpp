#include "hahnfit/anomaly.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>

namespace hahnfit {

void DetectorConfig::validate() const {
  require(window_points >= 3, "window must have at least 3 points");
  require(degree >= 0 && degree < window_points, "degree must satisfy 0 <= degree < window points");
  require(step_points >= 1, "step must be at least 1 point");
  require(boundary_mask_points >= 0, "mask must be non-negative");
  require(2 * boundary_mask_points < window_points, "mask covers the whole window");
  require(spike_threshold_factor > 0, "spike threshold factor must be positive");
  require(min_leverage >= 0 && min_leverage < 1, "min leverage must lie in [0, 1)");
  require(max_gap_fraction >= 0 && max_gap_fraction < 1, "max gap fraction must lie in [0, 1)");
  require(max_events_per_window >= 1, "max events per window must be at least 1");
  require(orth_tol > 0, "orth_tol must be positive");
  require(threads >= 0, "threads must be non-negative");
}

nlohmann::json to_json(const DetectorConfig& c) {
  return {{"window_points", c.window_points},
          {"degree", c.degree},
          {"step_points", c.step_points},
          {"spike_threshold_factor", c.spike_threshold_factor},
          {"boundary_mask_points", c.boundary_mask_points},
          {"min_leverage", c.min_leverage},
          {"sigma_floor_rel", c.sigma_floor_rel},
          {"noise_ceiling_rel", c.noise_ceiling_rel},
          {"shape_correlation_min", c.shape_correlation_min},
          {"maneuver_floor_km", c.maneuver_floor_km},
          {"anomalous_jump_floor_km", c.anomalous_jump_floor_km},
          {"max_gap_fraction", c.max_gap_fraction},
          {"max_events_per_window", c.max_events_per_window},
          {"orth_tol", c.orth_tol},
          {"threads", c.threads}};
}

namespace {

BasisCache& calibration_cache() {
  static BasisCache cache;
  return cache;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double hi = v[mid];
  if (v.size() % 2) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

constexpr Index kCorrelationHalfWidth = 5;

double local_correlation(const Eigen::VectorXd& r, const Eigen::VectorXd& t, Index p) {
  const Index lo = std::max<Index>(0, p - kCorrelationHalfWidth);
  const Index hi = std::min<Index>(r.size() - 1, p + kCorrelationHalfWidth);
  const auto rs = r.segment(lo, hi - lo + 1);
  const auto ts = t.segment(lo, hi - lo + 1);
  const double den = rs.norm() * ts.norm();
  return den > 0 ? std::abs(rs.dot(ts)) / den : 0.0;
}

}  // namespace

std::shared_ptr<const Calibration> calibrate_templates(Index window_points, Index degree) {
  require(window_points >= 3, "calibration window must have at least 3 points");
  require(degree >= 0 && degree < window_points, "calibration degree must satisfy 0 <= degree < window points");
  static std::mutex mutex;
  static std::map<std::pair<Index, Index>, std::shared_ptr<const Calibration>> done;
  {
    std::lock_guard lock(mutex);
    if (auto it = done.find({window_points, degree}); it != done.end()) return it->second;
  }

  const Lattice lattice = Lattice::equidistant(window_points);
  const auto basis = calibration_cache().get(lattice, degree);
  auto cal = std::make_shared<Calibration>();
  cal->window_points = window_points;
  cal->degree = degree;
  cal->position = static_cast<Index>(std::lround(0.4 * static_cast<double>(window_points - 1)));
  const Index p = cal->position;

  Eigen::VectorXd step = Eigen::VectorXd::Zero(window_points);
  step.tail(window_points - p).setOnes();
  Eigen::VectorXd impulse = Eigen::VectorXd::Zero(window_points);
  impulse[p] = 1.0;
  cal->jump_template = detrend(*basis, DataSeries(lattice, step), degree).residue;
  cal->outlier_template = detrend(*basis, DataSeries(lattice, impulse), degree).residue;
  cal->jump_spike_ratio = 0.5 * (cal->jump_template[p] - cal->jump_template[p - 1]);
  cal->outlier_recovery_ratio =
      cal->outlier_template[p] - 0.5 * (cal->outlier_template[p - 1] + cal->outlier_template[p + 1]);

  std::lock_guard lock(mutex);
  return done.emplace(std::make_pair(window_points, degree), std::move(cal)).first->second;
}

Eigen::VectorXd WindowModel::jump_template(Index p) const {
  const auto Q = basis->values.leftCols(degree + 1);
  Eigen::VectorXd s = Eigen::VectorXd::Zero(size());
  s.tail(size() - p).setOnes();
  const Eigen::VectorXd c = Q.transpose() * s;
  return s - Q * c;
}

Eigen::VectorXd WindowModel::outlier_template(Index p) const {
  const auto Q = basis->values.leftCols(degree + 1);
  Eigen::VectorXd t = -(Q * Q.row(p).transpose());
  t[p] += 1.0;
  return t;
}

WindowModel make_window_model(std::shared_ptr<const Basis> basis, const DetectorConfig& config) {
  require(basis != nullptr, "window model needs a basis");
  require(config.degree <= basis->max_degree(), "basis degree is below the detector degree");
  WindowModel m;
  m.degree = config.degree;
  const Index n = basis->values.rows();
  m.leverage = (1.0 - basis->values.leftCols(config.degree + 1).rowwise().squaredNorm().array()).cwiseMax(0.0);
  m.masked.assign(static_cast<std::size_t>(n), false);
  const double x0 = basis->lattice[0];
  const double xN = basis->lattice[n - 1];
  const double mask = static_cast<double>(config.boundary_mask_points);
  for (Index j = 0; j < n; ++j) {
    const double x = basis->lattice[j];
    m.masked[static_cast<std::size_t>(j)] = x - x0 < mask || xN - x < mask || m.leverage[j] < config.min_leverage;
  }
  m.basis = std::move(basis);
  return m;
}

ScanResult scan_residue(const WindowModel& model, const Eigen::VectorXd& residue, const DetectorConfig& config,
                        double sigma_floor, double noise_ceiling) {
  require(residue.size() == model.size(), "residue length does not match the window model");
  std::vector<double> z;
  std::vector<Index> idx;
  for (Index j = 0; j < residue.size(); ++j) {
    if (model.masked[static_cast<std::size_t>(j)]) continue;
    z.push_back(residue[j] / std::sqrt(model.leverage[j]));
    idx.push_back(j);
  }
  ScanResult out;
  if (z.empty()) return out;
  const double med = median(z);
  std::vector<double> dev(z.size());
  for (std::size_t k = 0; k < z.size(); ++k) dev[k] = std::abs(z[k] - med);
  out.sigma = std::max(1.4826 * median(dev), sigma_floor);
  if (noise_ceiling > 0 && out.sigma > noise_ceiling) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "robust residue scale %.3g exceeds the ceiling %.3g", out.sigma, noise_ceiling);
    fail(ErrorCode::WindowTooNoisy, buf);
  }
  if (!(out.sigma > 0)) return out;

  const double limit = config.spike_threshold_factor * out.sigma;
  SpikeCluster current;
  auto flush = [&] {
    if (!current.indices.empty()) out.clusters.push_back(std::move(current));
    current = {};
  };
  for (std::size_t k = 0; k < z.size(); ++k) {
    const double az = std::abs(z[k]);
    if (!(az > limit)) continue;
    if (!current.indices.empty() && idx[k] - current.indices.back() > 2) flush();
    current.indices.push_back(idx[k]);
    current.peak_z = std::max(current.peak_z, az / out.sigma);
  }
  flush();
  std::stable_sort(out.clusters.begin(), out.clusters.end(),
                   [](const SpikeCluster& a, const SpikeCluster& b) { return a.peak_z > b.peak_z; });
  return out;
}

ScanResult scan_residue_scaled(const WindowModel& model, const Eigen::VectorXd& residue, const DetectorConfig& config,
                               double series_scale) {
  return scan_residue(model, residue, config, config.sigma_floor_rel * series_scale,
                      config.noise_ceiling_rel * series_scale);
}

std::string_view to_string(PatternKind kind) noexcept {
  switch (kind) {
    case PatternKind::jump: return "jump";
    case PatternKind::outlier: return "outlier";
    case PatternKind::maneuver_like: return "maneuver-like";
    case PatternKind::unclassified: return "unclassified";
  }
  return "?";
}

Classification classify_pattern(const WindowModel& model, const Eigen::VectorXd& residue, const SpikeCluster& cluster,
                                const DetectorConfig& config, double sigma) {
  require(residue.size() == model.size(), "residue length does not match the window model");
  Classification best;
  if (cluster.indices.empty()) return best;
  const Index n = model.size();
  const Index lo = std::max<Index>(0, cluster.indices.front() - 1);
  const Index hi = std::min<Index>(n - 1, cluster.indices.back() + 1);

  double best_energy = -1.0;
  Eigen::VectorXd best_template;
  for (Index p = lo; p <= hi; ++p) {
    for (const PatternKind kind : {PatternKind::jump, PatternKind::outlier}) {
      if (kind == PatternKind::jump && p == 0) continue;
      const Eigen::VectorXd t = kind == PatternKind::jump ? model.jump_template(p) : model.outlier_template(p);
      const double tt = t.squaredNorm();
      if (!(tt > 1e-12)) continue;  // invisible at this degree
      const double rt = residue.dot(t);
      const double energy = rt * rt / tt;
      if (energy > best_energy) {
        best_energy = energy;
        best.kind = kind;
        best.position = p;
        best.amplitude = rt / tt;
        best_template = t;
      }
    }
  }

  Index peak = cluster.indices.front();
  for (const Index j : cluster.indices)
    if (std::abs(residue[j]) > std::abs(residue[peak])) peak = j;

  if (best_energy < 0) {
    best = {};
    best.position = peak;
  } else {
    best.correlation = local_correlation(residue, best_template, best.position);
    best.snr = sigma > 0 ? std::abs(best.amplitude) * best_template.norm() / sigma : 0.0;
    best.magnitude = std::abs(best.amplitude);
    best.fitted = best.amplitude * best_template;
  }
  if (best_energy < 0 || best.correlation < config.shape_correlation_min) {
    const double peak_abs = std::abs(residue[peak]);
    best.kind = peak_abs > config.maneuver_floor_km ? PatternKind::maneuver_like : PatternKind::unclassified;
    best.position = peak;
    best.amplitude = residue[peak];
    best.magnitude = peak_abs;
    best.fitted = Eigen::VectorXd::Zero(n);
  }
  return best;
}

std::string_view to_string(EventKind kind) noexcept {
  switch (kind) {
    case EventKind::day_boundary_jump: return "day-boundary-jump";
    case EventKind::anomalous_jump: return "anomalous-jump";
    case EventKind::outlier: return "outlier";
    case EventKind::maneuver_like: return "maneuver-like";
    case EventKind::unclassified: return "unclassified";
  }
  return "?";
}

EventKind event_kind_from_string(std::string_view s) {
  for (const EventKind k : {EventKind::day_boundary_jump, EventKind::anomalous_jump, EventKind::outlier,
                            EventKind::maneuver_like, EventKind::unclassified})
    if (to_string(k) == s) return k;
  fail(ErrorCode::InvalidArgument, "unknown event kind '" + std::string(s) + "'");
}

EventKind resolve_kind(PatternKind pattern, Epoch epoch, double magnitude_km, const DetectorConfig& config) {
  switch (pattern) {
    case PatternKind::jump:
      return is_midnight(epoch) && magnitude_km <= config.anomalous_jump_floor_km ? EventKind::day_boundary_jump
                                                                                  : EventKind::anomalous_jump;
    case PatternKind::outlier: return EventKind::outlier;
    case PatternKind::maneuver_like: return EventKind::maneuver_like;
    case PatternKind::unclassified: return EventKind::unclassified;
  }
  return EventKind::unclassified;
}

WindowReport analyze_window(const SatelliteSeries& series, Index first, BasisCache& cache,
                            const DetectorConfig& config) {
  WindowReport report;
  report.first = first;
  report.start = series.epochs.at(static_cast<std::size_t>(first));
  const Window w = make_window(series, first, config.window_points, config.max_gap_fraction);
  report.points = w.data.lattice.size();
  WindowModel model = make_window_model(cache.get(w.data.lattice, config.degree, config.orth_tol), config);
  const std::vector<bool> edge_mask = model.masked;
  Eigen::VectorXd r = detrend(*model.basis, w.data, config.degree).residue;
  const double scale = series_scaling(w.data.values).scale;

  const Index n = r.size();
  double interior = 0.0, edge = 0.0;
  for (Index j = 0; j < n; ++j) {
    if (j < 3 || j >= n - 3) edge = std::max(edge, std::abs(r[j]));
    if (!model.masked[static_cast<std::size_t>(j)]) interior = std::max(interior, std::abs(r[j]));
  }
  report.edge_ratio = interior > 0 ? edge / interior : 0.0;

  // The noise ceiling is checked once the explained anomalies are removed:
  // the ringing of a large jump inflates the MAD until it is subtracted.
  const double floor = config.sigma_floor_rel * scale;
  for (int round = 0; round < config.max_events_per_window; ++round) {
    const ScanResult scan = scan_residue(model, r, config, floor);
    if (scan.clusters.empty()) break;
    const SpikeCluster& cluster = scan.clusters.front();
    const Classification c = classify_pattern(model, r, cluster, config, scan.sigma);
    const bool matched = c.kind == PatternKind::jump || c.kind == PatternKind::outlier;
    if (matched) {
      r -= c.fitted;
    } else {
      for (Index j = std::max<Index>(0, cluster.indices.front() - 2);
           j <= std::min<Index>(n - 1, cluster.indices.back() + 2); ++j)
        model.masked[static_cast<std::size_t>(j)] = true;
    }
    const bool inside = !edge_mask[static_cast<std::size_t>(c.position)] &&
                        (c.kind != PatternKind::jump || !edge_mask[static_cast<std::size_t>(c.position - 1)]);
    if (!inside) continue;
    AnomalyEvent e;
    e.satellite = series.satellite;
    e.coordinate = series.coordinate;
    e.epoch = w.epochs[static_cast<std::size_t>(c.position)];
    e.grid_index = w.present[static_cast<std::size_t>(c.position)];
    e.magnitude_km = c.magnitude;
    e.amplitude_km = c.amplitude;
    e.kind = resolve_kind(c.kind, e.epoch, c.magnitude, config);
    e.confidence = std::clamp(c.correlation, 0.0, 1.0);
    e.snr = c.snr;
    e.windows = {report.start};
    report.events.push_back(std::move(e));
  }
  report.sigma = scan_residue(model, r, config, floor, config.noise_ceiling_rel * scale).sigma;
  report.ok = true;
  return report;
}

std::vector<Index> window_offsets(Index series_points, const DetectorConfig& config) {
  if (series_points < config.window_points)
    fail(ErrorCode::InsufficientCoverage, "series of " + std::to_string(series_points) +
                                              " points is shorter than one window of " +
                                              std::to_string(config.window_points));
  std::vector<Index> out;
  for (Index off = 0; off + config.window_points <= series_points; off += config.step_points) out.push_back(off);
  if (out.back() + config.window_points < series_points) out.push_back(series_points - config.window_points);
  return out;
}

std::vector<AnomalyEvent> merge_events(std::vector<AnomalyEvent> events) {
  using Key = std::tuple<std::string, int, Epoch>;
  std::map<Key, std::vector<AnomalyEvent>> groups;
  for (auto& e : events) groups[{e.satellite, static_cast<int>(e.coordinate), e.epoch}].push_back(std::move(e));

  std::vector<AnomalyEvent> out;
  for (auto& [key, group] : groups) {
    std::sort(group.begin(), group.end(), [](const AnomalyEvent& a, const AnomalyEvent& b) {
      return std::tie(a.magnitude_km, a.amplitude_km, a.windows) < std::tie(b.magnitude_km, b.amplitude_km, b.windows);
    });
    AnomalyEvent m = group[group.size() / 2];
    std::vector<double> mags, amps;
    std::map<EventKind, int> votes;
    std::vector<Epoch> windows;
    for (const auto& e : group) {
      mags.push_back(e.magnitude_km);
      amps.push_back(e.amplitude_km);
      ++votes[e.kind];
      m.confidence = std::max(m.confidence, e.confidence);
      m.snr = std::max(m.snr, e.snr);
      windows.insert(windows.end(), e.windows.begin(), e.windows.end());
    }
    m.magnitude_km = median(mags);
    m.amplitude_km = median(amps);
    int best_votes = 0;
    for (const auto& [kind, n] : votes)
      if (n > best_votes) {
        best_votes = n;
        m.kind = kind;
      }
    std::sort(windows.begin(), windows.end());
    windows.erase(std::unique(windows.begin(), windows.end()), windows.end());
    m.windows = std::move(windows);
    out.push_back(std::move(m));
  }
  return out;
}

AnalysisResult sliding_analysis(const SatelliteSeries& series, BasisCache& cache, const DetectorConfig& config) {
  config.validate();
  const std::vector<Index> offsets = window_offsets(series.size(), config);
  AnalysisResult result;
  result.windows.resize(offsets.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < offsets.size(); k = next++) {
      WindowReport& rep = result.windows[k];
      try {
        rep = analyze_window(series, offsets[k], cache, config);
      } catch (const Error& e) {
        rep = {};
        rep.first = offsets[k];
        rep.start = series.epochs[static_cast<std::size_t>(offsets[k])];
        rep.error = std::string(to_string(e.code())) + ": " + e.what();
      }
    }
  };
  unsigned threads = config.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                         : static_cast<unsigned>(config.threads);
  threads = std::min<unsigned>(threads, static_cast<unsigned>(offsets.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  std::vector<AnomalyEvent> all;
  for (const auto& w : result.windows) all.insert(all.end(), w.events.begin(), w.events.end());
  result.events = merge_events(std::move(all));
  return result;
}

nlohmann::json to_json(const AnomalyEvent& e) {
  nlohmann::json windows = nlohmann::json::array();
  for (const auto& w : e.windows) windows.push_back(format_epoch(w));
  return {{"satellite", e.satellite},
          {"coordinate", std::string(to_string(e.coordinate))},
          {"epoch", format_epoch(e.epoch)},
          {"grid_index", e.grid_index},
          {"kind", std::string(to_string(e.kind))},
          {"magnitude_km", e.magnitude_km},
          {"amplitude_km", e.amplitude_km},
          {"confidence", e.confidence},
          {"snr", e.snr},
          {"windows", windows}};
}

void write_events_jsonl(std::ostream& out, const std::vector<AnomalyEvent>& events) {
  for (const auto& e : events) out << to_json(e).dump() << '\n';
}

void write_events_csv(std::ostream& out, const std::vector<AnomalyEvent>& events) {
  out << "satellite,coordinate,epoch,grid_index,kind,magnitude_km,amplitude_km,confidence,snr,windows\n";
  char buf[256];
  for (const auto& e : events) {
    std::string windows;
    for (const auto& w : e.windows) windows += (windows.empty() ? "" : ";") + format_epoch(w);
    std::snprintf(buf, sizeof buf, "%s,%s,%s,%td,%s,%.9g,%.9g,%.4f,%.4g,", e.satellite.c_str(),
                  std::string(to_string(e.coordinate)).c_str(), format_epoch(e.epoch).c_str(), e.grid_index,
                  std::string(to_string(e.kind)).c_str(), e.magnitude_km, e.amplitude_km, e.confidence, e.snr);
    out << buf << windows << '\n';
  }
}

SatelliteSeries make_series(const Eigen::VectorXd& values, Epoch start, std::string satellite, Coordinate coordinate,
                            std::chrono::milliseconds interval) {
  SatelliteSeries s;
  s.satellite = std::move(satellite);
  s.coordinate = coordinate;
  s.interval = interval;
  s.values = values;
  s.provenance.assign(static_cast<std::size_t>(values.size()), LineSource{});
  for (Index i = 0; i < values.size(); ++i) {
    s.epochs.push_back(start + i * interval);
    if (std::isnan(values[i])) s.gaps.push_back(i);
  }
  return s;
}

}  // namespace hahnfit

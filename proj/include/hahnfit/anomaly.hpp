#pragma once

// Sliding-window anomaly detection on detrended series.
//
// A step of size a at lattice index p leaves the residue a * (I - P) s_p,
// an isolated deviation leaves a * (I - P) e_p, where P projects onto
// polynomials of degree <= d on the window lattice. Clusters of large
// residues are matched against both exact templates; the best fit gives the
// kind, position and amplitude, and is subtracted before the next cluster
// is examined.

#include "hahnfit/basis_cache.hpp"
#include "hahnfit/series.hpp"

#include <json.hpp>

#include <iosfwd>
#include <memory>
#include <optional>

namespace hahnfit {

struct DetectorConfig {
  Index window_points = 384;
  Index degree = 200;
  Index step_points = 96;
  double spike_threshold_factor = 6.0;  ///< in robust sigma units
  Index boundary_mask_points = 8;       ///< per side
  double min_leverage = 0.05;           ///< points with 1 - diag(P) below this are masked too
  double sigma_floor_rel = 1e-12;       ///< sigma floor relative to the window scale
  double noise_ceiling_rel = 1e-6;      ///< WindowTooNoisy above this sigma relative to the window scale
  double shape_correlation_min = 0.6;   ///< local correlation needed to accept a template
  double maneuver_floor_km = 2e-4;      ///< unmatched shapes above this become maneuver-like
  double anomalous_jump_floor_km = 1e-4;  ///< midnight jumps above this are anomalous
  double max_gap_fraction = 0.05;
  int max_events_per_window = 16;
  double orth_tol = std::numeric_limits<double>::epsilon();
  int threads = 1;

  void validate() const;
};

nlohmann::json to_json(const DetectorConfig& config);

/// Residue shapes of the unit experiments at one geometry.
struct Calibration {
  Index window_points = 0;
  Index degree = 0;
  Index position = 0;             ///< index of the step / impulse
  double jump_spike_ratio = 0.0;  ///< half the jump in the residue across the step
  double outlier_recovery_ratio = 0.0;  ///< center spike minus the mean of its neighbours
  Eigen::VectorXd jump_template;
  Eigen::VectorXd outlier_template;
};

/// Unit step and unit impulse at index round(0.4 (W - 1)) of an equidistant
/// W-point window, detrended at the given degree. Cached per geometry.
std::shared_ptr<const Calibration> calibrate_templates(Index window_points, Index degree);

/// Everything about a window that does not depend on the data values.
struct WindowModel {
  std::shared_ptr<const Basis> basis;
  Index degree = 0;
  Eigen::VectorXd leverage;  ///< 1 - sum_{k<=degree} Q^_k(x_j)^2
  std::vector<bool> masked;

  Index size() const noexcept { return leverage.size(); }
  /// (I - P) s with s_j = 1 for j >= p.
  Eigen::VectorXd jump_template(Index p) const;
  /// (I - P) e_p.
  Eigen::VectorXd outlier_template(Index p) const;
};

/// Masks points whose abscissa lies within boundary_mask_points grid steps of
/// either window edge, and points whose leverage is below min_leverage.
WindowModel make_window_model(std::shared_ptr<const Basis> basis, const DetectorConfig& config);

struct SpikeCluster {
  std::vector<Index> indices;  ///< lattice indices, ascending
  double peak_z = 0.0;         ///< largest |r| / (sigma sqrt(leverage)) in the cluster
};

struct ScanResult {
  double sigma = 0.0;  ///< robust noise scale of r / sqrt(leverage)
  std::vector<SpikeCluster> clusters;  ///< strongest first
};

/// Spikes are unmasked points with |r_j| > factor * sigma * sqrt(leverage_j);
/// sigma is 1.4826 * MAD over unmasked points, floored at sigma_floor.
/// Throws WindowTooNoisy when sigma exceeds noise_ceiling (if positive).
ScanResult scan_residue(const WindowModel& model, const Eigen::VectorXd& residue, const DetectorConfig& config,
                        double sigma_floor = 0.0, double noise_ceiling = 0.0);

/// Same, with the floor and ceiling derived from the config and a series scale.
ScanResult scan_residue_scaled(const WindowModel& model, const Eigen::VectorXd& residue, const DetectorConfig& config,
                               double series_scale);

enum class PatternKind { jump, outlier, maneuver_like, unclassified };
std::string_view to_string(PatternKind kind) noexcept;

struct Classification {
  PatternKind kind = PatternKind::unclassified;
  Index position = 0;      ///< lattice index of the step (first point after it) or of the outlier
  double amplitude = 0.0;  ///< signed least-squares template amplitude
  double magnitude = 0.0;  ///< |amplitude|, or the peak residue for unmatched shapes
  double correlation = 0.0;  ///< local shape correlation of the chosen template
  double snr = 0.0;          ///< |amplitude| * |template| / sigma
  Eigen::VectorXd fitted;    ///< amplitude * template, zero for unmatched shapes
};

/// Fits jump and outlier templates at every position of the cluster and its
/// immediate neighbours and keeps the best least-squares fit.
Classification classify_pattern(const WindowModel& model, const Eigen::VectorXd& residue, const SpikeCluster& cluster,
                                 const DetectorConfig& config, double sigma = 0.0);

enum class EventKind { day_boundary_jump, anomalous_jump, outlier, maneuver_like, unclassified };
std::string_view to_string(EventKind kind) noexcept;
EventKind event_kind_from_string(std::string_view s);

struct AnomalyEvent {
  std::string satellite;
  Coordinate coordinate = Coordinate::x;
  Epoch epoch{};
  Index grid_index = 0;  ///< index in the analysed series
  EventKind kind = EventKind::unclassified;
  double magnitude_km = 0.0;
  double amplitude_km = 0.0;  ///< signed
  double confidence = 0.0;    ///< shape correlation of the best template, in [0, 1]
  double snr = 0.0;
  std::vector<Epoch> windows;  ///< start epochs of the windows that reported it
};

struct WindowReport {
  Index first = 0;
  Epoch start{};
  bool ok = false;
  std::string error;
  double sigma = 0.0;
  double edge_ratio = 0.0;  ///< max |r| over the outer 3 points on each side / max |r| over unmasked points
  Index points = 0;
  std::vector<AnomalyEvent> events;
};

/// Detection within one window of a series.
WindowReport analyze_window(const SatelliteSeries& series, Index first, BasisCache& cache,
                            const DetectorConfig& config);

/// Window offsets 0, step, 2 step, ... plus one final window ending at the series end.
std::vector<Index> window_offsets(Index series_points, const DetectorConfig& config);

/// Combines per-window events by epoch: median magnitude, majority kind,
/// union of windows. The result does not depend on the input order.
std::vector<AnomalyEvent> merge_events(std::vector<AnomalyEvent> events);

struct AnalysisResult {
  std::vector<AnomalyEvent> events;
  std::vector<WindowReport> windows;
};

AnalysisResult sliding_analysis(const SatelliteSeries& series, BasisCache& cache, const DetectorConfig& config);

/// Resolves a pattern into an event kind using the epoch of the position.
EventKind resolve_kind(PatternKind pattern, Epoch epoch, double magnitude_km, const DetectorConfig& config);

nlohmann::json to_json(const AnomalyEvent& event);
void write_events_jsonl(std::ostream& out, const std::vector<AnomalyEvent>& events);
void write_events_csv(std::ostream& out, const std::vector<AnomalyEvent>& events);

/// Series with the given values on a 900 s grid starting at start.
SatelliteSeries make_series(const Eigen::VectorXd& values, Epoch start, std::string satellite = "G00",
                            Coordinate coordinate = Coordinate::x,
                            std::chrono::milliseconds interval = std::chrono::seconds(900));

}  // namespace hahnfit

#include "hahnfit/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace hahnfit;

namespace {

Coordinate parse_coordinate(const std::string& s) { return coordinate_from_string(s); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete orthogonal polynomial fitting and GNSS orbit anomaly detection"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  BasisCommand basis;
  std::string basis_out, basis_csv, basis_lattice;
  auto* b = app.add_subcommand("basis", "build and save an orthonormal basis");
  b->add_option("-N,--N", basis.upper_index, "upper lattice index (equidistant lattice 0..N)");
  b->add_option("--lattice", basis_lattice, "lattice file, one abscissa per line");
  b->add_option("-M,--M", basis.max_degree, "largest degree (default N)");
  b->add_option("--tol", basis.orth_tol, "orth_tol of the re-orthogonalization test");
  b->add_option("-o,--out", basis_out, "basis cache file")->required();
  b->add_option("--csv", basis_csv, "also write the values as CSV");
  b->add_flag("--show-conditioning", basis.show_conditioning, "print monomial and basis condition numbers");
  b->add_flag("--timing", basis.timing, "record wall time in the manifest");

  FitCommand fit;
  std::string fit_data, fit_dir, fit_coord = "X", fit_out, fit_start;
  auto* f = app.add_subcommand("fit", "detrend a series with a polynomial of given degree");
  f->add_option("--data", fit_data, "CSV with value or t,value columns");
  f->add_option("--sp3-dir", fit_dir, "directory of SP3 files");
  f->add_option("--pattern", fit.pattern, "file name regex for --sp3-dir");
  f->add_option("--satellite", fit.satellite, "satellite id, e.g. G08");
  f->add_option("--coordinate", fit_coord, "X, Y or Z");
  f->add_option("--start", fit_start, "window start epoch (default: first epoch)");
  f->add_option("--days", fit.days, "window length in days");
  f->add_option("--degree", fit.degree, "polynomial degree");
  f->add_option("--tol", fit.orth_tol, "orth_tol of the basis");
  f->add_option("--max-gap", fit.max_gap_fraction, "largest tolerated fraction of missing epochs");
  f->add_option("-o,--out", fit_out, "output CSV")->required();
  f->add_flag("--timing", fit.timing, "record wall time in the manifest");

  DetectCommand det;
  std::string det_dir, det_out;
  std::vector<std::string> det_coords;
  auto* d = app.add_subcommand("detect", "sliding-window anomaly detection over SP3 files");
  d->add_option("sp3_dir", det_dir, "directory of SP3 files")->required();
  d->add_option("--pattern", det.pattern, "file name regex");
  d->add_option("--satellite", det.satellites, "satellites to analyse (repeatable; default all)");
  d->add_option("--coordinate", det_coords, "coordinates to analyse (repeatable; default X Y Z)");
  d->add_option("--window", det.config.window_points, "window length in points");
  d->add_option("--degree", det.config.degree, "detrending degree");
  d->add_option("--step", det.config.step_points, "window stride in points");
  d->add_option("--mask", det.config.boundary_mask_points, "masked points at each window edge");
  d->add_option("--factor", det.config.spike_threshold_factor, "spike threshold in robust sigma units");
  d->add_option("--tol", det.config.orth_tol, "orth_tol of the bases");
  d->add_option("--threads", det.config.threads, "worker threads (0: all cores)");
  d->add_option("--format", det.format, "report format")->check(CLI::IsMember({"csv", "jsonl"}));
  d->add_option("--severity", det.severity_km, "exit with status 4 if an event exceeds this magnitude (km)");
  d->add_option("-o,--out", det_out, "event report")->required();
  d->add_flag("--timing", det.timing, "record wall time in the manifest");

  DecayCommand dec;
  std::string dec_out, dec_profile_out, dec_grid_out;
  auto* e = app.add_subcommand("decay", "endpoint decay table of a normalized Hahn polynomial");
  e->add_option("-N,--N", dec.N, "upper lattice index");
  e->add_option("-n,--n", dec.n, "degree");
  e->add_option("--m-first", dec.m_first, "first lattice point");
  e->add_option("--m-last", dec.m_last, "last lattice point");
  e->add_option("-o,--out", dec_out, "table CSV (default stdout)");
  e->add_option("--profile-m", dec.profile_m, "dump the summands of Q_n^N(m)");
  e->add_option("--profile-out", dec_profile_out, "summand profile CSV");
  e->add_option("--grid-step", dec.grid_step, "dump log10 |Q^| on a grid with this step");
  e->add_option("--grid-out", dec_grid_out, "grid CSV");
  e->add_flag("--timing", dec.timing, "record wall time in the manifest");

  SynthCommand syn;
  std::string syn_out, syn_dir, syn_coord = "X";
  bool no_round = false;
  auto* s = app.add_subcommand("synth", "generate synthetic datasets");
  s->add_option("kind", syn.kind, "jump, outlier or orbit")->required()->check(CLI::IsMember({"jump", "outlier", "orbit"}));
  s->add_option("--points", syn.points, "series length (jump, outlier)");
  s->add_option("--position", syn.position, "index of the jump or outlier");
  s->add_option("--magnitude", syn.magnitude, "jump or outlier size");
  s->add_option("--days", syn.days, "orbit length in days");
  s->add_option("--satellite", syn.satellites, "satellite ids (repeatable)");
  s->add_option("--coordinate", syn_coord, "coordinate written to the CSV and default for injections");
  s->add_option("--start", syn.start, "first epoch");
  s->add_option("--seed", syn.seed, "orbit generator seed");
  s->add_flag("--no-round", no_round, "keep full precision instead of rounding to 1 mm");
  s->add_option("--inject-jump", syn.inject_jumps, "EPOCH,MAG_KM[,SAT[,COORD]] (repeatable)");
  s->add_option("--inject-outlier", syn.inject_outliers, "EPOCH,MAG_KM[,SAT[,COORD]] (repeatable)");
  s->add_option("--sp3-dir", syn_dir, "write daily SP3 files and truth.json here");
  s->add_option("-o,--out", syn_out, "output CSV");
  s->add_flag("--timing", syn.timing, "record wall time in the manifest");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*b) {
      if (!basis_lattice.empty()) basis.lattice_file = basis_lattice;
      basis.out = basis_out;
      if (!basis_csv.empty()) basis.csv = basis_csv;
      return run_basis(basis, std::cout);
    }
    if (*f) {
      if (!fit_data.empty()) fit.data = fit_data;
      if (!fit_dir.empty()) fit.sp3_dir = fit_dir;
      if (!fit_start.empty()) fit.start = fit_start;
      fit.coordinate = parse_coordinate(fit_coord);
      fit.out = fit_out;
      return run_fit(fit, std::cout);
    }
    if (*d) {
      det.sp3_dir = det_dir;
      det.out = det_out;
      if (!det_coords.empty()) {
        det.coordinates.clear();
        for (const auto& c : det_coords) det.coordinates.push_back(parse_coordinate(c));
      }
      return run_detect(det, std::cerr);
    }
    if (*e) {
      if (!dec_out.empty()) dec.out = dec_out;
      if (!dec_profile_out.empty()) dec.profile_out = dec_profile_out;
      if (!dec_grid_out.empty()) dec.grid_out = dec_grid_out;
      return run_decay(dec, std::cout, std::cerr);
    }
    if (*s) {
      syn.round_mm = !no_round;
      syn.coordinate = parse_coordinate(syn_coord);
      if (!syn_out.empty()) syn.out = syn_out;
      if (!syn_dir.empty()) syn.sp3_dir = syn_dir;
      return run_synth(syn, std::cerr);
    }
  } catch (const Error& err) {
    std::cerr << "error (" << to_string(err.code()) << "): " << err.what() << '\n';
    return exit_code(err);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 2;
  }
  return 1;
}

#include "hahnfit/commands.hpp"

#include "hahnfit/conditioning.hpp"
#include "hahnfit/hahn.hpp"

#include <boost/version.hpp>

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>

namespace hahnfit {

int exit_code(const Error& error) noexcept {
  switch (error.category()) {
    case ErrorCategory::Usage: return 1;
    case ErrorCategory::Data: return 2;
    case ErrorCategory::Numerical: return 3;
  }
  return 2;
}

BasisCache make_cache() {
  if (const char* dir = std::getenv(kCacheDirEnv); dir && *dir) return BasisCache(dir);
  return BasisCache();
}

std::filesystem::path manifest_path(const std::filesystem::path& output) {
  return output.parent_path() / (output.stem().string() + ".manifest.json");
}

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string fnv1a_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::uint64_t h = 14695981039346656037ULL;
  char c;
  while (in.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

// Run manifest: enough to repeat the command. Timing is only recorded on
// request so that repeated runs stay byte-identical.
class Manifest {
 public:
  Manifest(std::string subcommand, json config, bool timing)
      : timing_(timing), start_(std::chrono::steady_clock::now()) {
    j_["subcommand"] = std::move(subcommand);
    j_["config"] = std::move(config);
    j_["inputs"] = json::array();
    j_["outputs"] = json::array();
    j_["versions"] = {{"hahnfit", kVersion},
                      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                    std::to_string(EIGEN_MINOR_VERSION)},
                      {"boost", BOOST_LIB_VERSION},
                      {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                            std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                            std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
  }

  void input(const fs::path& p) {
    j_["inputs"].push_back({{"path", p.string()}, {"bytes", fs::file_size(p)}, {"fnv1a64", fnv1a_file(p)}});
  }
  void output(const fs::path& p) { j_["outputs"].push_back(p.string()); }
  json& result() { return j_["result"]; }

  void write(const fs::path& primary_output) {
    if (timing_)
      j_["timing"] = {{"wall_seconds",
                       std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count()}};
    const fs::path path = manifest_path(primary_output);
    std::ofstream out(path);
    if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
    out << j_.dump(2) << '\n';
  }

 private:
  json j_;
  bool timing_;
  std::chrono::steady_clock::time_point start_;
};

std::ofstream open_output(const fs::path& path) {
  if (path.empty()) fail(ErrorCode::InvalidArgument, "an output path is required");
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
  return out;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace

int run_basis(const BasisCommand& cmd, std::ostream& log) {
  if (cmd.upper_index.has_value() == cmd.lattice_file.has_value())
    fail(ErrorCode::InvalidArgument, "give exactly one of N or a lattice file");
  if (cmd.upper_index && *cmd.upper_index < 1) fail(ErrorCode::InvalidArgument, "N must be at least 1");
  const Lattice lattice = cmd.upper_index ? Lattice::equidistant(*cmd.upper_index + 1) : read_lattice_file(*cmd.lattice_file);
  const Index M = cmd.max_degree.value_or(lattice.upper_index());

  json config = {{"N", lattice.upper_index()}, {"M", M}, {"orth_tol", cmd.orth_tol},
                 {"show_conditioning", cmd.show_conditioning}};
  if (cmd.lattice_file) config["lattice_file"] = cmd.lattice_file->string();
  Manifest manifest("basis", config, cmd.timing);
  if (cmd.lattice_file) manifest.input(*cmd.lattice_file);
  if (cmd.out.empty()) fail(ErrorCode::InvalidArgument, "an output path is required");

  const Basis basis = build_basis<double>(lattice, M, cmd.orth_tol);
  if (cmd.out.has_parent_path()) fs::create_directories(cmd.out.parent_path());
  save_basis(cmd.out, basis);
  manifest.output(cmd.out);
  if (cmd.csv) {
    auto out = open_output(*cmd.csv);
    write_basis_csv(out, basis);
    manifest.output(*cmd.csv);
  }

  const int max_sweeps = *std::max_element(basis.iterations.begin(), basis.iterations.end());
  log << "points " << lattice.size() << "\nmax_degree " << M << "\nlattice_kind " << to_string(lattice.kind())
      << "\nachieved_orth_err " << fmt("%.3e", basis.achieved_orth_err) << "\nmax_sweeps " << max_sweeps << '\n';
  manifest.result() = {{"achieved_orth_err", basis.achieved_orth_err},
                       {"lattice_kind", std::string(to_string(lattice.kind()))},
                       {"max_sweeps", max_sweeps}};
  if (cmd.show_conditioning) {
    const double c11 = monomial_condition(11, 10);
    const double c31 = monomial_condition(31, 30);
    const double g = gram_condition(basis);
    log << "monomial_condition_11_points_degree_10 " << fmt("%.4e", c11) << '\n'
        << "monomial_condition_31_points_degree_30 " << fmt("%.4e", c31) << '\n'
        << "basis_gram_condition " << fmt("%.17g", g) << '\n';
    manifest.result()["monomial_condition_11"] = c11;
    manifest.result()["monomial_condition_31"] = c31;
    manifest.result()["basis_gram_condition"] = g;
  }
  manifest.write(cmd.out);
  return 0;
}

DataSeries read_data_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
  std::vector<double> t, v;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos || line[0] == '#') continue;
    std::vector<double> fields;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      const double x = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || std::string_view(end).find_first_not_of(" \t") != std::string_view::npos) {
        numeric = false;
        break;
      }
      fields.push_back(x);
    }
    if (!numeric || fields.empty()) {
      if (t.empty() && v.empty()) continue;  // header
      fail(ErrorCode::InvalidArgument, path.string() + ":" + std::to_string(line_no) + ": non-numeric row");
    }
    if (fields.size() == 1) {
      t.push_back(static_cast<double>(v.size()));
      v.push_back(fields[0]);
    } else {
      t.push_back(fields[0]);
      v.push_back(fields[1]);
    }
  }
  if (v.size() < 2) fail(ErrorCode::InvalidArgument, path.string() + ": need at least two data rows");
  return DataSeries(Lattice(Eigen::Map<Eigen::VectorXd>(t.data(), static_cast<Index>(t.size()))),
                    Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Index>(v.size())));
}

int run_fit(const FitCommand& cmd, std::ostream& log) {
  if (cmd.data.has_value() == cmd.sp3_dir.has_value())
    fail(ErrorCode::InvalidArgument, "give exactly one of a data CSV or an SP3 directory");
  if (cmd.degree < 0) fail(ErrorCode::InvalidArgument, "degree must be non-negative");
  json config = {{"degree", cmd.degree}, {"orth_tol", cmd.orth_tol}};
  std::vector<fs::path> inputs;
  std::optional<DataSeries> series;
  if (cmd.data) {
    config["data"] = cmd.data->string();
    inputs.push_back(*cmd.data);
    series = read_data_csv(*cmd.data);
  } else {
    if (cmd.satellite.empty()) fail(ErrorCode::InvalidArgument, "an SP3 fit needs a satellite");
    config["sp3_dir"] = cmd.sp3_dir->string();
    config["pattern"] = cmd.pattern;
    config["satellite"] = cmd.satellite;
    config["coordinate"] = std::string(to_string(cmd.coordinate));
    config["days"] = cmd.days;
    config["max_gap_fraction"] = cmd.max_gap_fraction;
    inputs = scan_sp3_directory(*cmd.sp3_dir, cmd.pattern);
    if (inputs.empty()) fail(ErrorCode::InvalidArgument, "no SP3 files in " + cmd.sp3_dir->string());
    std::vector<Sp3File> files;
    for (std::size_t i = 0; i < inputs.size(); ++i) files.push_back(read_sp3_file(inputs[i], i));
    Epoch start{};
    if (cmd.start) {
      start = parse_epoch(*cmd.start);
    } else {
      bool found = false;
      for (const auto& f : files)
        for (const auto& r : f.records)
          if (r.satellite == cmd.satellite && (!found || r.epoch < start)) {
            start = r.epoch;
            found = true;
          }
      if (!found) fail(ErrorCode::InsufficientCoverage, "no records for satellite " + cmd.satellite);
    }
    config["start"] = format_epoch(start);
    const auto interval =
        std::chrono::milliseconds(static_cast<long long>(std::llround(files.front().header.interval_s * 1000)));
    series = assemble_window(files, cmd.satellite, cmd.coordinate, start, cmd.days, cmd.max_gap_fraction, interval).data;
  }
  Manifest manifest("fit", config, cmd.timing);
  for (const auto& p : inputs) manifest.input(p);

  if (cmd.degree > series->lattice.upper_index())
    fail(ErrorCode::InvalidArgument, "degree " + std::to_string(cmd.degree) + " exceeds N = " +
                                         std::to_string(series->lattice.upper_index()));
  BasisCache cache = make_cache();
  const auto basis = cache.get(series->lattice, cmd.degree, cmd.orth_tol);
  const FitResult fit = detrend(*basis, *series, cmd.degree);

  auto out = open_output(cmd.out);
  write_fit_csv(out, *series, fit);
  manifest.output(cmd.out);
  const fs::path meta = cmd.out.parent_path() / (cmd.out.stem().string() + ".json");
  auto meta_out = open_output(meta);
  meta_out << fit_metadata(*basis, *series, fit).dump(2) << '\n';
  manifest.output(meta);

  const double rmax = fit.residue.cwiseAbs().maxCoeff();
  log << "points " << series->lattice.size() << "\nlattice_kind " << to_string(series->lattice.kind())
      << "\nresidue_max_abs " << fmt("%.6e", rmax) << '\n';
  manifest.result() = {{"residue_max_abs", rmax}, {"lattice_kind", std::string(to_string(series->lattice.kind()))}};
  manifest.write(cmd.out);
  return 0;
}

int run_detect(const DetectCommand& cmd, std::ostream& log) {
  cmd.config.validate();
  if (cmd.format != "csv" && cmd.format != "jsonl") fail(ErrorCode::InvalidArgument, "format must be csv or jsonl");
  if (cmd.coordinates.empty()) fail(ErrorCode::InvalidArgument, "no coordinates selected");
  const auto paths = scan_sp3_directory(cmd.sp3_dir, cmd.pattern);
  if (paths.empty()) fail(ErrorCode::InvalidArgument, "no SP3 files in " + cmd.sp3_dir.string());

  json coords = json::array();
  for (const auto c : cmd.coordinates) coords.push_back(std::string(to_string(c)));
  json config = {{"sp3_dir", cmd.sp3_dir.string()}, {"pattern", cmd.pattern}, {"satellites", cmd.satellites},
                 {"coordinates", coords}, {"detector", to_json(cmd.config)}, {"format", cmd.format}};
  if (cmd.severity_km) config["severity_km"] = *cmd.severity_km;
  Manifest manifest("detect", config, cmd.timing);

  std::vector<Sp3File> files;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    manifest.input(paths[i]);
    files.push_back(read_sp3_file(paths[i], i));
    for (const auto& issue : files.back().issues)
      log << "warning: " << files.back().name << ":" << issue.line << ": " << issue.message << '\n';
  }
  const std::vector<std::string> satellites = cmd.satellites.empty() ? satellites_in(files) : cmd.satellites;

  BasisCache cache = make_cache();
  std::vector<AnomalyEvent> events;
  std::ostringstream windows;
  windows << "satellite,coordinate,first,start,ok,points,sigma,edge_ratio,events,error\n";
  int failed = 0;
  for (const auto& sat : satellites) {
    for (const auto coord : cmd.coordinates) {
      AnalysisResult result;
      try {
        result = sliding_analysis(assemble_series(files, sat, coord), cache, cmd.config);
      } catch (const Error& e) {
        if (e.category() == ErrorCategory::Usage) throw;
        log << "warning: " << sat << " " << to_string(coord) << ": " << e.what() << '\n';
        ++failed;
        continue;
      }
      for (const auto& w : result.windows) {
        if (!w.ok) {
          log << "warning: " << sat << " " << to_string(coord) << " window " << format_epoch(w.start) << ": "
              << w.error << '\n';
          ++failed;
        }
        char buf[256];
        std::snprintf(buf, sizeof buf, "%s,%s,%td,%s,%d,%td,%.6e,%.6e,%zu,", sat.c_str(),
                      std::string(to_string(coord)).c_str(), w.first, format_epoch(w.start).c_str(), w.ok ? 1 : 0,
                      w.points, w.sigma, w.edge_ratio, w.events.size());
        windows << buf << w.error << '\n';
      }
      events.insert(events.end(), result.events.begin(), result.events.end());
    }
  }

  auto out = open_output(cmd.out);
  if (cmd.format == "csv")
    write_events_csv(out, events);
  else
    write_events_jsonl(out, events);
  manifest.output(cmd.out);
  const fs::path windows_path = cmd.out.parent_path() / (cmd.out.stem().string() + ".windows.csv");
  open_output(windows_path) << windows.str();
  manifest.output(windows_path);

  double largest = 0.0;
  for (const auto& e : events) largest = std::max(largest, e.magnitude_km);
  log << "files " << files.size() << "\nsatellites " << satellites.size() << "\nevents " << events.size()
      << "\nfailed_windows " << failed << '\n';
  manifest.result() = {{"events", events.size()}, {"failed_windows", failed}, {"largest_magnitude_km", largest}};
  manifest.write(cmd.out);
  return cmd.severity_km && largest > *cmd.severity_km ? 4 : 0;
}

void write_decay_table(std::ostream& out, int N, int n, int m_first, int m_last, std::ostream& log) {
  const HahnParams params(N, n);
  if (m_first < 0 || m_last < m_first || m_last > n)
    fail(ErrorCode::InvalidArgument, "m range must satisfy 0 <= first <= last <= n");
  if (!root_bounds(N, n, std::max(m_first, 1)).in_regime || !root_bounds(N, n, std::max(m_last, 1)).in_regime)
    log << "warning: (N, n, m) outside the regime n >= N/2, m <= N/10 where the estimate is derived\n";
  out << "m,k_tilde,abs_Q,m_q_tilde\n";
  char buf[128];
  for (int m = m_first; m <= m_last; ++m) {
    const double q = std::abs(normalized_hahn_value(params, m));
    int k = 0;
    // At m = 0 the sum has the single term 1, so the estimate is the value itself.
    double bound = q;
    if (m > 0) {
      k = summand_profile(N, n, m).peak_index;
      bound = decay_bound(N, n, m);
    }
    std::snprintf(buf, sizeof buf, "%d,%d,%.6e,%.6e\n", m, k, q, bound);
    out << buf;
  }
}

int run_decay(const DecayCommand& cmd, std::ostream& out, std::ostream& log) {
  json config = {{"N", cmd.N}, {"n", cmd.n}, {"m_first", cmd.m_first}, {"m_last", cmd.m_last}};
  if (cmd.profile_m) config["profile_m"] = *cmd.profile_m;
  if (cmd.grid_step) config["grid_step"] = *cmd.grid_step;
  Manifest manifest("decay", config, cmd.timing);

  if (cmd.out) {
    auto file = open_output(*cmd.out);
    write_decay_table(file, cmd.N, cmd.n, cmd.m_first, cmd.m_last, log);
    manifest.output(*cmd.out);
  } else {
    write_decay_table(out, cmd.N, cmd.n, cmd.m_first, cmd.m_last, log);
  }

  if (cmd.profile_m) {
    if (!cmd.profile_out) fail(ErrorCode::InvalidArgument, "a profile needs an output path");
    const SummandProfile prof = summand_profile(cmd.N, cmd.n, *cmd.profile_m);
    auto file = open_output(*cmd.profile_out);
    file << "k,summand,log10_abs\n";
    char buf[128];
    for (std::size_t k = 0; k < prof.values.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%zu,%.6e,%.8f\n", k, prof.values[k], prof.log_abs[k] / std::log(10.0));
      file << buf;
    }
    log << "profile_peak_index " << prof.peak_index << "\nprofile_peak_log10 "
        << fmt("%.6f", prof.peak_log_abs / std::log(10.0)) << '\n';
    manifest.output(*cmd.profile_out);
  }
  if (cmd.grid_step) {
    if (!cmd.grid_out) fail(ErrorCode::InvalidArgument, "a grid dump needs an output path");
    if (!(*cmd.grid_step > 0)) fail(ErrorCode::InvalidArgument, "grid step must be positive");
    const HahnParams params(cmd.N, cmd.n);
    auto file = open_output(*cmd.grid_out);
    file << "x,sign,log10_abs\n";
    char buf[128];
    const auto steps = static_cast<long>(std::floor(cmd.N / *cmd.grid_step + 1e-9));
    for (long i = 0; i <= steps; ++i) {
      const double x = static_cast<double>(i) * *cmd.grid_step;
      const SignedLog v = normalized_hahn_log_value(params, x);
      std::snprintf(buf, sizeof buf, "%.6f,%d,%.8f\n", x, v.sign, v.log10_abs());
      file << buf;
    }
    manifest.output(*cmd.grid_out);
  }
  if (cmd.out) manifest.write(*cmd.out);
  return 0;
}

Injection parse_injection(const std::string& text, InjectionKind kind, const std::string& default_satellite,
                          Coordinate default_coordinate) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string p;
  while (std::getline(ss, p, ',')) parts.push_back(p);
  if (parts.size() < 2 || parts.size() > 4)
    fail(ErrorCode::InvalidArgument, "injection must read EPOCH,MAG_KM[,SAT[,COORD]], got '" + text + "'");
  Injection inj;
  inj.kind = kind;
  inj.epoch = parse_epoch(parts[0]);
  char* end = nullptr;
  inj.magnitude_km = std::strtod(parts[1].c_str(), &end);
  if (end == parts[1].c_str() || *end != '\0' || !std::isfinite(inj.magnitude_km))
    fail(ErrorCode::InvalidArgument, "bad injection magnitude '" + parts[1] + "'");
  inj.satellite = parts.size() > 2 ? parts[2] : default_satellite;
  inj.coordinate = parts.size() > 3 ? coordinate_from_string(parts[3]) : default_coordinate;
  return inj;
}

int run_synth(const SynthCommand& cmd, std::ostream& log) {
  json config = {{"kind", cmd.kind}};
  Eigen::VectorXd values;
  std::optional<CorpusSpec> spec;
  if (cmd.kind == "jump" || cmd.kind == "outlier") {
    config["points"] = cmd.points;
    config["position"] = cmd.position;
    config["magnitude"] = cmd.magnitude;
    values = cmd.kind == "jump" ? jump_series(cmd.points, cmd.position, cmd.magnitude)
                                : outlier_series(cmd.points, cmd.position, cmd.magnitude);
  } else if (cmd.kind == "orbit") {
    if (cmd.satellites.empty()) fail(ErrorCode::InvalidArgument, "orbit synthesis needs a satellite");
    spec.emplace();
    spec->start = parse_epoch(cmd.start);
    spec->days = cmd.days;
    spec->satellites = cmd.satellites;
    spec->seed = cmd.seed;
    spec->round_mm = cmd.round_mm;
    for (const auto& s : cmd.inject_jumps)
      spec->injections.push_back(parse_injection(s, InjectionKind::jump, cmd.satellites.front(), cmd.coordinate));
    for (const auto& s : cmd.inject_outliers)
      spec->injections.push_back(parse_injection(s, InjectionKind::outlier, cmd.satellites.front(), cmd.coordinate));
    config["coordinate"] = std::string(to_string(cmd.coordinate));
    config["corpus"] = truth_json(*spec);
    values = corpus_values(*spec, cmd.satellites.front(), cmd.coordinate);
  } else {
    fail(ErrorCode::InvalidArgument, "synth kind must be jump, outlier or orbit, got '" + cmd.kind + "'");
  }
  if (!cmd.out && !cmd.sp3_dir) fail(ErrorCode::InvalidArgument, "give an output CSV or an SP3 directory");

  Manifest manifest("synth", config, cmd.timing);
  if (cmd.out) {
    auto out = open_output(*cmd.out);
    out << "t,value\n";
    char buf[64];
    for (Index i = 0; i < values.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%td,%.17g\n", i, values[i]);
      out << buf;
    }
    manifest.output(*cmd.out);
  }
  fs::path manifest_target = cmd.out.value_or(fs::path());
  if (cmd.sp3_dir) {
    if (!spec) fail(ErrorCode::InvalidArgument, "SP3 output is only available for orbit synthesis");
    for (const auto& p : write_corpus(*spec, *cmd.sp3_dir)) manifest.output(p);
    manifest.output(*cmd.sp3_dir / "truth.json");
    if (manifest_target.empty()) manifest_target = *cmd.sp3_dir / "synth";
  }
  log << "points " << values.size() << '\n';
  manifest.write(manifest_target);
  return 0;
}

}  // namespace hahnfit

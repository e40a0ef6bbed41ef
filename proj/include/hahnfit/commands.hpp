#pragma once

// Subcommands of the hahnfit tool. Each run_* function performs one command,
// writes its outputs and a run manifest, and returns the process exit code.
// Errors are thrown as hahnfit::Error; exit_code maps them to 1 (usage),
// 2 (data) or 3 (numerical).

#include "hahnfit/anomaly.hpp"
#include "hahnfit/synth.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>

namespace hahnfit {

inline constexpr const char* kVersion = "0.1.0";

/// Environment variable naming a directory for persistent basis cache files.
inline constexpr const char* kCacheDirEnv = "HAHNFIT_CACHE_DIR";

int exit_code(const Error& error) noexcept;

/// Cache backed by $HAHNFIT_CACHE_DIR when set, in memory otherwise.
BasisCache make_cache();

/// "<dir>/<stem>.manifest.json" for an output path.
std::filesystem::path manifest_path(const std::filesystem::path& output);

struct BasisCommand {
  std::optional<Index> upper_index;  ///< N: equidistant lattice 0..N
  std::optional<std::filesystem::path> lattice_file;
  std::optional<Index> max_degree;   ///< M, defaults to N
  double orth_tol = std::numeric_limits<double>::epsilon();
  std::filesystem::path out;         ///< basis cache file
  std::optional<std::filesystem::path> csv;
  bool show_conditioning = false;
  bool timing = false;
};

struct FitCommand {
  std::optional<std::filesystem::path> data;  ///< CSV: "value" or "t,value" columns
  std::optional<std::filesystem::path> sp3_dir;
  std::string pattern = R"(.*\.(sp3|SP3)$)";
  std::string satellite;
  Coordinate coordinate = Coordinate::x;
  std::optional<std::string> start;  ///< window start epoch, defaults to the first epoch
  int days = 4;
  Index degree = 200;
  double orth_tol = std::numeric_limits<double>::epsilon();
  double max_gap_fraction = 0.05;
  std::filesystem::path out;  ///< CSV "t,value,fitted,residue"; metadata goes to <stem>.json
  bool timing = false;
};

struct DetectCommand {
  std::filesystem::path sp3_dir;
  std::string pattern = R"(.*\.(sp3|SP3)$)";
  std::vector<std::string> satellites;  ///< empty: every satellite found
  std::vector<Coordinate> coordinates{Coordinate::x, Coordinate::y, Coordinate::z};
  DetectorConfig config;
  std::string format = "csv";  ///< csv or jsonl
  std::filesystem::path out;   ///< event report; windows go to <stem>.windows.csv
  std::optional<double> severity_km;  ///< exit 4 when an event is larger
  bool timing = false;
};

struct DecayCommand {
  int N = 100;
  int n = 75;
  int m_first = 1;
  int m_last = 10;
  std::optional<std::filesystem::path> out;  ///< stdout when empty
  std::optional<int> profile_m;              ///< summand profile of Q_n^N(m)
  std::optional<std::filesystem::path> profile_out;
  std::optional<double> grid_step;           ///< log10 |Q^_n^N(x)| on 0, h, 2h, ..., N
  std::optional<std::filesystem::path> grid_out;
  bool timing = false;
};

struct SynthCommand {
  std::string kind = "jump";  ///< jump, outlier or orbit
  Index points = 101;
  Index position = 40;
  double magnitude = 1.0;
  std::optional<std::filesystem::path> out;  ///< CSV "t,value"
  // orbit
  int days = 10;
  std::vector<std::string> satellites{"G08"};
  Coordinate coordinate = Coordinate::x;
  std::string start = "2024-01-07";
  std::uint64_t seed = 1;
  bool round_mm = true;
  std::vector<std::string> inject_jumps;     ///< "EPOCH,MAG_KM[,SAT[,COORD]]"
  std::vector<std::string> inject_outliers;  ///< same syntax
  std::optional<std::filesystem::path> sp3_dir;
  bool timing = false;
};

int run_basis(const BasisCommand& cmd, std::ostream& log);
int run_fit(const FitCommand& cmd, std::ostream& log);
int run_detect(const DetectCommand& cmd, std::ostream& log);
int run_decay(const DecayCommand& cmd, std::ostream& out, std::ostream& log);
int run_synth(const SynthCommand& cmd, std::ostream& log);

/// Parses "EPOCH,MAG_KM[,SAT[,COORD]]".
Injection parse_injection(const std::string& text, InjectionKind kind, const std::string& default_satellite,
                          Coordinate default_coordinate);

/// Reads a data CSV: one column (values on 0, 1, ...) or the first two
/// columns as (t, value). A non-numeric first line is a header.
DataSeries read_data_csv(const std::filesystem::path& path);

/// Writes the decay table CSV "m,k_tilde,abs_Q,m_q_tilde" for m in [first, last].
void write_decay_table(std::ostream& out, int N, int n, int m_first, int m_last, std::ostream& log);

}  // namespace hahnfit

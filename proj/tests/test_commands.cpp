#include "hahnfit/basis_cache.hpp"
#include "hahnfit/commands.hpp"
#include "test_support.hpp"

#include <cstdlib>
#include <sstream>
#include <sys/wait.h>

using namespace hahnfit;
namespace fs = std::filesystem;

namespace {

int cli(const std::string& args) {
  const std::string cmd = std::string(HAHNFIT_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::string> csv_lines(const fs::path& p) {
  std::vector<std::string> out;
  std::istringstream in(test::slurp(p));
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

fs::path criterion_corpus_dir(const std::string& name) {
  const auto dir = test::scratch_dir(name);
  SynthCommand s;
  s.kind = "orbit";
  s.inject_jumps = {"2024-01-11T00:00,1e-5"};
  s.inject_outliers = {"2024-01-13T14:30,5e-4"};
  s.sp3_dir = dir / "sp3";
  std::ostringstream log;
  REQUIRE(run_synth(s, log) == 0);
  return dir;
}

}  // namespace

TEST_SUITE("commands") {

TEST_CASE("decay table") {
  std::ostringstream out, log;
  DecayCommand cmd;
  CHECK(run_decay(cmd, out, log) == 0);
  const std::string table = out.str();
  CHECK(table.rfind("m,k_tilde,abs_Q,m_q_tilde\n1,1,1.15", 0) == 0);
  CHECK(table.find("\n8,7,2.19") != std::string::npos);
  CHECK(table.find("\n10,9,4.41") != std::string::npos);
  CHECK(log.str().empty());

  std::ostringstream zero;
  write_decay_table(zero, 100, 75, 0, 0, log);
  CHECK(zero.str().find("\n0,0,2.069870e-14,2.069870e-14") != std::string::npos);
  std::ostringstream warn;
  write_decay_table(zero, 100, 30, 1, 2, warn);
  CHECK(warn.str().find("warning") != std::string::npos);
  CHECK_THROWS_AS(write_decay_table(zero, 100, 75, 5, 80, log), Error);
}

TEST_CASE("decay profile and grid dumps") {
  const auto dir = test::scratch_dir("decay");
  DecayCommand cmd;
  cmd.N = 1000;
  cmd.n = 750;
  cmd.profile_m = 100;
  cmd.profile_out = dir / "profile.csv";
  cmd.grid_step = 0.5;
  cmd.grid_out = dir / "grid.csv";
  cmd.out = dir / "table.csv";
  cmd.m_first = 1;
  cmd.m_last = 3;
  std::ostringstream out, log;
  CHECK(run_decay(cmd, out, log) == 0);
  const auto profile = csv_lines(dir / "profile.csv");
  CHECK(profile.size() == 102);
  CHECK(profile[0] == "k,summand,log10_abs");
  CHECK(log.str().find("profile_peak_index 88") != std::string::npos);
  CHECK(csv_lines(dir / "grid.csv").size() == 2002);
  CHECK(fs::exists(dir / "table.manifest.json"));
}

TEST_CASE("basis command writes a loadable cache file") {
  const auto dir = test::scratch_dir("basis");
  BasisCommand cmd;
  cmd.upper_index = 30;
  cmd.out = dir / "b30.hfb";
  cmd.csv = dir / "b30.csv";
  cmd.show_conditioning = true;
  std::ostringstream log;
  CHECK(run_basis(cmd, log) == 0);
  const Basis b = load_basis(cmd.out);
  CHECK(b.max_degree() == 30);
  CHECK(std::abs(b.values(0, 30) / 2.9078543e-9 - 1) < 1e-6);
  CHECK(log.str().find("monomial_condition_11_points_degree_10 1.1558e+08") != std::string::npos);
  CHECK(csv_lines(*cmd.csv).size() == 32);
  const auto manifest = nlohmann::json::parse(test::slurp(dir / "b30.manifest.json"));
  CHECK(manifest["subcommand"] == "basis");
  CHECK(manifest["outputs"].size() == 2);
  CHECK_FALSE(manifest.contains("timing"));

  cmd.max_degree = 31;
  CHECK_THROWS_AS(run_basis(cmd, log), Error);
}

TEST_CASE("basis command on a lattice file") {
  const auto dir = test::scratch_dir("basis-lattice");
  BasisCommand cmd;
  cmd.lattice_file = test::data_dir() / "lattice_perturbed.txt";
  cmd.max_degree = 20;
  cmd.out = dir / "p.hfb";
  std::ostringstream log;
  CHECK(run_basis(cmd, log) == 0);
  CHECK(log.str().find("lattice_kind perturbed") != std::string::npos);
  const auto manifest = nlohmann::json::parse(test::slurp(dir / "p.manifest.json"));
  CHECK(manifest["inputs"][0]["bytes"] == fs::file_size(*cmd.lattice_file));
}

TEST_CASE("fit command on a data CSV") {
  const auto dir = test::scratch_dir("fit");
  SynthCommand s;
  s.kind = "jump";
  s.out = dir / "jump.csv";
  std::ostringstream log;
  REQUIRE(run_synth(s, log) == 0);

  FitCommand f;
  f.data = dir / "jump.csv";
  f.degree = 50;
  f.out = dir / "fit.csv";
  CHECK(run_fit(f, log) == 0);
  const auto lines = csv_lines(f.out);
  REQUIRE(lines.size() == 102);
  CHECK(lines[0] == "t,value,fitted,residue");
  const double r39 = std::stod(lines[40].substr(lines[40].rfind(',') + 1));
  const double r40 = std::stod(lines[41].substr(lines[41].rfind(',') + 1));
  CHECK(std::abs((r40 - r39) / 2 - 0.3255868743) < 1e-6);
  CHECK(fs::exists(dir / "fit.json"));
  CHECK(fs::exists(dir / "fit.manifest.json"));

  f.degree = 101;
  CHECK_THROWS_AS(run_fit(f, log), Error);
}

TEST_CASE("fit command on an SP3 directory") {
  const auto dir = criterion_corpus_dir("fit-sp3");
  FitCommand f;
  f.sp3_dir = dir / "sp3";
  f.satellite = "G08";
  f.start = "2024-01-08";
  f.out = dir / "fit.csv";
  std::ostringstream log;
  CHECK(run_fit(f, log) == 0);
  CHECK(csv_lines(f.out).size() == 385);
  f.satellite = "G09";
  try {
    run_fit(f, log);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(exit_code(e) == 2);
  }
}

TEST_CASE("synth outputs") {
  const auto dir = test::scratch_dir("synth");
  SynthCommand s;
  s.kind = "outlier";
  s.magnitude = 0.0;
  s.out = dir / "flat.csv";
  std::ostringstream log;
  CHECK(run_synth(s, log) == 0);
  const auto lines = csv_lines(*s.out);
  REQUIRE(lines.size() == 102);
  for (std::size_t i = 1; i < lines.size(); ++i) CHECK(lines[i].substr(lines[i].find(',') + 1) == "0");

  const auto truth_dir = criterion_corpus_dir("synth-truth");
  const auto truth = nlohmann::json::parse(test::slurp(truth_dir / "sp3" / "truth.json"));
  CHECK(truth["injections"].size() == 2);
  CHECK(truth["injections"][1]["epoch"] == "2024-01-13T14:30:00");
  CHECK(scan_sp3_directory(truth_dir / "sp3").size() == 10);
  CHECK(fs::exists(truth_dir / "sp3" / "synth.manifest.json"));
}

TEST_CASE("injection parsing") {
  const Injection i = parse_injection("2024-01-11T00:00,1e-5,G05,Y", InjectionKind::jump, "G08", Coordinate::x);
  CHECK(i.satellite == "G05");
  CHECK(i.coordinate == Coordinate::y);
  CHECK(i.magnitude_km == 1e-5);
  const Injection d = parse_injection("2024-01-11T00:00,0.5", InjectionKind::outlier, "G08", Coordinate::z);
  CHECK(d.satellite == "G08");
  CHECK(d.coordinate == Coordinate::z);
  CHECK_THROWS_AS(parse_injection("2024-01-11T00:00", InjectionKind::jump, "G08", Coordinate::x), Error);
  CHECK_THROWS_AS(parse_injection("2024-01-11T00:00,big", InjectionKind::jump, "G08", Coordinate::x), Error);
}

TEST_CASE("detect command reports the injected events deterministically") {
  const auto dir = criterion_corpus_dir("detect");
  DetectCommand d;
  d.sp3_dir = dir / "sp3";
  d.coordinates = {Coordinate::x};
  d.out = dir / "events.csv";
  std::ostringstream log;
  CHECK(run_detect(d, log) == 0);
  const auto lines = csv_lines(d.out);
  REQUIRE(lines.size() == 3);
  CHECK(lines[1].rfind("G08,X,2024-01-11T00:00:00,384,day-boundary-jump,", 0) == 0);
  CHECK(lines[2].rfind("G08,X,2024-01-13T14:30:00,634,outlier,", 0) == 0);
  CHECK(csv_lines(dir / "events.windows.csv").size() == 8);

  const std::string first = test::slurp(d.out), first_manifest = test::slurp(dir / "events.manifest.json");
  d.config.threads = 3;
  CHECK(run_detect(d, log) == 0);
  CHECK(test::slurp(d.out) == first);

  d.severity_km = 1e-4;
  CHECK(run_detect(d, log) == 4);
  d.severity_km = 1.0;
  CHECK(run_detect(d, log) == 0);

  d.format = "jsonl";
  d.out = dir / "events.jsonl";
  CHECK(run_detect(d, log) == 0);
  CHECK(csv_lines(d.out).size() == 2);
}

TEST_CASE("manifests are byte-identical across runs without timing") {
  const auto dir = test::scratch_dir("determinism");
  BasisCommand cmd;
  cmd.upper_index = 40;
  cmd.out = dir / "a.hfb";
  std::ostringstream log;
  run_basis(cmd, log);
  const std::string m1 = test::slurp(dir / "a.manifest.json"), b1 = test::slurp(cmd.out);
  run_basis(cmd, log);
  CHECK(test::slurp(dir / "a.manifest.json") == m1);
  CHECK(test::slurp(cmd.out) == b1);
  cmd.timing = true;
  run_basis(cmd, log);
  CHECK(nlohmann::json::parse(test::slurp(dir / "a.manifest.json")).contains("timing"));
}

TEST_CASE("command line exit codes") {
  const auto dir = test::scratch_dir("cli");
  CHECK(cli("--version") == 0);
  CHECK(cli("") == 1);
  CHECK(cli("frobnicate") == 1);
  CHECK(cli("basis -N 10 -M 11 -o " + (dir / "x.hfb").string()) == 1);
  CHECK(cli("basis -N 10 -o " + (dir / "x.hfb").string()) == 0);
  fs::create_directories(dir / "empty");
  CHECK(cli("detect " + (dir / "empty").string() + " -o " + (dir / "e.csv").string()) == 1);
  CHECK(cli("detect " + (dir / "missing").string() + " -o " + (dir / "e.csv").string()) == 2);
  CHECK(cli("decay -N 100 -n 75 -o " + (dir / "d.csv").string()) == 0);
  CHECK(csv_lines(dir / "d.csv").size() == 11);
  CHECK(cli("basis --lattice " + (dir / "nofile.txt").string() + " -o " + (dir / "y.hfb").string()) == 2);
}

TEST_CASE("exit code mapping") {
  CHECK(exit_code(Error(ErrorCode::InvalidArgument, "")) == 1);
  CHECK(exit_code(Error(ErrorCode::MalformedHeader, "")) == 2);
  CHECK(exit_code(Error(ErrorCode::InsufficientCoverage, "")) == 2);
  CHECK(exit_code(Error(ErrorCode::NonConvergence, "")) == 3);
  CHECK(exit_code(Error(ErrorCode::DegenerateLattice, "")) == 3);
}

TEST_CASE("data CSV reader") {
  const auto dir = test::scratch_dir("csv");
  std::ofstream(dir / "one.csv") << "value\n1\n2\n3\n";
  std::ofstream(dir / "two.csv") << "0.0,5\n0.5,6\n1.5,7\n";
  std::ofstream(dir / "bad.csv") << "t,value\n0,1\n1,x\n";
  const DataSeries a = read_data_csv(dir / "one.csv");
  CHECK(a.values.size() == 3);
  CHECK(a.lattice.kind() == LatticeKind::equidistant);
  const DataSeries b = read_data_csv(dir / "two.csv");
  CHECK(b.lattice.kind() == LatticeKind::perturbed);
  CHECK(b.values[2] == 7.0);
  CHECK_THROWS_AS(read_data_csv(dir / "bad.csv"), Error);
}

}  // TEST_SUITE

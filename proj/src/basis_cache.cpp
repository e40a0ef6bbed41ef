#include "hahnfit/basis_cache.hpp"

#include <bit>
#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace hahnfit {

namespace {

static_assert(std::endian::native == std::endian::little, "cache files are written in host byte order");

constexpr const char* kMagic = "HAHNFIT-BASIS 1";

std::string hex_float(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

double parse_double(const std::string& s, const std::string& field) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') fail(ErrorCode::Io, "basis cache: bad value for " + field + ": '" + s + "'");
  return v;
}

std::string hex_u64(std::uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

template <typename T>
void write_raw(std::ostream& out, const T* data, std::size_t count) {
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * sizeof(T)));
}

template <typename T>
void read_raw(std::istream& in, T* data, std::size_t count) {
  in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(count * sizeof(T)));
  if (!in) fail(ErrorCode::Io, "basis cache: truncated payload");
}

}  // namespace

void write_basis(std::ostream& out, const Basis& basis) {
  const Index rows = basis.values.rows();
  const Index cols = basis.values.cols();
  out << kMagic << '\n'
      << "points " << rows << '\n'
      << "max_degree " << cols - 1 << '\n'
      << "orth_tol " << hex_float(basis.orth_tol) << '\n'
      << "lattice_kind " << to_string(basis.lattice.kind()) << '\n'
      << "achieved_orth_err " << hex_float(basis.achieved_orth_err) << '\n'
      << "lattice_hash " << hex_u64(basis.lattice.hash()) << '\n'
      << "layout row-major float64\n"
      << "end\n";
  write_raw(out, basis.lattice.points().data(), static_cast<std::size_t>(rows));
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> row_major = basis.values;
  write_raw(out, row_major.data(), static_cast<std::size_t>(rows * cols));
  std::vector<std::int32_t> its(basis.iterations.begin(), basis.iterations.end());
  write_raw(out, its.data(), its.size());
  if (!out) fail(ErrorCode::Io, "basis cache: write failed");
}

Basis read_basis(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kMagic) fail(ErrorCode::Io, "basis cache: missing magic line");

  std::map<std::string, std::string> fields;
  while (std::getline(in, line) && line != "end") {
    const auto space = line.find(' ');
    if (space == std::string::npos) fail(ErrorCode::Io, "basis cache: malformed header line '" + line + "'");
    fields[line.substr(0, space)] = line.substr(space + 1);
  }
  if (line != "end") fail(ErrorCode::Io, "basis cache: header not terminated");
  for (const char* key : {"points", "max_degree", "orth_tol", "lattice_kind", "achieved_orth_err", "lattice_hash", "layout"})
    if (!fields.count(key)) fail(ErrorCode::Io, std::string("basis cache: missing header field ") + key);
  if (fields["layout"] != "row-major float64") fail(ErrorCode::Io, "basis cache: unsupported layout " + fields["layout"]);

  const Index rows = std::stol(fields["points"]);
  const Index cols = std::stol(fields["max_degree"]) + 1;
  if (rows < 2 || cols < 1 || cols > rows) fail(ErrorCode::Io, "basis cache: inconsistent dimensions");

  Eigen::VectorXd points(rows);
  read_raw(in, points.data(), static_cast<std::size_t>(rows));
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> row_major(rows, cols);
  read_raw(in, row_major.data(), static_cast<std::size_t>(rows * cols));
  std::vector<std::int32_t> its(static_cast<std::size_t>(cols));
  read_raw(in, its.data(), its.size());

  Basis basis{Lattice(std::move(points)), row_major, parse_double(fields["orth_tol"], "orth_tol"),
              parse_double(fields["achieved_orth_err"], "achieved_orth_err"),
              std::vector<int>(its.begin(), its.end())};
  if (to_string(basis.lattice.kind()) != fields["lattice_kind"])
    fail(ErrorCode::Io, "basis cache: lattice kind does not match the stored points");
  if (hex_u64(basis.lattice.hash()) != fields["lattice_hash"])
    fail(ErrorCode::Io, "basis cache: lattice hash does not match the stored points");
  return basis;
}

void save_basis(const std::filesystem::path& path, const Basis& basis) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  write_basis(out, basis);
}

Basis load_basis(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
  return read_basis(in);
}

void write_basis_csv(std::ostream& out, const Basis& basis) {
  out << "j,x";
  for (Index m = 0; m <= basis.max_degree(); ++m) out << ",q" << m;
  out << '\n';
  char buf[64];
  for (Index j = 0; j <= basis.upper_index(); ++j) {
    out << j;
    std::snprintf(buf, sizeof buf, ",%.17g", basis.lattice[j]);
    out << buf;
    for (Index m = 0; m <= basis.max_degree(); ++m) {
      std::snprintf(buf, sizeof buf, ",%.17g", basis.values(j, m));
      out << buf;
    }
    out << '\n';
  }
}

Lattice read_lattice_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open lattice file " + path.string());
  std::vector<double> pts;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto comma = line.rfind(',');
    std::string field = comma == std::string::npos ? line : line.substr(comma + 1);
    std::istringstream fs(field);
    double v;
    if (!(fs >> v)) {
      if (field.find_first_not_of(" \t\r") == std::string::npos) continue;
      // A non-numeric first line is a CSV header.
      if (pts.empty() && line_no == 1) continue;
      fail(ErrorCode::InvalidArgument, path.string() + ":" + std::to_string(line_no) + ": not a number");
    }
    pts.push_back(v);
  }
  return Lattice(Eigen::Map<const Eigen::VectorXd>(pts.data(), static_cast<Index>(pts.size())));
}

BasisCache::BasisCache(std::filesystem::path directory) : directory_(std::move(directory)) {
  std::filesystem::create_directories(*directory_);
}

std::string BasisCache::file_name(const Lattice& lattice, Index max_degree, double orth_tol) {
  return "basis-" + hex_u64(lattice.hash()) + "-m" + std::to_string(max_degree) + "-t" +
         hex_u64(std::bit_cast<std::uint64_t>(orth_tol)) + ".hfb";
}

std::shared_ptr<const Basis> BasisCache::get(const Lattice& lattice, Index max_degree, double orth_tol) {
  const Key key{lattice.hash(), max_degree, std::bit_cast<std::uint64_t>(orth_tol)};
  std::lock_guard lock(mutex_);
  if (auto it = entries_.find(key); it != entries_.end() && it->second->lattice == lattice) return it->second;

  std::shared_ptr<const Basis> basis;
  if (directory_) {
    const auto path = *directory_ / file_name(lattice, max_degree, orth_tol);
    if (std::filesystem::exists(path)) {
      try {
        auto loaded = std::make_shared<Basis>(load_basis(path));
        if (loaded->lattice == lattice && loaded->max_degree() == max_degree) basis = std::move(loaded);
      } catch (const Error&) {
        // unreadable cache entries are rebuilt and overwritten
      }
    }
  }
  if (!basis) {
    basis = std::make_shared<const Basis>(build_basis<double>(lattice, max_degree, orth_tol));
    ++builds_;
    if (directory_) save_basis(*directory_ / file_name(lattice, max_degree, orth_tol), *basis);
  }
  entries_[key] = basis;
  return basis;
}

std::size_t BasisCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

std::size_t BasisCache::builds() const {
  std::lock_guard lock(mutex_);
  return builds_;
}

}  // namespace hahnfit

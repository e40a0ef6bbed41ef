#pragma once

// Basis cache files and a keyed store of built bases.
//
// File layout (all multi-byte binary values little endian):
//
//   HAHNFIT-BASIS 1\n
//   points <N+1>\n
//   max_degree <M>\n
//   orth_tol <hex float>\n
//   lattice_kind <equidistant|perturbed>\n
//   achieved_orth_err <hex float>\n
//   lattice_hash <16 hex digits>\n
//   layout row-major float64\n
//   end\n
//   (N+1) float64       lattice abscissas
//   (N+1)*(M+1) float64 values, row j holds Q^_0(x_j) .. Q^_M(x_j)
//   (M+1) int32         sweeps per column
//
// Hex floats make the header values bit-exact on re-read.

#include "hahnfit/ortho_basis.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <tuple>

namespace hahnfit {

void write_basis(std::ostream& out, const Basis& basis);
Basis read_basis(std::istream& in);

void save_basis(const std::filesystem::path& path, const Basis& basis);
Basis load_basis(const std::filesystem::path& path);

/// Plain CSV: header "j,x,q0,...,qM", one row per lattice point.
void write_basis_csv(std::ostream& out, const Basis& basis);

/// Reads a lattice from a text file: one abscissa per line, '#' comments and
/// blank lines ignored; a trailing comma-separated column is also accepted.
Lattice read_lattice_file(const std::filesystem::path& path);

/// Shared bases keyed by (lattice hash, M, orth_tol). Thread safe. With a
/// directory, built bases are also persisted and reloaded across runs.
class BasisCache {
 public:
  BasisCache() = default;
  explicit BasisCache(std::filesystem::path directory);

  std::shared_ptr<const Basis> get(const Lattice& lattice, Index max_degree,
                                   double orth_tol = std::numeric_limits<double>::epsilon());

  std::size_t size() const;
  std::size_t builds() const;
  const std::optional<std::filesystem::path>& directory() const noexcept { return directory_; }

  static std::string file_name(const Lattice& lattice, Index max_degree, double orth_tol);

 private:
  using Key = std::tuple<std::uint64_t, Index, std::uint64_t>;

  std::optional<std::filesystem::path> directory_;
  mutable std::mutex mutex_;
  std::map<Key, std::shared_ptr<const Basis>> entries_;
  std::size_t builds_ = 0;
};

}  // namespace hahnfit

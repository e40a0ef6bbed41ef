#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string_view>

namespace hahnfit {

using Eigen::Index;

enum class LatticeKind { equidistant, perturbed };

std::string_view to_string(LatticeKind kind) noexcept;
LatticeKind lattice_kind_from_string(std::string_view s);

/// Strictly increasing sample abscissas x_0 < ... < x_N. The kind is derived
/// from the points: equidistant iff all steps agree to 1e-12 relative.
class Lattice {
 public:
  explicit Lattice(Eigen::VectorXd points);

  static Lattice equidistant(Index n_points, double start = 0.0, double step = 1.0);

  const Eigen::VectorXd& points() const noexcept { return points_; }
  double operator[](Index j) const { return points_[j]; }
  Index size() const noexcept { return points_.size(); }
  /// N, the largest index; the lattice has N + 1 points.
  Index upper_index() const noexcept { return points_.size() - 1; }
  LatticeKind kind() const noexcept { return kind_; }

  /// FNV-1a over the IEEE bytes of the points; stable across runs and hosts
  /// with the same endianness.
  std::uint64_t hash() const noexcept;

  friend bool operator==(const Lattice& a, const Lattice& b) {
    return a.points_.size() == b.points_.size() && a.points_ == b.points_;
  }

 private:
  Eigen::VectorXd points_;
  LatticeKind kind_;
};

/// Affine map of [x_0, x_N] onto [-1, 1]; the endpoints land exactly on -1 and 1.
Lattice normalize_lattice(const Lattice& lattice);

}  // namespace hahnfit

#include "hahnfit/lattice.hpp"

#include "hahnfit/error.hpp"

#include <cmath>
#include <cstring>
#include <string>

namespace hahnfit {

std::string_view to_string(LatticeKind kind) noexcept {
  return kind == LatticeKind::equidistant ? "equidistant" : "perturbed";
}

LatticeKind lattice_kind_from_string(std::string_view s) {
  if (s == "equidistant") return LatticeKind::equidistant;
  if (s == "perturbed") return LatticeKind::perturbed;
  fail(ErrorCode::InvalidArgument, "unknown lattice kind '" + std::string(s) + "'");
}

Lattice::Lattice(Eigen::VectorXd points) : points_(std::move(points)), kind_(LatticeKind::equidistant) {
  if (points_.size() < 2) fail(ErrorCode::InvalidArgument, "a lattice needs at least 2 points");
  for (Index j = 0; j < points_.size(); ++j)
    if (!std::isfinite(points_[j])) fail(ErrorCode::InvalidArgument, "lattice point " + std::to_string(j) + " is not finite");
  for (Index j = 1; j < points_.size(); ++j)
    if (!(points_[j] > points_[j - 1]))
      fail(ErrorCode::InvalidArgument, "lattice points must be strictly increasing (index " + std::to_string(j) + ")");

  const double first_step = points_[1] - points_[0];
  for (Index j = 2; j < points_.size(); ++j) {
    const double step = points_[j] - points_[j - 1];
    if (std::abs(step - first_step) > 1e-12 * std::abs(first_step)) {
      kind_ = LatticeKind::perturbed;
      break;
    }
  }
}

Lattice Lattice::equidistant(Index n_points, double start, double step) {
  if (n_points < 2) fail(ErrorCode::InvalidArgument, "a lattice needs at least 2 points");
  if (!(step > 0)) fail(ErrorCode::InvalidArgument, "lattice step must be positive");
  Eigen::VectorXd p(n_points);
  for (Index j = 0; j < n_points; ++j) p[j] = start + step * static_cast<double>(j);
  return Lattice(std::move(p));
}

std::uint64_t Lattice::hash() const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (Index j = 0; j < points_.size(); ++j) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &points_[j], sizeof(double));
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

Lattice normalize_lattice(const Lattice& lattice) {
  const double x0 = lattice[0];
  const double xN = lattice[lattice.upper_index()];
  if (!(xN > x0)) fail(ErrorCode::InvalidArgument, "cannot normalize a lattice with x_N == x_0");
  Eigen::VectorXd xn = (2.0 * (lattice.points().array() - x0) / (xN - x0) - 1.0).matrix();
  xn[0] = -1.0;
  xn[xn.size() - 1] = 1.0;
  return Lattice(std::move(xn));
}

}  // namespace hahnfit

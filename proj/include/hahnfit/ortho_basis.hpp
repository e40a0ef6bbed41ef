#pragma once

// Normalized discrete orthogonal polynomials on an arbitrary strictly
// increasing lattice. Columns are seeded with Legendre polynomials on the
// lattice mapped to [-1, 1] and then re-orthogonalized against all previous
// columns until the largest cross product with them is below 2 N orth_tol.
// On an equidistant lattice the result is the normalized Hahn family.

#include "hahnfit/error.hpp"
#include "hahnfit/lattice.hpp"
#include "hahnfit/summation.hpp"

#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace hahnfit {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

struct BuildOptions {
  int max_sweeps = 20;        ///< re-orthogonalization sweeps allowed per column
  double norm_floor = 1e-280;  ///< a projected seed below this norm is treated as dependent
};

/// Values Q^_m(x_j) for j = 0..N, m = 0..M. Immutable once built.
///
/// Sign convention: every column has a positive leading coefficient, so its
/// value at x_N is positive. Compared with the classical Hahn normalization
/// (Q_n(0) = 1) column n therefore equals (-1)^n Q^_n.
template <typename Scalar>
struct OrthoBasis {
  Lattice lattice;
  MatrixX<Scalar> values;
  Scalar orth_tol{};
  Scalar achieved_orth_err{};  ///< largest |column_i . column_j|, i != j, seen by the final checks
  std::vector<int> iterations;  ///< sweeps used per column (0 for column 0)

  Index upper_index() const noexcept { return values.rows() - 1; }
  Index max_degree() const noexcept { return values.cols() - 1; }
};

using Basis = OrthoBasis<double>;
using ExtendedBasis = OrthoBasis<long double>;

template <typename Scalar>
VectorX<Scalar> normalized_points(const Lattice& lattice) {
  const Index N = lattice.upper_index();
  const Scalar x0 = static_cast<Scalar>(lattice[0]);
  const Scalar span = static_cast<Scalar>(lattice[N]) - x0;
  if (!(span > 0)) fail(ErrorCode::InvalidArgument, "cannot normalize a lattice with x_N == x_0");
  VectorX<Scalar> xn(N + 1);
  for (Index j = 0; j <= N; ++j) xn[j] = Scalar(2) * (static_cast<Scalar>(lattice[j]) - x0) / span - Scalar(1);
  xn[0] = Scalar(-1);
  xn[N] = Scalar(1);
  return xn;
}

/// Legendre polynomials P_0..P_M evaluated at the normalized abscissas. They
/// are not orthogonal on a discrete lattice.
template <typename Scalar>
MatrixX<Scalar> legendre_seed(const VectorX<Scalar>& xn, Index M) {
  const Index N = xn.size() - 1;
  if (M < 0 || M > N)
    fail(ErrorCode::InvalidArgument,
         "max degree must satisfy 0 <= M <= N, got M = " + std::to_string(M) + ", N = " + std::to_string(N));
  MatrixX<Scalar> P(N + 1, M + 1);
  P.col(0).setOnes();
  if (M >= 1) P.col(1) = xn;
  for (Index d = 2; d <= M; ++d) {
    const Scalar n = static_cast<Scalar>(d - 1);
    P.col(d) = ((Scalar(2) * n + Scalar(1)) * xn.cwiseProduct(P.col(d - 1)) - n * P.col(d - 2)) / (n + Scalar(1));
  }
  return P;
}

template <typename Scalar = double>
MatrixX<Scalar> legendre_seed(const Lattice& normalized, Index M) {
  return legendre_seed<Scalar>(VectorX<Scalar>(normalized.points().template cast<Scalar>()), M);
}

template <typename Scalar = double>
OrthoBasis<Scalar> build_basis(const Lattice& lattice, Index M,
                               Scalar orth_tol = std::numeric_limits<Scalar>::epsilon(),
                               const BuildOptions& options = {}) {
  const Index N = lattice.upper_index();
  if (M < 0 || M > N)
    fail(ErrorCode::InvalidArgument,
         "max degree must satisfy 0 <= M <= N, got M = " + std::to_string(M) + ", N = " + std::to_string(N));
  if (!(orth_tol > 0)) fail(ErrorCode::InvalidArgument, "orth_tol must be positive");

  const Index rows = N + 1;
  MatrixX<Scalar> Q = legendre_seed<Scalar>(normalized_points<Scalar>(lattice), M);
  const Scalar threshold = Scalar(2) * static_cast<Scalar>(N) * orth_tol;
  auto dot = [rows](const Scalar* a, const Scalar* b) { return compensated_dot(a, b, rows); };

  OrthoBasis<Scalar> basis{lattice, {}, orth_tol, Scalar(0), std::vector<int>(static_cast<std::size_t>(M + 1), 0)};

  Q.col(0) /= std::sqrt(dot(Q.col(0).data(), Q.col(0).data()));

  VectorX<Scalar> u(rows), seed(rows);
  for (Index n = 1; n <= M; ++n) {
    seed = Q.col(n);
    u = seed;
    Scalar orth_err = std::numeric_limits<Scalar>::infinity();
    int sweeps = 0;
    // The stopping test is applied to the normalized candidate, so the bound
    // holds for the stored unit column.
    while (orth_err > threshold) {
      if (sweeps == options.max_sweeps)
        fail(ErrorCode::NonConvergence,
             "column " + std::to_string(n) + " still not orthogonal after " + std::to_string(sweeps) +
                 " sweeps; lattice may be degenerate or M too close to N for this precision");
      for (Index i = 0; i < n; ++i) {
        const Scalar c = dot(u.data(), Q.col(i).data());
        u -= c * Q.col(i);
      }
      const Scalar norm = std::sqrt(dot(u.data(), u.data()));
      if (!(norm >= static_cast<Scalar>(options.norm_floor)))
        fail(ErrorCode::DegenerateLattice,
             "column " + std::to_string(n) + " is numerically dependent on lower degrees (norm " +
                 std::to_string(static_cast<double>(norm)) + ")");
      u /= norm;
      orth_err = 0;
      for (Index i = 0; i < n; ++i) orth_err = std::max(orth_err, std::abs(dot(u.data(), Q.col(i).data())));
      ++sweeps;
    }
    // <u, P_n> = |u|^2 > 0 in exact arithmetic: keeps the leading coefficient positive.
    if (dot(u.data(), seed.data()) < 0) u = -u;
    Q.col(n) = u;
    basis.iterations[static_cast<std::size_t>(n)] = sweeps;
    basis.achieved_orth_err = std::max(basis.achieved_orth_err, orth_err);
  }
  basis.values = std::move(Q);
  return basis;
}

/// Column m of the basis as a read-only view.
template <typename Scalar>
auto basis_column(const OrthoBasis<Scalar>& basis, Index m) {
  if (m < 0 || m > basis.max_degree())
    fail(ErrorCode::InvalidArgument,
         "degree " + std::to_string(m) + " outside basis range 0.." + std::to_string(basis.max_degree()));
  return basis.values.col(m);
}

}  // namespace hahnfit

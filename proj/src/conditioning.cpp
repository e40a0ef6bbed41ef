#include "hahnfit/conditioning.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <Eigen/Core>

namespace hahnfit::detail {
using Wide = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<100>, boost::multiprecision::et_off>;
}

// Boost 1.74 ships an Eigen adapter that lacks members Eigen 3.4 needs
// (infinity, quiet_NaN); GenericNumTraits supplies them from numeric_limits.
template <>
struct Eigen::NumTraits<hahnfit::detail::Wide> : Eigen::GenericNumTraits<hahnfit::detail::Wide> {
  enum { RequireInitialization = 1, ReadCost = 20, AddCost = 30, MulCost = 60 };
  static Real dummy_precision() { return Real("1e-90"); }
};

#include <Eigen/Eigenvalues>

namespace hahnfit {

using detail::Wide;

double monomial_condition(const Lattice& lattice, Index degree) {
  require(degree >= 0 && degree < lattice.size(), "degree must be below the number of lattice points");
  const Index rows = lattice.size();
  Eigen::Matrix<Wide, Eigen::Dynamic, Eigen::Dynamic> V(rows, degree + 1);
  for (Index j = 0; j < rows; ++j) {
    Wide p = 1;
    const Wide x = lattice[j];
    for (Index k = 0; k <= degree; ++k) {
      V(j, k) = p;
      p *= x;
    }
  }
  const Eigen::Matrix<Wide, Eigen::Dynamic, Eigen::Dynamic> G = V.transpose() * V;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<Wide, Eigen::Dynamic, Eigen::Dynamic>> es(G, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return static_cast<double>(sqrt(ev.maxCoeff() / ev.minCoeff()));
}

double monomial_condition(Index points, Index degree) {
  require(points >= 2, "need at least 2 points");
  return monomial_condition(Lattice::equidistant(points, 0.0, 1.0 / static_cast<double>(points - 1)), degree);
}

double gram_condition(const Basis& basis) {
  const Eigen::MatrixXd G = basis.values.transpose() * basis.values;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff() / es.eigenvalues().minCoeff();
}

}  // namespace hahnfit

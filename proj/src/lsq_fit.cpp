#include "hahnfit/lsq_fit.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <ostream>

namespace hahnfit {

namespace {

void check_lattice(const Basis& basis, const DataSeries& series) {
  if (!(basis.lattice == series.lattice))
    fail(ErrorCode::LatticeMismatch, "series lattice (" + std::to_string(series.lattice.size()) +
                                         " points) differs from the basis lattice (" +
                                         std::to_string(basis.lattice.size()) + " points)");
}

// Coefficients of the centered/scaled series.
Eigen::VectorXd scaled_coefficients(const Basis& basis, const Eigen::VectorXd& g) {
  const Index rows = basis.values.rows();
  Eigen::VectorXd b(basis.values.cols());
  for (Index k = 0; k < b.size(); ++k) b[k] = compensated_dot(g.data(), basis.values.col(k).data(), rows);
  return b;
}

}  // namespace

DataSeries::DataSeries(Lattice lat, Eigen::VectorXd vals, std::string u)
    : lattice(std::move(lat)), values(std::move(vals)), unit(std::move(u)) {
  if (values.size() != lattice.size())
    fail(ErrorCode::InvalidArgument, "series has " + std::to_string(values.size()) + " values for " +
                                         std::to_string(lattice.size()) + " lattice points");
  if (!values.allFinite()) fail(ErrorCode::InvalidArgument, "series contains non-finite values");
}

SeriesScaling series_scaling(const Eigen::VectorXd& values) {
  SeriesScaling s;
  s.mean = compensated_sum(values) / static_cast<double>(values.size());
  s.scale = (values.array() - s.mean).abs().maxCoeff();
  if (!(s.scale > 0)) s.scale = 1.0;
  return s;
}

Eigen::VectorXd synthesize(const Basis& basis, const Eigen::VectorXd& coefficients, Index first, Index last) {
  const Index rows = basis.values.rows();
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(rows), err = Eigen::VectorXd::Zero(rows);
  for (Index k = std::max<Index>(first, 0); k <= last; ++k) {
    const double c = coefficients[k];
    const double* col = basis.values.col(k).data();
    for (Index j = 0; j < rows; ++j) {
      double p, pe, s, se;
      two_product(c, col[j], p, pe);
      two_sum(sum[j], p, s, se);
      sum[j] = s;
      err[j] += se + pe;
    }
  }
  return sum + err;
}

Eigen::VectorXd project(const Basis& basis, const DataSeries& series) {
  check_lattice(basis, series);
  const SeriesScaling sc = series_scaling(series.values);
  const Eigen::VectorXd g = (series.values.array() - sc.mean) / sc.scale;
  Eigen::VectorXd b = sc.scale * scaled_coefficients(basis, g);
  // Column 0 is the constant 1/sqrt(N+1).
  b[0] += sc.mean * std::sqrt(static_cast<double>(basis.values.rows()));
  return b;
}

FitResult detrend(const Basis& basis, const DataSeries& series, Index cutoff) {
  check_lattice(basis, series);
  if (cutoff < 0 || cutoff > basis.max_degree())
    fail(ErrorCode::InvalidArgument, "cutoff " + std::to_string(cutoff) + " outside 0.." +
                                         std::to_string(basis.max_degree()));
  const SeriesScaling sc = series_scaling(series.values);
  const Eigen::VectorXd g = (series.values.array() - sc.mean) / sc.scale;
  const Eigen::VectorXd bg = scaled_coefficients(basis, g);
  const Eigen::VectorXd fitted_g = synthesize(basis, bg, 0, cutoff);

  FitResult fit;
  fit.cutoff = cutoff;
  fit.coefficients = sc.scale * bg;
  fit.coefficients[0] += sc.mean * std::sqrt(static_cast<double>(basis.values.rows()));
  fit.residue = sc.scale * (g - fitted_g);
  fit.fitted = (sc.mean + sc.scale * fitted_g.array()).matrix();
  return fit;
}

Eigen::VectorXd residue_tail(const Basis& basis, const Eigen::VectorXd& coefficients, Index cutoff) {
  if (basis.max_degree() != basis.upper_index())
    fail(ErrorCode::InvalidArgument, "residue tail needs a complete basis (M = N)");
  if (coefficients.size() != basis.values.cols())
    fail(ErrorCode::InvalidArgument, "coefficient count does not match the basis");
  if (cutoff < -1 || cutoff > basis.max_degree())
    fail(ErrorCode::InvalidArgument, "cutoff " + std::to_string(cutoff) + " outside -1.." +
                                         std::to_string(basis.max_degree()));
  return synthesize(basis, coefficients, cutoff + 1, basis.max_degree());
}

void write_fit_csv(std::ostream& out, const DataSeries& series, const FitResult& fit) {
  out << "t,value,fitted,residue\n";
  char buf[160];
  for (Index j = 0; j < series.values.size(); ++j) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", series.lattice[j], series.values[j], fit.fitted[j],
                  fit.residue[j]);
    out << buf;
  }
}

nlohmann::json fit_metadata(const Basis& basis, const DataSeries& series, const FitResult& fit) {
  nlohmann::json j;
  j["cutoff"] = fit.cutoff;
  j["unit"] = series.unit;
  j["points"] = series.lattice.size();
  j["lattice_kind"] = std::string(to_string(series.lattice.kind()));
  j["max_degree"] = basis.max_degree();
  j["orth_tol"] = basis.orth_tol;
  j["achieved_orth_err"] = basis.achieved_orth_err;
  j["coefficients"] = std::vector<double>(fit.coefficients.data(), fit.coefficients.data() + fit.coefficients.size());
  j["residue_max_abs"] = fit.residue.cwiseAbs().maxCoeff();
  return j;
}

}  // namespace hahnfit

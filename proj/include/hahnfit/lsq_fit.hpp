#pragma once

// Least-squares polynomial trends through an orthonormal basis:
//   b_k     = f . Q^_k
//   p_m     = sum_{k<=m} b_k Q^_k
//   res_m   = f - p_m = sum_{k>m} b_k Q^_k   (full basis)
//
// The series is centered on its mean and divided by its largest deviation
// before projection; the transform is undone on output. Degree 0 absorbs the
// shift exactly, so residues are unaffected analytically.

#include "hahnfit/ortho_basis.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>

namespace hahnfit {

struct DataSeries {
  Lattice lattice;
  Eigen::VectorXd values;
  std::string unit;

  DataSeries(Lattice lattice, Eigen::VectorXd values, std::string unit = {});
};

struct FitResult {
  Eigen::VectorXd coefficients;  ///< b_0..b_M against the full basis
  Index cutoff = 0;
  Eigen::VectorXd fitted;   ///< p_cutoff at each lattice point
  Eigen::VectorXd residue;  ///< res_cutoff at each lattice point
};

/// Mean and scale used for conditioning a series (scale is 1 for a constant series).
struct SeriesScaling {
  double mean = 0.0;
  double scale = 1.0;
};

SeriesScaling series_scaling(const Eigen::VectorXd& values);

Eigen::VectorXd project(const Basis& basis, const DataSeries& series);

FitResult detrend(const Basis& basis, const DataSeries& series, Index cutoff);

/// Residue synthesized from coefficients cutoff+1..N alone; requires M = N.
/// cutoff = -1 reconstructs the whole series.
Eigen::VectorXd residue_tail(const Basis& basis, const Eigen::VectorXd& coefficients, Index cutoff);

/// sum_k coeffs[k] * column_k with compensated accumulation per grid point.
Eigen::VectorXd synthesize(const Basis& basis, const Eigen::VectorXd& coefficients, Index first, Index last);

/// CSV with header "t,value,fitted,residue".
void write_fit_csv(std::ostream& out, const DataSeries& series, const FitResult& fit);

/// Sidecar metadata: cutoff, unit, lattice description and coefficients.
nlohmann::json fit_metadata(const Basis& basis, const DataSeries& series, const FitResult& fit);

}  // namespace hahnfit

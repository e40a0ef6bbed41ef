#pragma once

// Why the monomial basis fails: condition numbers of the Vandermonde design
// matrix versus the Gram matrix of an orthonormal basis.

#include "hahnfit/ortho_basis.hpp"

namespace hahnfit {

/// 2-norm condition number of the design matrix [x_j^k], k = 0..degree,
/// computed as sqrt(cond(V^T V)) with the Gram matrix formed and diagonalized
/// in 100-digit arithmetic.
double monomial_condition(const Lattice& lattice, Index degree);

/// Same on the equidistant unit-interval lattice {0, 1/(points-1), ..., 1}.
double monomial_condition(Index points, Index degree);

/// Condition number of B^T B for the columns of an orthonormal basis.
double gram_condition(const Basis& basis);

}  // namespace hahnfit

#pragma once

// Closed-form Hahn (discrete Chebyshev) polynomials with unit weights on the
// lattice {0, 1, ..., N}, and the endpoint-decay estimates built on the
// summand structure of their explicit formula.

#include <cstdint>
#include <vector>

namespace hahnfit {

/// Degree and lattice size of one Hahn polynomial Q_n^N. The family
/// parameters alpha = beta = 0 are fixed.
struct HahnParams {
  int N = 1;  ///< upper lattice index; the grid has N + 1 points
  int n = 0;  ///< degree, 0 <= n <= N

  HahnParams() = default;
  HahnParams(int upper_index, int degree);
};

/// A real number stored as sign and natural-log magnitude. sign == 0 means an
/// exact zero (log_abs is then -infinity).
struct SignedLog {
  int sign = 0;
  double log_abs = 0.0;

  double value() const;
  double log10_abs() const;
};

/// Generalized Pochhammer symbol: rising product for k > 0, 1 for k = 0 and
/// the falling product a(a-1)...(a+k+1) for k < 0. Overflows to +-inf.
double pochhammer(double a, int k);

/// Q_n^N(x) for any real x. Summands are formed in sign/log-magnitude form and
/// accumulated after rescaling by the largest one.
double hahn_value(const HahnParams& p, double x);
SignedLog hahn_log_value(const HahnParams& p, double x);

/// Squared Euclidean norm of Q_n^N on the lattice.
double hahn_norm_sq(const HahnParams& p);
double hahn_log_norm_sq(const HahnParams& p);

/// Q_n^N(x) / sqrt(h_n^N).
double normalized_hahn_value(const HahnParams& p, double x);
SignedLog normalized_hahn_log_value(const HahnParams& p, double x);

struct SummandProfile {
  int N = 0, n = 0, m = 0;
  std::vector<double> values;   ///< signed summands (-1)^k q(k), k = 0..min(m, n)
  std::vector<double> log_abs;  ///< natural log of |q(k)|, never overflows
  int peak_index = 0;           ///< k~
  double peak_abs = 0.0;        ///< q~ = |q(k~)|
  double peak_log_abs = 0.0;
  bool ratio_scan_used = true;  ///< false if the full-scan fallback decided the peak
};

/// Summands of Q_n^N(m) at an integer lattice point, 0 <= m <= n <= N.
SummandProfile summand_profile(int N, int n, int m);

/// |q(k) / q(k-1)| for 1 <= k <= min(m, n).
double summand_ratio(int N, int n, int m, int k);

/// The cubic whose root separates growing from decaying summands.
double cubic_f(int N, int n, int m, double k);

/// Same cubic written with the substitutions N~ = N + 2, n~ = n(n + 1), m~ = m + 1.
double cubic_f_substituted(double N_t, double n_t, double m_t, double k);

struct RootBounds {
  double lower = 0.0;  ///< secant step from k0 = m~, k1 = 0
  double upper = 0.0;  ///< one Newton step from k0 = m~
  bool in_regime = false;   ///< n >= N/2 and m <= N/10
  bool bracketed = false;   ///< f(lower) >= 0 >= f(upper)
};

RootBounds root_bounds(int N, int n, int m);

/// m * q~ / sqrt(h_n^N): upper estimate of |Q^_n^N(m)| for m >= 1.
double decay_bound(int N, int n, int m);

/// Same bound before normalization, m * q~, comparable to |Q_n^N(m)|.
double decay_bound_unnormalized(int N, int n, int m);

}  // namespace hahnfit

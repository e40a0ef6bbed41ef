#include "hahnfit/hahn.hpp"

#include "hahnfit/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace hahnfit {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double lfact(int k) { return std::lgamma(static_cast<double>(k) + 1.0); }

void check_params(int N, int n) {
  if (N < 1) fail(ErrorCode::InvalidArgument, "Hahn lattice needs N >= 1, got N = " + std::to_string(N));
  if (n < 0 || n > N)
    fail(ErrorCode::InvalidArgument,
         "Hahn degree must satisfy 0 <= n <= N, got n = " + std::to_string(n) + ", N = " + std::to_string(N));
}

// Sum of signed terms given as (sign, log|t|): rescale by the largest
// magnitude, add smallest first with Neumaier compensation in long double.
SignedLog sum_signed_logs(const std::vector<SignedLog>& terms) {
  double top = kNegInf;
  for (const auto& t : terms)
    if (t.sign != 0) top = std::max(top, t.log_abs);
  if (top == kNegInf) return {0, kNegInf};

  std::vector<long double> scaled;
  scaled.reserve(terms.size());
  for (const auto& t : terms)
    if (t.sign != 0) scaled.push_back(t.sign * std::exp(static_cast<long double>(t.log_abs - top)));
  std::sort(scaled.begin(), scaled.end(),
            [](long double a, long double b) { return std::abs(a) < std::abs(b); });

  long double sum = 0, c = 0;
  for (long double v : scaled) {
    const long double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      c += (sum - t) + v;
    else
      c += (v - t) + sum;
    sum = t;
  }
  sum += c;
  if (sum == 0) return {0, kNegInf};
  return {sum > 0 ? 1 : -1, static_cast<double>(std::log(std::abs(sum))) + top};
}

// log|q(k)| for the integer-argument summand, without (x)_{-k}.
double log_summand_coefficient(int N, int n, int k) {
  return lfact(n + k) - lfact(n - k) - 2.0 * lfact(k) - lfact(N) + lfact(N - k);
}

}  // namespace

HahnParams::HahnParams(int upper_index, int degree) : N(upper_index), n(degree) { check_params(N, n); }

double SignedLog::value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }

double SignedLog::log10_abs() const { return log_abs / std::log(10.0); }

double pochhammer(double a, int k) {
  double r = 1.0;
  if (k > 0) {
    for (int i = 0; i < k; ++i) r *= a + i;
  } else if (k < 0) {
    for (int i = 0; i < -k; ++i) r *= a - i;
  }
  return r;
}

SignedLog hahn_log_value(const HahnParams& p, double x) {
  check_params(p.N, p.n);
  std::vector<SignedLog> terms;
  terms.reserve(static_cast<std::size_t>(p.n) + 1);

  // (x)_{-k} = x (x-1) ... (x-k+1), accumulated factor by factor.
  int falling_sign = 1;
  double falling_log = 0.0;
  for (int k = 0; k <= p.n; ++k) {
    if (k > 0) {
      const double factor = x - (k - 1);
      if (factor == 0.0) break;  // (x)_{-j} vanishes for every j >= k
      if (factor < 0) falling_sign = -falling_sign;
      falling_log += std::log(std::abs(factor));
    }
    const int sign = (k % 2 == 0 ? 1 : -1) * falling_sign;
    terms.push_back({sign, log_summand_coefficient(p.N, p.n, k) + falling_log});
  }
  return sum_signed_logs(terms);
}

double hahn_value(const HahnParams& p, double x) { return hahn_log_value(p, x).value(); }

double hahn_log_norm_sq(const HahnParams& p) {
  check_params(p.N, p.n);
  // (N+1)_{n+1} / ((2n+1) (N)_{-n})
  return lfact(p.N + p.n + 1) - lfact(p.N) - std::log(2.0 * p.n + 1.0) - (lfact(p.N) - lfact(p.N - p.n));
}

double hahn_norm_sq(const HahnParams& p) { return std::exp(hahn_log_norm_sq(p)); }

SignedLog normalized_hahn_log_value(const HahnParams& p, double x) {
  SignedLog v = hahn_log_value(p, x);
  if (v.sign != 0) v.log_abs -= 0.5 * hahn_log_norm_sq(p);
  return v;
}

double normalized_hahn_value(const HahnParams& p, double x) { return normalized_hahn_log_value(p, x).value(); }

SummandProfile summand_profile(int N, int n, int m) {
  check_params(N, n);
  if (m < 0 || m > n)
    fail(ErrorCode::InvalidArgument,
         "summand profile needs 0 <= m <= n, got m = " + std::to_string(m) + ", n = " + std::to_string(n));

  SummandProfile prof;
  prof.N = N;
  prof.n = n;
  prof.m = m;
  const int K = std::min(m, n);
  for (int k = 0; k <= K; ++k) {
    const double lg = log_summand_coefficient(N, n, k) + lfact(m) - lfact(m - k);
    prof.log_abs.push_back(lg);
    prof.values.push_back((k % 2 == 0 ? 1.0 : -1.0) * std::exp(lg));
  }

  // First k with r(k) <= 1 marks the peak at k - 1; this is the maximum only if
  // r - 1 changes sign once.
  int peak = K;
  for (int k = 1; k <= K; ++k) {
    if (summand_ratio(N, n, m, k) <= 1.0) {
      peak = k - 1;
      break;
    }
  }
  bool monotone = true;
  for (int k = peak + 1; k <= K; ++k)
    if (summand_ratio(N, n, m, k) > 1.0) monotone = false;

  if (!monotone) {
    peak = static_cast<int>(std::max_element(prof.log_abs.begin(), prof.log_abs.end()) - prof.log_abs.begin());
    prof.ratio_scan_used = false;
  }
  prof.peak_index = peak;
  prof.peak_log_abs = prof.log_abs[static_cast<std::size_t>(peak)];
  prof.peak_abs = std::exp(prof.peak_log_abs);
  return prof;
}

double summand_ratio(int N, int n, int m, int k) {
  if (k < 1 || k > std::min(m, n))
    fail(ErrorCode::InvalidArgument, "summand ratio needs 1 <= k <= min(m, n), got k = " + std::to_string(k));
  const double num = static_cast<double>(n - k + 1) * (n + k) * (m - k + 1);
  const double den = static_cast<double>(k) * k * (N - k + 1);
  return num / den;
}

double cubic_f(int N, int n, int m, double k) {
  const double nn = static_cast<double>(n) * (n + 1);
  return 2.0 * k * k * k - (N + m + 3.0) * k * k + ((m + 1.0) - nn) * k + (m + 1.0) * nn;
}

double cubic_f_substituted(double N_t, double n_t, double m_t, double k) {
  return 2.0 * k * k * k - (N_t + m_t) * k * k + (m_t - n_t) * k + m_t * n_t;
}

RootBounds root_bounds(int N, int n, int m) {
  check_params(N, n);
  if (m < 0) fail(ErrorCode::InvalidArgument, "root bounds need m >= 0");
  const double Nt = N + 2.0;
  const double nt = static_cast<double>(n) * (n + 1);
  const double mt = m + 1.0;

  RootBounds rb;
  const double secant_den = nt - (mt + 1.0 - Nt) * mt;
  if (secant_den == 0.0) fail(ErrorCode::InvalidArgument, "secant step has a zero denominator");
  rb.lower = mt * nt / secant_den;

  const double slope = 6.0 * mt * mt - 2.0 * (Nt + mt) * mt + (mt - nt);
  if (slope == 0.0) fail(ErrorCode::InvalidArgument, "Newton step has a zero derivative");
  rb.upper = mt - cubic_f_substituted(Nt, nt, mt, mt) / slope;

  rb.in_regime = 2 * n >= N && 10 * m <= N;
  rb.bracketed = rb.lower <= rb.upper && cubic_f(N, n, m, rb.lower) >= 0.0 && cubic_f(N, n, m, rb.upper) <= 0.0;
  return rb;
}

double decay_bound_unnormalized(int N, int n, int m) {
  if (m < 1) fail(ErrorCode::InvalidArgument, "decay bound needs m >= 1");
  const SummandProfile prof = summand_profile(N, n, m);
  return std::exp(std::log(static_cast<double>(m)) + prof.peak_log_abs);
}

double decay_bound(int N, int n, int m) {
  if (m < 1) fail(ErrorCode::InvalidArgument, "decay bound needs m >= 1");
  const SummandProfile prof = summand_profile(N, n, m);
  return std::exp(std::log(static_cast<double>(m)) + prof.peak_log_abs - 0.5 * hahn_log_norm_sq({N, n}));
}

}  // namespace hahnfit

#include "hahnfit/hahn_exact.hpp"

#include "hahnfit/error.hpp"

#include <string>

namespace hahnfit::exact {

namespace {

void check(int N, int n) {
  if (N < 1 || N > kMaxExactN)
    fail(ErrorCode::InvalidArgument, "exact Hahn path supports 1 <= N <= " + std::to_string(kMaxExactN));
  if (n < 0 || n > N) fail(ErrorCode::InvalidArgument, "exact Hahn path needs 0 <= n <= N");
}

}  // namespace

Rational pochhammer(const Rational& a, int k) {
  Rational r = 1;
  if (k > 0) {
    for (int i = 0; i < k; ++i) r *= a + i;
  } else if (k < 0) {
    for (int i = 0; i < -k; ++i) r *= a - i;
  }
  return r;
}

Rational hahn_value(int N, int n, const Rational& x) {
  check(N, n);
  Rational sum = 0;
  Rational fact = 1;
  for (int k = 0; k <= n; ++k) {
    if (k > 0) fact *= k;
    Rational term = pochhammer(Rational(n), -k) * pochhammer(Rational(n + 1), k) * pochhammer(x, -k);
    term /= fact * fact * pochhammer(Rational(N), -k);
    if (k % 2 == 1) term = -term;
    sum += term;
  }
  return sum;
}

Rational hahn_norm_sq(int N, int n) {
  check(N, n);
  return pochhammer(Rational(N + 1), n + 1) / (Rational(2 * n + 1) * pochhammer(Rational(N), -n));
}

Float100 to_float(const Rational& r) {
  return Float100(numerator(r)) / Float100(denominator(r));
}

Float100 normalized_hahn_value(int N, int n, const Rational& x) {
  const Float100 q = to_float(hahn_value(N, n, x));
  const Float100 h = to_float(hahn_norm_sq(N, n));
  return q / sqrt(h);
}

}  // namespace hahnfit::exact

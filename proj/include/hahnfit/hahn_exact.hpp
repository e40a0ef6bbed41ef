#pragma once

// Exact rational evaluation of Hahn polynomials for small lattices. Every
// quantity in the explicit formula is rational at rational x, so Q_n^N(x) and
// h_n^N are computed without rounding; only the final square root of the
// normalization is taken in 100-digit binary floating point.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

namespace hahnfit::exact {

using Rational = boost::multiprecision::cpp_rational;
using Float100 = boost::multiprecision::cpp_bin_float_100;

inline constexpr int kMaxExactN = 40;

Rational pochhammer(const Rational& a, int k);

/// Q_n^N(x), exact.
Rational hahn_value(int N, int n, const Rational& x);

/// h_n^N, exact.
Rational hahn_norm_sq(int N, int n);

Float100 to_float(const Rational& r);

/// Q_n^N(x) / sqrt(h_n^N) rounded to 100 digits.
Float100 normalized_hahn_value(int N, int n, const Rational& x);

}  // namespace hahnfit::exact

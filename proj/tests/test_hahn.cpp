#include "hahnfit/error.hpp"
#include "hahnfit/hahn.hpp"
#include "hahnfit/hahn_exact.hpp"
#include "test_support.hpp"

#include <cmath>

using namespace hahnfit;
using test::rel_err;

TEST_SUITE("hahn") {

TEST_CASE("pochhammer rising, falling and empty products") {
  CHECK(pochhammer(3.0, 2) == 12.0);
  CHECK(pochhammer(5.0, 0) == 1.0);
  CHECK(pochhammer(-3.0, 4) == 0.0);
  CHECK(pochhammer(4.0, -2) == 12.0);
  CHECK(rel_err(pochhammer(0.3, -10), -42883.5962471301) < 1e-12);
}

TEST_CASE("pochhammer reflection (a)_{-k} = (-1)^k (-a)_k, exhaustive for |a| <= 20") {
  int checked = 0;
  for (int twice_a = -40; twice_a <= 40; ++twice_a) {
    const double a = twice_a / 2.0;
    for (int k = 0; k <= 20; ++k) {
      const double lhs = pochhammer(a, -k);
      const double rhs = (k % 2 ? -1.0 : 1.0) * pochhammer(-a, k);
      if (rhs == 0.0)
        CHECK(lhs == 0.0);
      else
        CHECK(rel_err(lhs, rhs) < 1e-14);
      ++checked;
    }
  }
  CHECK(checked == 81 * 21);
}

TEST_CASE("exact rational pochhammer matches the double version") {
  for (int k = -6; k <= 6; ++k) {
    const double want = pochhammer(2.5, k);
    const double got = static_cast<double>(exact::to_float(exact::pochhammer(exact::Rational(5, 2), k)));
    CHECK(rel_err(got, want) < 1e-15);
  }
}

TEST_CASE("closed form agrees with the exact rational evaluation") {
  // The alternating sum cancels near x = N; the error grows about fourfold per
  // unit of N, 7e-9 by N = 14. The basis builder is the accurate path there.
  double worst = 0;
  for (int N = 1; N <= 10; ++N)
    for (int n = 0; n <= N; ++n)
      for (int x = 0; x <= N; ++x) {
        const double want = static_cast<double>(exact::normalized_hahn_value(N, n, x));
        worst = std::max(worst, std::abs(normalized_hahn_value({N, n}, x) - want));
      }
  CHECK(worst < 1e-10);
}

TEST_CASE("norms agree with the exact rational norms") {
  for (int N : {5, 17, 40})
    for (int n = 0; n <= N; n += 3) {
      const double want = static_cast<double>(exact::to_float(exact::hahn_norm_sq(N, n)));
      CHECK(rel_err(hahn_norm_sq({N, n}), want) < 1e-12);
    }
}

TEST_CASE("frozen high-precision values") {
  // Independent 60-80 digit evaluations of the explicit sum.
  struct Row {
    int N, n;
    double x, value;
  };
  const Row rows[] = {
      {10, 3, 2, -0.33588764910385261},
      {20, 7, 5, 0.17172934923497381},
      {30, 30, 0, 2.9078543543431414e-9},
      {30, 15, 14, -0.18887174389315365},
      {40, 25, 3, -0.088533425031657801},
      {30, 30, 0.5, -1239794.1390440999},
      {100, 75, 0.5, -49877476254.164049},
      {100, 75, 2, 3.1613807832060378e-11},
      {384, 200, 1, -1.5683486030976609e-22},
  };
  for (const auto& r : rows) {
    CAPTURE(r.N);
    CAPTURE(r.n);
    CAPTURE(r.x);
    CHECK(rel_err(normalized_hahn_value({r.N, r.n}, r.x), r.value) < 1e-8);
  }
}

TEST_CASE("direct summation cannot resolve the 1000/750/100 value") {
  // The summands reach 1e124 while the normalized value is 1.3e-27, so the
  // explicit formula in double precision only gets the order of the peak.
  const double v = normalized_hahn_value({1000, 750}, 100);
  CHECK(rel_err(v, 1.3120893374702304e-27) > 1e-3);
}

TEST_CASE("published table of Q^_30^30 at integer and half-integer points") {
  const double ints[] = {2.9078544e-9, -8.7235631e-8, 1.2649166e-6, -1.1805889e-5};
  for (int x = 0; x < 4; ++x) CHECK(rel_err(normalized_hahn_value({30, 30}, x), ints[x]) < 1e-6);
  const double halves[] = {-1239794.1, 67920.405, -6460.054, 898.31019};
  for (int i = 0; i < 4; ++i) CHECK(rel_err(normalized_hahn_value({30, 30}, 0.5 + i), halves[i]) < 1e-6);
}

TEST_CASE("Q^_75^100 order of magnitude pattern") {
  const double x[] = {0, 0.5, 1, 1.5, 2, 2.5, 3, 3.5, 4, 4.5, 5};
  const double v[] = {2.07e-14, -4.99e10, -1.16e-12, 1.41e9, 3.16e-11, -6.8e7, -5.59e-10, 4.76e6, 7.2e-9, -4.4e5, -7.2e-8};
  for (int i = 0; i < 11; ++i) {
    CAPTURE(x[i]);
    const double got = normalized_hahn_value({100, 75}, x[i]);
    CHECK(std::abs(std::log10(std::abs(got)) - std::log10(std::abs(v[i]))) < 0.05);
    CHECK((got < 0) == (v[i] < 0));
  }
}

TEST_CASE("log form does not overflow where the value does") {
  const SignedLog v = normalized_hahn_log_value({3000, 2000}, 0.5);
  CHECK(v.sign != 0);
  CHECK(std::isfinite(v.log_abs));
  CHECK(std::isfinite(normalized_hahn_log_value({3000, 2000}, 7).log_abs));
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(HahnParams(0, 0), Error);
  CHECK_THROWS_AS(HahnParams(10, 11), Error);
  CHECK_THROWS_AS(HahnParams(10, -1), Error);
  CHECK_THROWS_AS(summand_profile(100, 75, 76), Error);
  CHECK_THROWS_AS(summand_ratio(100, 75, 5, 0), Error);
  CHECK_THROWS_AS(summand_ratio(100, 75, 5, 6), Error);
  CHECK_THROWS_AS(decay_bound(100, 75, 0), Error);
  CHECK_THROWS_AS(exact::hahn_value(41, 3, 2), Error);
}

TEST_CASE("summands add up to the polynomial value") {
  for (int m : {1, 4, 9}) {
    const SummandProfile p = summand_profile(40, 30, m);
    double sum = 0;
    for (double s : p.values) sum += s;
    CHECK(std::abs(sum - hahn_value({40, 30}, m)) <= 1e-9 * p.peak_abs);
  }
}

TEST_CASE("summand ratio is consistent with consecutive summands") {
  const SummandProfile p = summand_profile(100, 75, 8);
  for (int k = 1; k <= 8; ++k)
    CHECK(rel_err(std::exp(p.log_abs[k] - p.log_abs[k - 1]), summand_ratio(100, 75, 8, k)) < 1e-12);
}

TEST_CASE("peak index of the 1000/750/100 summand profile") {
  const SummandProfile p = summand_profile(1000, 750, 100);
  CHECK(p.peak_index == 88);
  CHECK(std::abs(p.peak_log_abs / std::log(10.0) - 124.352119337896) < 1e-9);
  CHECK(std::abs(p.log_abs[1] / std::log(10.0) - 4.7507012004) < 1e-9);
  CHECK(std::abs(p.log_abs[100] / std::log(10.0) - 119.066576649) < 1e-9);
  CHECK(p.ratio_scan_used);
}

TEST_CASE("decay table for N = 100, n = 75") {
  const int k_tilde[] = {1, 2, 3, 4, 5, 6, 7, 7, 8, 9};
  for (int m = 1; m <= 10; ++m) {
    CAPTURE(m);
    CHECK(summand_profile(100, 75, m).peak_index == k_tilde[m - 1]);
    CHECK(decay_bound(100, 75, m) >= std::abs(normalized_hahn_value({100, 75}, m)));
    CHECK(decay_bound_unnormalized(100, 75, m) >= std::abs(hahn_value({100, 75}, m)));
  }
}

TEST_CASE("substituted cubic equals the original") {
  for (double k : {0.0, 1.5, 5.0, 9.25})
    CHECK(std::abs(cubic_f(100, 75, 5, k) - cubic_f_substituted(102, 75 * 76, 6, k)) <= 1e-9 * 102 * 75 * 76);
}

TEST_CASE("root bounds bracket the real root at (100, 75, 5)") {
  const RootBounds rb = root_bounds(100, 75, 5);
  const double root = 5.49235066199193;
  CHECK(rb.in_regime);
  CHECK(rb.bracketed);
  CHECK(rb.lower <= root);
  CHECK(rb.upper >= root);
  CHECK(std::abs(rb.lower - 5.4545) < 1e-3);
  CHECK(std::abs(rb.upper - 5.495) < 1e-3);
}

TEST_CASE("root bounds regime flag") {
  CHECK_FALSE(root_bounds(100, 30, 5).in_regime);
  CHECK_FALSE(root_bounds(100, 75, 20).in_regime);
}

}  // TEST_SUITE

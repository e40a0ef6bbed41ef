#pragma once

// Error-free transformations and compensated reductions (Ogita, Rump & Oishi).
// Results are as accurate as if computed in twice the working precision and
// then rounded.

#include <Eigen/Core>

#include <cmath>
#include <span>

namespace hahnfit {

template <typename Scalar>
inline void two_sum(Scalar a, Scalar b, Scalar& sum, Scalar& err) {
  sum = a + b;
  const Scalar z = sum - a;
  err = (a - (sum - z)) + (b - z);
}

template <typename Scalar>
inline void two_product(Scalar a, Scalar b, Scalar& prod, Scalar& err) {
  prod = a * b;
  err = std::fma(a, b, -prod);
}

template <typename Scalar>
Scalar compensated_dot(const Scalar* a, const Scalar* b, Eigen::Index n) {
  Scalar p = 0, s = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    Scalar h, r, q;
    two_product(a[i], b[i], h, r);
    two_sum(p, h, p, q);
    s += q + r;
  }
  return p + s;
}

template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar compensated_dot(const Eigen::MatrixBase<DerivedA>& a,
                                          const Eigen::MatrixBase<DerivedB>& b) {
  static_assert(std::is_same_v<typename DerivedA::Scalar, typename DerivedB::Scalar>);
  eigen_assert(a.size() == b.size());
  // Column vectors of plain matrices are contiguous; anything else is evaluated first.
  const Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, 1> ea = a, eb = b;
  return compensated_dot(ea.data(), eb.data(), ea.size());
}

// Neumaier's variant of Kahan summation.
template <typename Scalar>
Scalar compensated_sum(std::span<const Scalar> values) {
  Scalar sum = 0, c = 0;
  for (Scalar v : values) {
    const Scalar t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      c += (sum - t) + v;
    else
      c += (v - t) + sum;
    sum = t;
  }
  return sum + c;
}

template <typename Derived>
typename Derived::Scalar compensated_sum(const Eigen::DenseBase<Derived>& values) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v = values.reshaped();
  return compensated_sum(std::span<const Scalar>(v.data(), static_cast<std::size_t>(v.size())));
}

}  // namespace hahnfit

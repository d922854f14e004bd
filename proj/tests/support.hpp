#pragma once

#include <gtest/gtest.h>

#include <string>

#include "wbavg/wbavg.hpp"

namespace wbavg::testing {

inline ::testing::AssertionResult near(const Real& a, const Real& b, const Real& tol) {
  Real d = abs(a - b);
  if (d <= tol) return ::testing::AssertionSuccess();
  return ::testing::AssertionFailure() << a.to_string(30) << " vs " << b.to_string(30) << " differ by "
                                       << d.to_string(6) << " > " << tol.to_string(6);
}

inline ::testing::AssertionResult near(const Complex& a, const Complex& b, const Real& tol) {
  Real d = abs(a - b);
  if (d <= tol) return ::testing::AssertionSuccess();
  return ::testing::AssertionFailure() << a << " vs " << b << " differ by " << d.to_string(6) << " > "
                                       << tol.to_string(6);
}

inline ::testing::AssertionResult near(const ComplexMatrix& a, const ComplexMatrix& b, const Real& tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return ::testing::AssertionFailure() << "shape differs";
  Real d = (a - b).max_abs();
  if (d <= tol) return ::testing::AssertionSuccess();
  return ::testing::AssertionFailure() << "max entry difference " << d.to_string(6) << " > " << tol.to_string(6);
}

inline Real pow10(long e, long bits) { return pow(Real(10L, bits), Real(e, bits)); }

// Independent reference values built from + - * / only.

// arctan(1/k) by its alternating series.
inline Real arctan_inverse(long k, long bits) {
  Real sum(bits), term(1L, bits), k2(k * k, bits);
  term /= k;
  const Real eps = power_of_two(-bits - 8, bits);
  for (long j = 0;; ++j) {
    Real t = term / (2 * j + 1);
    if (j % 2 == 0) sum += t;
    else sum -= t;
    if (abs(t) < eps) break;
    term /= k2;
  }
  return sum;
}

// Machin: pi = 16 atan(1/5) - 4 atan(1/239)
inline Real machin_pi(long bits) { return arctan_inverse(5, bits) * 16L - arctan_inverse(239, bits) * 4L; }

// cos x for moderate |x| via reduction by the Machin pi and a Taylor series.
inline Real taylor_cos(const Real& x, long bits) {
  Real pi = machin_pi(bits);
  Real two_pi = pi * 2L;
  Real k = floor(Real(x, bits) / two_pi);
  Real r = Real(x, bits) - k * two_pi;
  Real sum(1L, bits), term(1L, bits), r2 = r * r;
  const Real eps = power_of_two(-bits - 8, bits);
  for (long j = 1;; ++j) {
    term *= r2;
    term /= (2 * j - 1) * (2 * j);
    term = -term;
    sum += term;
    if (abs(term) < eps) break;
  }
  return sum;
}

}  // namespace wbavg::testing

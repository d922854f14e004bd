#pragma once

#include <span>

#include "errors.hpp"
#include "real.hpp"

namespace wbavg {

struct LineFit {
  Real slope;
  Real intercept;
  Real r_squared;
  // Largest y - (slope*x + intercept) over the data.
  Real max_residual;
};

// Ordinary least squares y = slope*x + intercept.
inline LineFit fit_line(std::span<const Real> x, std::span<const Real> y) {
  if (x.size() != y.size()) throw DimensionMismatch("fit_line: x and y differ in length");
  if (x.size() < 2) throw DomainError("fit_line: need at least two points");
  mpfr_prec_t bits = x[0].precision();
  const long n = static_cast<long>(x.size());
  Real mx(bits), my(bits);
  for (long i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  Real sxx(bits), sxy(bits), syy(bits);
  for (long i = 0; i < n; ++i) {
    Real dx = x[i] - mx;
    Real dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx.is_zero()) throw DomainError("fit_line: all x values coincide");
  Real slope = sxy / sxx;
  Real intercept = my - slope * mx;
  Real ss_res(bits);
  Real max_res(bits);
  for (long i = 0; i < n; ++i) {
    Real r = y[i] - (slope * x[i] + intercept);
    if (i == 0 || r > max_res) max_res = r;
    ss_res += r * r;
  }
  Real r2(1L, bits);
  if (!syy.is_zero()) r2 = 1L - ss_res / syy;
  if (r2.sign() < 0) r2 = Real(bits);
  if (r2 > 1.0) r2 = Real(1L, bits);
  return LineFit{std::move(slope), std::move(intercept), std::move(r2), std::move(max_res)};
}

}  // namespace wbavg

#pragma once

// Finite trigonometric polynomials g_n = a_0 + sum_l a_l e^{2 pi i nu_l n},
// their frequency gap delta = min_l dist(nu_l, Z), and the kernel-based
// oracle for their weighted averages.

#include <span>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "numerics.hpp"
#include "regression.hpp"
#include "weights.hpp"

namespace wbavg {

struct TrigTerm {
  Complex amplitude;
  Real frequency;
};

struct TrigPolynomial {
  Complex a0;
  std::vector<TrigTerm> terms;
};

struct FrequencyGap {
  Real delta;
};

inline Complex eval_signal(const TrigPolynomial& poly, long n, const PrecisionContext& ctx) {
  if (n < 0) throw DomainError("eval_signal needs n >= 0");
  Complex g = poly.a0;
  for (const auto& term : poly.terms) {
    Real angle = ctx.two_pi() * Real(term.frequency, ctx.guard_bits()) * n;
    g += term.amplitude * unit_phase(angle, ctx);
  }
  return g;
}

// dist(nu, Z) = |nu - round(nu)|
inline Real distance_to_integers(const Real& nu) { return abs(nu - round(nu)); }

// delta = min over terms of dist(nu, Z). Frequencies within 2^(16-bits) of
// an integer are resonant and rejected.
inline FrequencyGap frequency_gap(const TrigPolynomial& poly, const PrecisionContext& ctx) {
  if (poly.terms.empty()) throw DomainError("frequency gap of a polynomial without terms");
  const Real resonance = ctx.tolerance(16);
  Real delta = ctx.real(1L);
  for (const auto& term : poly.terms) {
    Real d = distance_to_integers(term.frequency);
    if (d <= resonance) {
      throw ResonantFrequency("frequency " + term.frequency.to_string(20) + " is resonant (integer)");
    }
    delta = min(delta, d);
  }
  return FrequencyGap{Real(delta, ctx.bits())};
}

// a_0 + sum_l a_l K_N(nu_l)
inline Complex oracle_weighted_average(const TrigPolynomial& poly, const NormalizedWeight& w, long N) {
  if (N < 2) throw DomainError("oracle_weighted_average needs N >= 2");
  Complex out = poly.a0;
  for (const auto& term : poly.terms) out += term.amplitude * kernel_KN(w, term.frequency, N);
  return out;
}

// C exp(-c (delta N)^zeta)
inline Real predicted_envelope(const FrequencyGap& gap, const WeightParams& params, long N, const Real& c,
                               const Real& C, const PrecisionContext& ctx) {
  if (!(c > 0.0) || !(C > 0.0)) throw DomainError("envelope constants must be positive");
  Real zeta = zeta_exponent(params, ctx);
  return C * exp(-(c * pow(gap.delta * N, zeta)));
}

struct RateFit {
  Real c;
  // Envelope constant: the least-squares intercept lifted by the largest
  // residual so every fitted point lies on or under the envelope.
  Real C;
  Real r_squared;
};

// Least squares of ln|W_N| on (delta N)^zeta over the supplied samples.
inline RateFit fit_rate(std::span<const long> ns, std::span<const Real> errors, const FrequencyGap& gap,
                        const WeightParams& params, const PrecisionContext& ctx) {
  if (ns.size() != errors.size()) throw DimensionMismatch("fit_rate: N and error lists differ in length");
  Real zeta = zeta_exponent(params, ctx);
  std::vector<Real> xs, ys;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (!(errors[i] > 0.0)) throw PrecisionLimited("fit_rate: zero error at N = " + std::to_string(ns[i]));
    xs.push_back(pow(gap.delta * ns[i], zeta));
    ys.push_back(log(errors[i]));
  }
  LineFit fit = fit_line(xs, ys);
  return RateFit{-fit.slope, exp(fit.intercept + fit.max_residual), std::move(fit.r_squared)};
}

}  // namespace wbavg

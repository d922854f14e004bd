#pragma once

// Precision context, midpoint quadrature with node doubling, and angle
// reduction modulo 2*pi.

#include <cstdlib>
#include <memory>
#include <string>
#include <type_traits>
#include <utility>

#include "errors.hpp"
#include "real.hpp"

namespace wbavg {

// Working precision shared by every scalar of a computation. Immutable;
// copies share the cached irrational constants.
class PrecisionContext {
 public:
  static constexpr long kMinBits = 64;
  static constexpr long kDefaultBits = 256;
  // Extra bits carried by pi, sqrt(2), sqrt(3).
  static constexpr long kGuardBits = 32;

  explicit PrecisionContext(long mantissa_bits = kDefaultBits) : bits_(mantissa_bits) {
    if (mantissa_bits < kMinBits) {
      throw PrecisionError("precision too low: " + std::to_string(mantissa_bits) +
                           " mantissa bits (minimum " + std::to_string(kMinBits) + ")");
    }
    auto c = std::make_shared<Constants>(bits_ + kGuardBits);
    mpfr_const_pi(c->pi.raw(), MPFR_RNDN);
    c->two_pi = ldexp(c->pi, 1);
    mpfr_sqrt_ui(c->sqrt2.raw(), 2, MPFR_RNDN);
    mpfr_sqrt_ui(c->sqrt3.raw(), 3, MPFR_RNDN);
    constants_ = std::move(c);
  }

  long bits() const { return bits_; }
  long guard_bits() const { return bits_ + kGuardBits; }

  Real zero() const { return Real(bits_); }
  Real real(long v) const { return Real(v, bits_); }
  Real real(double v) const { return Real(v, bits_); }
  Real parse(const std::string& text) const { return Real::parse(text, bits_); }
  Complex complex(long re, long im = 0) const { return Complex(real(re), real(im)); }

  // Constants at guard precision.
  const Real& pi() const { return constants_->pi; }
  const Real& two_pi() const { return constants_->two_pi; }
  const Real& sqrt2() const { return constants_->sqrt2; }
  const Real& sqrt3() const { return constants_->sqrt3; }

  // 2^(offset - bits): tolerances are always relative to the working precision.
  Real tolerance(long offset) const { return power_of_two(offset - bits_, bits_); }
  // 2^(-bits/2)
  Real half_precision_tolerance() const { return power_of_two(-bits_ / 2, bits_); }

 private:
  struct Constants {
    explicit Constants(long bits) : pi(bits), two_pi(bits), sqrt2(bits), sqrt3(bits) {}
    Real pi, two_pi, sqrt2, sqrt3;
  };

  long bits_;
  std::shared_ptr<const Constants> constants_;
};

inline PrecisionContext make_context(long mantissa_bits) { return PrecisionContext(mantissa_bits); }

// Name of the environment variable that overrides the default precision.
inline constexpr const char* kPrecisionEnvVar = "WBAVG_BITS";

inline long default_bits_from_env(long fallback = PrecisionContext::kDefaultBits) {
  const char* env = std::getenv(kPrecisionEnvVar);
  if (env == nullptr || *env == '\0') return fallback;
  char* end = nullptr;
  long v = std::strtol(env, &end, 10);
  if (*end != '\0') throw PrecisionError(std::string(kPrecisionEnvVar) + " is not an integer: " + env);
  return v;
}

// Returns theta' in [0, 2*pi) congruent to theta, rounded to the working
// precision. The subtraction is carried out with guard bits plus the bits
// lost to the magnitude of theta.
inline Real reduce_angle(const Real& theta, const PrecisionContext& ctx) {
  if (!theta.is_finite()) throw DomainError("reduce_angle: non-finite angle");
  const long magnitude = std::max(0L, theta.exponent());
  const long wp = ctx.guard_bits() + magnitude;
  Real two_pi(wp);
  if (magnitude <= 24) {
    two_pi = Real(ctx.two_pi(), wp);
  } else {
    mpfr_const_pi(two_pi.raw(), MPFR_RNDN);
    two_pi = ldexp(two_pi, 1);
  }
  Real t(theta, wp);
  Real k = floor(t / two_pi);
  t -= k * two_pi;
  if (t.sign() < 0) t += two_pi;
  Real out(t, ctx.bits());
  if (out >= Real(two_pi, ctx.bits())) out = ctx.zero();
  return out;
}

// e^{i*theta} evaluated after range reduction.
inline Complex unit_phase(const Real& theta, const PrecisionContext& ctx) {
  Real r = reduce_angle(theta, ctx);
  Complex z(ctx.bits());
  mpfr_sin_cos(z.imag().raw(), z.real().raw(), r.raw(), MPFR_RNDN);
  return z;
}

struct QuadratureResult {
  Complex value;
  Real estimated_error;
  long nodes_used = 0;
};

struct QuadratureOptions {
  long initial_nodes = 256;
  int max_doublings = 24;
};

namespace detail {

template <class F>
Complex midpoint_sum(F& f, const Real& a, const Real& h, long nodes, mpfr_prec_t bits) {
  Complex sum(bits);
  Real x(bits);
  Real half_h = ldexp(h, -1);
  for (long k = 0; k < nodes; ++k) {
    mpfr_mul_si(x.raw(), h.raw(), k, MPFR_RNDN);
    x += a;
    x += half_h;
    if constexpr (std::is_convertible_v<std::invoke_result_t<F&, const Real&>, const Real&>) {
      sum.real() += f(static_cast<const Real&>(x));
    } else {
      sum += f(static_cast<const Real&>(x));
    }
  }
  sum *= h;
  return sum;
}

inline std::string format_estimate(const Complex& z) {
  return z.real().to_string(30) + " + " + z.imag().to_string(30) + "i";
}

}  // namespace detail

// Composite midpoint rule on [a, b] with M -> 2M doubling. Accepts when two
// successive estimates differ by at most max(rel_tol*|value|, 2^(8-bits)).
// `f` may return Real or Complex.
template <class F>
QuadratureResult quadrature(F&& f, const Real& a, const Real& b, const PrecisionContext& ctx,
                            const Real& rel_tol, QuadratureOptions opts = {}) {
  if (!(a < b)) throw DomainError("quadrature: need a < b");
  if (!(rel_tol > 0.0)) throw DomainError("quadrature: rel_tol must be positive");
  if (opts.initial_nodes < 1) throw DomainError("quadrature: initial_nodes must be >= 1");
  const mpfr_prec_t bits = ctx.bits();
  const Real floor_tol = ctx.tolerance(8);
  const Real width(b - a, bits);

  long nodes = opts.initial_nodes;
  Complex previous = detail::midpoint_sum(f, a, width / nodes, nodes, bits);
  for (int d = 0; d < opts.max_doublings; ++d) {
    nodes *= 2;
    Complex current = detail::midpoint_sum(f, a, width / nodes, nodes, bits);
    Real change = abs(current - previous);
    if (change <= max(rel_tol * abs(current), floor_tol)) {
      return QuadratureResult{std::move(current), std::move(change), nodes};
    }
    if (d + 1 == opts.max_doublings) {
      throw ConvergenceError("quadrature did not converge after " +
                                 std::to_string(opts.max_doublings) + " doublings",
                             detail::format_estimate(previous), detail::format_estimate(current));
    }
    previous = std::move(current);
  }
  throw ConvergenceError("quadrature: max_doublings must be positive", detail::format_estimate(previous),
                         detail::format_estimate(previous));
}

}  // namespace wbavg

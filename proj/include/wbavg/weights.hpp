#pragma once

// The endpoint-flat weight family w_{p,q}(x) = exp(-x^-p (1-x)^-q) / C_{p,q}
// on (0,1), the weighted averages built from it, and the multipliers those
// averages apply to a pure oscillation:
//
//   F_T(omega) = int_0^1 w(s) e^{-i T omega s} ds          (continuous time)
//   K_N(nu)    = sum_n w(n/N) e^{2 pi i nu n} / sum_n w(n/N) (discrete time)
//
// K_N is available both by direct summation and through Poisson summation
// over the Fourier transform w^(xi) = int e^{-i xi x} w(x) dx.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <type_traits>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "numerics.hpp"
#include "real.hpp"
#include "regression.hpp"

namespace wbavg {

struct WeightParams {
  double p = 1.0;
  double q = 1.0;

  void validate() const {
    if (!(p > 0.0) || !(q > 0.0) || !std::isfinite(p) || !std::isfinite(q)) {
      throw DomainError("weight parameters must satisfy p > 0 and q > 0");
    }
  }
  friend bool operator==(const WeightParams&, const WeightParams&) = default;
};

// (1 + 1/min(p,q))^-1, the stretched-exponential rate exponent.
inline Real zeta_exponent(const WeightParams& params, const PrecisionContext& ctx) {
  params.validate();
  Real r = ctx.real(std::min(params.p, params.q));
  return r / (r + 1L);
}

// Evaluates exp(-x^-p (1-x)^-q) on (0,1) and 0 elsewhere. Values more than
// 2^-(bits + 64) below the peak are flushed to 0.
class WeightEvaluator {
 public:
  WeightEvaluator(const WeightParams& params, const PrecisionContext& ctx)
      : params_(params), bits_(ctx.bits()), cutoff_(ctx.bits()) {
    params_.validate();
    // the smallest exponent is at x = p/(p+q)
    mpfr_const_log2(cutoff_.raw(), MPFR_RNDN);
    cutoff_ *= (ctx.bits() + 64);
    const double xs = params_.p / (params_.p + params_.q);
    cutoff_ += Real(std::pow(xs, -params_.p) * std::pow(1 - xs, -params_.q), ctx.bits());
  }

  const WeightParams& params() const { return params_; }

  Real operator()(const Real& x) const {
    Real out(bits_);
    if (!(x > 0.0) || !(x < 1.0)) return out;
    Real y = 1L - Real(x, bits_);
    Real e = inverse_power(Real(x, bits_), params_.p);
    e *= inverse_power(y, params_.q);
    if (e > cutoff_) return out;
    mpfr_neg(e.raw(), e.raw(), MPFR_RNDN);
    mpfr_exp(out.raw(), e.raw(), MPFR_RNDN);
    return out;
  }

 private:
  // base^-expo with fast paths for integer and half-integer exponents.
  static Real inverse_power(const Real& base, double expo) {
    if (expo == std::floor(expo) && expo < 1e9) return pow(base, -static_cast<long>(expo));
    const double twice = 2.0 * expo;
    if (twice == std::floor(twice) && twice < 1e9) {
      return pow(rec_sqrt(base), static_cast<long>(twice));
    }
    return pow(base, Real(-expo, base.precision()));
  }

  WeightParams params_;
  mpfr_prec_t bits_;
  Real cutoff_;
};

inline Real weight_unnormalized(const WeightParams& params, const Real& x, const PrecisionContext& ctx) {
  return WeightEvaluator(params, ctx)(x);
}

class NormalizedWeight {
 public:
  NormalizedWeight(const WeightParams& params, Real normalization, const PrecisionContext& ctx)
      : ctx_(ctx), evaluator_(params, ctx), normalization_(std::move(normalization)) {
    if (!(normalization_ > 0.0)) throw DomainError("weight normalization must be positive");
  }

  const WeightParams& params() const { return evaluator_.params(); }
  // C_{p,q}
  const Real& normalization() const { return normalization_; }
  const PrecisionContext& context() const { return ctx_; }
  const WeightEvaluator& unnormalized() const { return evaluator_; }

  Real operator()(const Real& x) const { return evaluator_(x) / normalization_; }

 private:
  PrecisionContext ctx_;
  WeightEvaluator evaluator_;
  Real normalization_;
};

// C_{p,q} by midpoint quadrature at rel_tol 2^(32-bits).
inline NormalizedWeight normalize(const WeightParams& params, const PrecisionContext& ctx) {
  WeightEvaluator f(params, ctx);
  auto result = quadrature(f, ctx.zero(), ctx.real(1L), ctx, ctx.tolerance(32));
  return NormalizedWeight(params, std::move(result.value.real()), ctx);
}

inline Real eval_weight(const NormalizedWeight& w, const Real& x) { return w(x); }

// Unnormalized w(n/N) for n = 0..N-1. Entry 0 is always zero.
inline std::vector<Real> discrete_weights(const WeightEvaluator& f, long N, const PrecisionContext& ctx) {
  if (N < 2) throw DomainError("discrete weights need N >= 2 (w(0) = 0 leaves no mass)");
  std::vector<Real> out;
  out.reserve(N);
  out.emplace_back(ctx.bits());
  const bool symmetric = f.params().p == f.params().q;
  Real x(ctx.bits());
  for (long n = 1; n < N; ++n) {
    if (symmetric && 2 * n > N) {
      out.push_back(out[N - n]);
      continue;
    }
    mpfr_set_si(x.raw(), n, MPFR_RNDN);
    x /= N;
    out.push_back(f(x));
  }
  return out;
}

// sum_n w(n/N) for n = 0..N-1 with the normalized weight.
inline Real weight_mass(const NormalizedWeight& w, long N) {
  auto weights = discrete_weights(w.unnormalized(), N, w.context());
  Real sum = w.context().zero();
  for (const auto& v : weights) sum += v;
  return sum / w.normalization();
}

namespace detail {

template <class T>
T weighted_sum(const std::vector<Real>& weights, std::span<const T> samples, mpfr_prec_t bits) {
  T num(bits);
  for (std::size_t n = 1; n < weights.size(); ++n) {
    if constexpr (std::is_same_v<T, Real>) {
      num += weights[n] * samples[n];
    } else {
      num += samples[n] * weights[n];
    }
  }
  return num;
}

}  // namespace detail

// sum_n w(n/N) g_n / sum_n w(n/N), N = samples.size(). The n = 0 sample has
// zero weight and never contributes.
template <class T>
T discrete_weighted_average(const NormalizedWeight& w, std::span<const T> samples) {
  const long N = static_cast<long>(samples.size());
  if (N < 2) throw DomainError("discrete weighted average needs N >= 2");
  auto weights = discrete_weights(w.unnormalized(), N, w.context());
  Real den = w.context().zero();
  for (const auto& v : weights) den += v;
  return detail::weighted_sum<T>(weights, samples, w.context().bits()) / den;
}

inline Complex discrete_weighted_average(const NormalizedWeight& w, const std::vector<Complex>& samples) {
  return discrete_weighted_average<Complex>(w, std::span<const Complex>(samples));
}
inline Real discrete_weighted_average(const NormalizedWeight& w, const std::vector<Real>& samples) {
  return discrete_weighted_average<Real>(w, std::span<const Real>(samples));
}

// (1/N) sum_n g_n.
template <class T>
T unweighted_average(std::span<const T> samples) {
  if (samples.empty()) throw DomainError("unweighted average of an empty sequence");
  T sum(samples[0].precision());
  for (const auto& g : samples) sum += g;
  return sum / Real(static_cast<long>(samples.size()), samples[0].precision());
}
inline Complex unweighted_average(const std::vector<Complex>& samples) {
  return unweighted_average<Complex>(std::span<const Complex>(samples));
}
inline Real unweighted_average(const std::vector<Real>& samples) {
  return unweighted_average<Real>(std::span<const Real>(samples));
}

// int_0^1 w(s) g(T s) ds. `g` maps a time (Real) to Real or Complex.
template <class G>
Complex continuous_weighted_average(const NormalizedWeight& w, G&& g, const Real& T,
                                    QuadratureOptions opts = {}) {
  if (!(T > 0.0)) throw DomainError("continuous weighted average needs T > 0");
  const auto& ctx = w.context();
  auto integrand = [&](const Real& s) -> Complex {
    Real ws = w(s);
    if (ws.is_zero()) return Complex(ctx.bits());
    auto v = g(T * s);
    if constexpr (std::is_convertible_v<decltype(v), const Real&>) {
      return Complex(ws * v);
    } else {
      return v * ws;
    }
  };
  return quadrature(integrand, ctx.zero(), ctx.real(1L), ctx, ctx.half_precision_tolerance(), opts).value;
}

// Starting node count for int_0^1 w(s) e^{-i theta s} ds. The midpoint error
// at M nodes is the alias w^(2 pi M - theta), so two nodes per period on top
// of the 256 base already leave it below the target; doubling confirms.
inline long oscillation_nodes(const Real& theta, const PrecisionContext& ctx) {
  Real periods = abs(theta) / ctx.two_pi();
  return 256 + 2 * static_cast<long>(std::ceil(periods.to_double()));
}

namespace detail {

// Midpoint sums int_0^1 w(s) e^{-i theta_k s} ds at M nodes for each theta_k.
// Phases advance by multiplication and are re-anchored every 1024 nodes.
inline std::vector<Complex> oscillatory_midpoint(const NormalizedWeight& w, const std::vector<Real>& thetas,
                                                 long M) {
  const auto& ctx = w.context();
  const mpfr_prec_t bits = ctx.bits();
  constexpr long kReanchor = 1024;
  const std::size_t K = thetas.size();
  std::vector<Complex> acc(K, Complex(bits)), phase(K, Complex(bits)), step(K, Complex(bits));
  Real h = ctx.real(1L) / M;
  for (std::size_t k = 0; k < K; ++k) step[k] = unit_phase(-(thetas[k] * h), ctx);
  Real s(bits);
  Real tmp(bits);
  Real half(bits);
  const bool symmetric = w.params().p == w.params().q;
  std::vector<Real> mirrored;
  if (symmetric) mirrored.reserve(M / 2 + 1);
  for (long j = 0; j < M; ++j) {
    mpfr_set_si(s.raw(), 2 * j + 1, MPFR_RNDN);
    mpfr_div_si(s.raw(), s.raw(), 2 * M, MPFR_RNDN);
    if (j % kReanchor == 0) {
      for (std::size_t k = 0; k < K; ++k) phase[k] = unit_phase(-(thetas[k] * s), ctx);
    }
    Real ws(bits);
    if (symmetric && 2 * j >= M) {
      ws = mirrored[M - 1 - j];
    } else {
      ws = w.unnormalized()(s);
      if (symmetric) mirrored.push_back(ws);
    }
    if (!ws.is_zero()) {
      for (std::size_t k = 0; k < K; ++k) {
        mpfr_mul(tmp.raw(), phase[k].real().raw(), ws.raw(), MPFR_RNDN);
        mpfr_add(acc[k].real().raw(), acc[k].real().raw(), tmp.raw(), MPFR_RNDN);
        mpfr_mul(tmp.raw(), phase[k].imag().raw(), ws.raw(), MPFR_RNDN);
        mpfr_add(acc[k].imag().raw(), acc[k].imag().raw(), tmp.raw(), MPFR_RNDN);
      }
    }
    for (std::size_t k = 0; k < K; ++k) phase[k] *= step[k];
  }
  Real scale = h / w.normalization();
  for (auto& a : acc) a *= scale;
  return acc;
}

inline long next_power_of_two_multiple(long base, long minimum) {
  long m = base;
  while (m < minimum) m *= 2;
  return m;
}

}  // namespace detail

struct KernelOptions {
  int max_doublings = 24;
  // Relative tolerance; defaults to 2^(-bits/2) when left empty.
  std::optional<Real> rel_tol;
  // Absolute acceptance level; defaults to 2^(8-bits).
  std::optional<Real> abs_tol;
};

// F_T(omega) for every omega in `omegas`, sharing the node passes. The node
// count starts at the smallest 256 * 2^k covering oscillation_nodes for the
// largest |T omega| and doubles until each value settles. A zero frequency returns exactly 1.
inline std::vector<Complex> kernel_FT_batch(const NormalizedWeight& w, const std::vector<Real>& omegas,
                                            const Real& T, const KernelOptions& opts = {}) {
  if (T.sign() < 0) throw DomainError("kernel_FT needs T >= 0");
  const auto& ctx = w.context();
  const Real rel_tol = opts.rel_tol ? *opts.rel_tol : ctx.half_precision_tolerance();
  const Real floor_tol = opts.abs_tol ? max(*opts.abs_tol, ctx.tolerance(8)) : ctx.tolerance(8);
  std::vector<Complex> out(omegas.size(), ctx.complex(1L));
  std::vector<std::size_t> pending;
  std::vector<Real> thetas;
  long M = 256;
  for (std::size_t k = 0; k < omegas.size(); ++k) {
    Real theta = T * omegas[k];
    if (theta.is_zero()) continue;
    M = std::max(M, detail::next_power_of_two_multiple(256, oscillation_nodes(theta, ctx)));
    pending.push_back(k);
    thetas.push_back(std::move(theta));
  }
  if (pending.empty()) return out;

  auto previous = detail::oscillatory_midpoint(w, thetas, M);
  for (int d = 0; d < opts.max_doublings; ++d) {
    M *= 2;
    auto current = detail::oscillatory_midpoint(w, thetas, M);
    std::vector<std::size_t> still;
    std::vector<Real> still_thetas;
    for (std::size_t i = 0; i < pending.size(); ++i) {
      Real change = abs(current[i] - previous[i]);
      if (change <= max(rel_tol * abs(current[i]), floor_tol)) {
        out[pending[i]] = std::move(current[i]);
      } else {
        still.push_back(i);
      }
    }
    if (still.empty()) return out;
    if (d + 1 == opts.max_doublings) {
      std::size_t i = still.front();
      throw ConvergenceError("kernel_FT did not converge", detail::format_estimate(previous[i]),
                             detail::format_estimate(current[i]));
    }
    std::vector<std::size_t> next_pending;
    std::vector<Complex> next_previous;
    for (std::size_t i : still) {
      next_pending.push_back(pending[i]);
      still_thetas.push_back(thetas[i]);
      next_previous.push_back(std::move(current[i]));
    }
    pending = std::move(next_pending);
    thetas = std::move(still_thetas);
    previous = std::move(next_previous);
  }
  throw ConvergenceError("kernel_FT: max_doublings must be positive", "", "");
}

inline Complex kernel_FT(const NormalizedWeight& w, const Real& omega, const Real& T,
                         const KernelOptions& opts = {}) {
  return std::move(kernel_FT_batch(w, {omega}, T, opts).front());
}

// w^(xi) = int_0^1 e^{-i xi x} w(x) dx by the generic quadrature with the
// phase evaluated directly at every node.
inline Complex weight_fourier(const NormalizedWeight& w, const Real& xi, std::optional<Real> rel_tol = {}) {
  const auto& ctx = w.context();
  QuadratureOptions opts;
  opts.initial_nodes = oscillation_nodes(xi, ctx);
  auto integrand = [&](const Real& x) -> Complex {
    Real wx = w(x);
    if (wx.is_zero()) return Complex(ctx.bits());
    return unit_phase(-(xi * x), ctx) * wx;
  };
  return quadrature(integrand, ctx.zero(), ctx.real(1L), ctx,
                    rel_tol ? *rel_tol : ctx.half_precision_tolerance(), opts)
      .value;
}

// The same transform read off the continuous kernel: w^(xi) = F_{T=xi}(1).
inline Complex weight_fourier_via_kernel(const NormalizedWeight& w, const Real& xi) {
  return kernel_FT(w, w.context().real(1L), xi);
}

// K_N(nu) by direct summation.
inline Complex kernel_KN(const NormalizedWeight& w, const Real& nu, long N) {
  if (N < 2) throw DomainError("kernel_KN needs N >= 2");
  const auto& ctx = w.context();
  auto weights = discrete_weights(w.unnormalized(), N, ctx);
  Complex num(ctx.bits());
  Real den = ctx.zero();
  Real step(ctx.two_pi() * Real(nu, ctx.guard_bits()));
  for (long n = 1; n < N; ++n) {
    den += weights[n];
    if (weights[n].is_zero()) continue;
    num += unit_phase(step * n, ctx) * weights[n];
  }
  return num / den;
}

// Fitted bound |w^(xi)| <= C exp(-c |xi|^zeta).
struct FourierEnvelope {
  Real c;
  Real C;
  Real zeta;
  Real r_squared;

  Real operator()(const Real& xi) const { return C * exp(-(c * pow(abs(xi), zeta))); }
};

inline const std::vector<double>& default_fourier_grid() {
  static const std::vector<double> grid{10, 20, 50, 100, 200, 500, 1000};
  return grid;
}

// Regression of ln|w^(xi)| on xi^zeta over the grid. The slope gives c; C is
// lifted by the largest residual so the envelope covers every sample.
inline FourierEnvelope fit_fourier_envelope(const NormalizedWeight& w,
                                            const std::vector<double>& grid = default_fourier_grid()) {
  const auto& ctx = w.context();
  Real zeta = zeta_exponent(w.params(), ctx);
  std::vector<Real> xs, ys;
  for (double xi : grid) {
    Real x = ctx.real(xi);
    Real mag = abs(weight_fourier(w, x));
    if (mag.is_zero()) continue;
    xs.push_back(pow(x, zeta));
    ys.push_back(log(mag));
  }
  if (xs.size() < 2) throw PrecisionLimited("Fourier transform underflowed on the envelope grid");
  LineFit fit = fit_line(xs, ys);
  return FourierEnvelope{-fit.slope, exp(fit.intercept + fit.max_residual), std::move(zeta),
                         std::move(fit.r_squared)};
}

struct PoissonResult {
  Complex value;
  long m_terms = 0;
  // Envelope bound on the dropped terms, already divided by A_N.
  Real tail_bound;
};

namespace detail {

// Envelope sum over integers m with |m - centre| > m_terms, scaled by N / A_N.
inline Real poisson_tail(const FourierEnvelope& env, const Real& nu, long N, long centre, long m_terms,
                         const Real& mass, const PrecisionContext& ctx) {
  if (!(env.c > 0.0)) return ctx.real(1L) / ctx.zero();
  Real tail = ctx.zero();
  const Real negligible = ctx.tolerance(0);
  for (int side : {-1, 1}) {
    for (long j = m_terms + 1; j < m_terms + 100000; ++j) {
      Real xi = ctx.two_pi() * Real(N, ctx.bits()) * (Real(centre + side * j, ctx.bits()) - nu);
      Real term = env(xi);
      tail += term;
      if (term <= negligible * tail) break;
    }
  }
  return tail * Real(N, ctx.bits()) / mass;
}

}  // namespace detail

namespace detail {

// w^(2 pi N (m - nu)) for every m in `ms`, each settled to within `abs_tol`
// (or 2^(-bits/2) relative).
inline std::vector<Complex> poisson_terms(const NormalizedWeight& w, const Real& nu, long N,
                                          const std::vector<long>& ms, std::optional<Real> abs_tol = {}) {
  const auto& ctx = w.context();
  Real scale = ctx.two_pi() * Real(N, ctx.bits());
  std::vector<Real> xis;
  for (long m : ms) xis.emplace_back(scale * (Real(m, ctx.bits()) - nu), ctx.bits());
  KernelOptions opts;
  opts.abs_tol = std::move(abs_tol);
  // w^(xi) = F_1(xi); one shared pass over the nodes serves every term.
  return kernel_FT_batch(w, xis, ctx.real(1L), opts);
}

// Accuracy the outer terms need: 2^(-bits/2) of the two terms nearest nu,
// which dominate the sum.
inline Real poisson_term_tolerance(const NormalizedWeight& w, const Real& nu, long N) {
  const long below = floor(nu).to_long();
  Complex lead(w.context().bits());
  for (const auto& v : poisson_terms(w, nu, N, {below, below + 1})) lead += v;
  return w.context().half_precision_tolerance() * abs(lead) / 4L;
}

}  // namespace detail

// K_N(nu) = N sum_m w^(2 pi N (m - nu)) / A_N, the sum running over
// |m - round(nu)| <= m_terms and A_N = sum_n w(n/N) taken directly.
inline PoissonResult kernel_KN_poisson(const NormalizedWeight& w, const Real& nu, long N, long m_terms,
                                       const FourierEnvelope& envelope) {
  if (N < 2) throw DomainError("kernel_KN_poisson needs N >= 2");
  if (m_terms < 1) throw DomainError("kernel_KN_poisson needs m_terms >= 1");
  const auto& ctx = w.context();
  const long centre = round(nu).to_long();
  Real mass = weight_mass(w, N);
  std::vector<long> ms;
  for (long m = centre - m_terms; m <= centre + m_terms; ++m) ms.push_back(m);
  Complex sum(ctx.bits());
  for (const auto& v : detail::poisson_terms(w, nu, N, ms, detail::poisson_term_tolerance(w, nu, N))) sum += v;
  sum *= Real(N, ctx.bits());
  sum /= mass;
  return PoissonResult{std::move(sum), m_terms,
                       detail::poisson_tail(envelope, nu, N, centre, m_terms, mass, ctx)};
}

// Smallest m_terms >= 1 whose envelope tail is below 2^(-bits/2); 8 when the
// envelope is unusable.
inline long default_poisson_terms(const NormalizedWeight& w, const Real& nu, long N,
                                  const FourierEnvelope& envelope) {
  constexpr long kFallback = 8;
  constexpr long kMaxTerms = 256;
  const auto& ctx = w.context();
  if (!(envelope.c > 0.0)) return kFallback;
  const long centre = round(nu).to_long();
  Real mass = weight_mass(w, N);
  const Real target = ctx.half_precision_tolerance();
  for (long m = 1; m <= kMaxTerms; ++m) {
    if (detail::poisson_tail(envelope, nu, N, centre, m, mass, ctx) < target) return m;
  }
  return kFallback;
}

// Starts from the envelope estimate, then keeps adding the rings
// m = round(nu) -+ k while the newest ring still moves the sum by more than
// 2^(-bits/2) relative (or 2^(8-bits) absolute). The envelope is fitted on a
// finite grid and can undershoot further out, so the rings decide.
inline PoissonResult kernel_KN_poisson(const NormalizedWeight& w, const Real& nu, long N,
                                       const FourierEnvelope& envelope) {
  constexpr long kMaxTerms = 512;
  const auto& ctx = w.context();
  PoissonResult r = kernel_KN_poisson(w, nu, N, default_poisson_terms(w, nu, N, envelope), envelope);
  const long centre = round(nu).to_long();
  const Real factor = Real(N, ctx.bits()) / weight_mass(w, N);
  Complex previous = r.value;
  const Real term_tol = detail::poisson_term_tolerance(w, nu, N);
  // Rings are evaluated eight at a time since they share the node passes.
  constexpr long kChunk = 8;
  for (long first = r.m_terms + 1; first <= kMaxTerms; first += kChunk) {
    std::vector<long> ms;
    for (long k = first; k < first + kChunk; ++k) {
      ms.push_back(centre - k);
      ms.push_back(centre + k);
    }
    auto values = detail::poisson_terms(w, nu, N, ms, term_tol);
    for (long i = 0; i < kChunk; ++i) {
      Complex ring = values[2 * i] + values[2 * i + 1];
      ring *= factor;
      previous = r.value;
      r.value += ring;
      r.m_terms = first + i;
      if (abs(ring) <= max(ctx.half_precision_tolerance() * abs(r.value), ctx.tolerance(8))) {
        r.tail_bound = detail::poisson_tail(envelope, nu, N, centre, r.m_terms, weight_mass(w, N), ctx);
        return r;
      }
    }
  }
  throw ConvergenceError("Poisson sum did not settle within " + std::to_string(kMaxTerms) + " rings",
                         detail::format_estimate(previous), detail::format_estimate(r.value));
}

}  // namespace wbavg

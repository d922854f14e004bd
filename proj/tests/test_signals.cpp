#include "support.hpp"

#include <cmath>

using namespace wbavg;
using wbavg::testing::near;

TEST(Gap, DistanceToIntegers) {
  PrecisionContext ctx(128);
  EXPECT_TRUE(near(distance_to_integers(Real::parse("2.3", 128)), Real::parse("0.3", 128), ctx.tolerance(8)));
  EXPECT_TRUE(near(distance_to_integers(Real::parse("-0.7", 128)), Real::parse("0.3", 128), ctx.tolerance(8)));
  EXPECT_TRUE(distance_to_integers(ctx.real(5L)).is_zero());
}

TEST(Gap, ThreeSpinGapIsOneOverPi) {
  PrecisionContext ctx(256);
  auto gap = frequency_gap(three_spin_polynomial(ctx), ctx);
  EXPECT_TRUE(near(gap.delta, ctx.real(1L) / Real(ctx.pi(), 256), ctx.tolerance(8)));
}

TEST(Gap, ResonantAndEmpty) {
  PrecisionContext ctx(128);
  TrigPolynomial resonant{ctx.complex(0), {{ctx.complex(1), ctx.real(2L)}}};
  EXPECT_THROW(frequency_gap(resonant, ctx), ResonantFrequency);
  TrigPolynomial empty{ctx.complex(1), {}};
  EXPECT_THROW(frequency_gap(empty, ctx), DomainError);
}

TEST(Oracle, KernelFormMatchesDirectAverage) {
  PrecisionContext ctx(256);
  auto w = normalize({1, 1}, ctx);
  auto poly = three_spin_polynomial(ctx);
  poly.a0 = Complex(ctx.real(1L) / 7L);
  for (long N : {16L, 100L, 333L}) {
    std::vector<Complex> g;
    for (long n = 0; n < N; ++n) g.push_back(eval_signal(poly, n, ctx));
    EXPECT_TRUE(near(oracle_weighted_average(poly, w, N), discrete_weighted_average(w, g), ctx.tolerance(32)));
  }
  EXPECT_THROW(oracle_weighted_average(poly, w, 1), DomainError);
}

TEST(Oracle, ErrorSitsUnderTheFourierEnvelope) {
  // |W_N - a0| <= sum |a_l| |K_N(nu_l)| and K_N is controlled by the sampled
  // Fourier transform, so the error must decay like the envelope in delta N.
  PrecisionContext ctx(256);
  auto w = normalize({2, 2}, ctx);
  auto poly = three_spin_polynomial(ctx);
  Real prev = ctx.real(1L);
  for (long N : {50L, 100L, 200L, 400L}) {
    Real e = abs(oracle_weighted_average(poly, w, N));
    EXPECT_TRUE(e < prev) << "N=" << N;
    prev = e;
  }
  EXPECT_TRUE(prev < 1e-12);
}

TEST(Envelope, PredictedEnvelopeShape) {
  PrecisionContext ctx(128);
  FrequencyGap gap{ctx.real(0.25)};
  Real a = predicted_envelope(gap, {1, 1}, 100, ctx.real(2L), ctx.real(3L), ctx);
  // 3 exp(-2 * 25^(1/2)) = 3 e^-10
  EXPECT_TRUE(near(a, exp(ctx.real(-10L)) * 3L, ctx.tolerance(8)));
  EXPECT_THROW(predicted_envelope(gap, {1, 1}, 100, ctx.zero(), ctx.real(1L), ctx), DomainError);
}

TEST(Rate, RecoversSyntheticConstants) {
  PrecisionContext ctx(256);
  FrequencyGap gap{ctx.real(0.3)};
  std::vector<long> ns;
  std::vector<Real> errs;
  for (long N = 20; N <= 400; N += 20) {
    ns.push_back(N);
    errs.push_back(predicted_envelope(gap, {2, 2}, N, ctx.real(1.25), ctx.real(4L), ctx));
  }
  RateFit fit = fit_rate(ns, errs, gap, {2, 2}, ctx);
  EXPECT_TRUE(near(fit.c, ctx.real(1.25), ctx.tolerance(40)));
  EXPECT_TRUE(near(fit.C, ctx.real(4L), ctx.tolerance(36)));
  EXPECT_TRUE(near(fit.r_squared, ctx.real(1L), ctx.tolerance(40)));
  errs.pop_back();
  EXPECT_THROW(fit_rate(ns, errs, gap, {2, 2}, ctx), DimensionMismatch);
}

TEST(Rate, EnvelopeCoversNoisyData) {
  PrecisionContext ctx(128);
  FrequencyGap gap{ctx.real(0.5)};
  std::vector<long> ns;
  std::vector<Real> errs;
  for (long N = 10; N <= 200; N += 10) {
    ns.push_back(N);
    Real wobble = ctx.real(1.0 + 0.5 * std::sin(static_cast<double>(N)));
    errs.push_back(predicted_envelope(gap, {1, 1}, N, ctx.real(1L), ctx.real(1L), ctx) * wobble);
  }
  RateFit fit = fit_rate(ns, errs, gap, {1, 1}, ctx);
  for (std::size_t i = 0; i < ns.size(); ++i)
    EXPECT_TRUE(errs[i] <= predicted_envelope(gap, {1, 1}, ns[i], fit.c, fit.C, ctx) * (1L + ctx.tolerance(16)));
}

#include "support.hpp"

using namespace wbavg;
using wbavg::testing::near;
using wbavg::testing::pow10;

TEST(Pauli, Algebra) {
  PrecisionContext ctx(128);
  for (int site = 1; site <= 3; ++site) {
    auto x = pauli_tensor(PauliAxis::kX, site, ctx).matrix;
    auto y = pauli_tensor(PauliAxis::kY, site, ctx).matrix;
    auto z = pauli_tensor(PauliAxis::kZ, site, ctx).matrix;
    auto id = ComplexMatrix::identity(8, 128);
    EXPECT_TRUE(near(x * x, id, ctx.tolerance(4)));
    EXPECT_TRUE(near(y * y, id, ctx.tolerance(4)));
    // xy = iz
    ComplexMatrix iz(8, 8, 128);
    for (std::size_t i = 0; i < 8; ++i) iz(i, i) = Complex(ctx.zero(), z(i, i).real());
    EXPECT_TRUE(near(x * y, iz, ctx.tolerance(4)));
  }
  auto x1 = pauli_tensor(PauliAxis::kX, 1, ctx).matrix;
  auto z2 = pauli_tensor(PauliAxis::kZ, 2, ctx).matrix;
  EXPECT_TRUE(near(x1 * z2, z2 * x1, ctx.tolerance(4)));
  EXPECT_THROW(pauli_tensor(PauliAxis::kX, 4, ctx), DomainError);
  EXPECT_THROW(pauli_tensor(PauliAxis::kX, 0, ctx), DomainError);
}

TEST(Pauli, SiteOneIsMostSignificant) {
  PrecisionContext ctx(128);
  auto z1 = pauli_tensor(PauliAxis::kZ, 1, ctx).matrix;
  for (std::size_t i = 0; i < 8; ++i) EXPECT_TRUE(z1(i, i).real() == (i < 4 ? 1.0 : -1.0));
}

TEST(ThreeSpin, InitialStateAndObservable) {
  PrecisionContext ctx(256);
  auto m = build_three_spin(ctx);
  EXPECT_TRUE(near(m.initial_state.norm(256), ctx.real(1L), ctx.tolerance(4)));
  auto rho = pure_density(m.initial_state, ctx);
  // <+|sigma_x|+> = 1 for every site.
  EXPECT_TRUE(near(expectation(rho, m.observable, ctx), ctx.real(1L), ctx.tolerance(8)));
  EXPECT_TRUE(near(explicit_signal(0, ctx), ctx.real(1L), ctx.tolerance(8)));
}

TEST(ThreeSpin, EquilibriumIsMaximallyMixed) {
  PrecisionContext ctx(256);
  auto m = build_three_spin(ctx);
  auto [rho_diag, a_eq] = model_equilibrium(m, ctx);
  ComplexMatrix eighth = ComplexMatrix::identity(8, 256) * (ctx.real(1L) / 8L);
  EXPECT_TRUE(near(rho_diag.matrix, eighth, pow10(-60, 256)));
  EXPECT_TRUE(near(a_eq, ctx.zero(), pow10(-60, 256)));
}

TEST(ThreeSpin, MatrixPathMatchesClosedForm) {
  PrecisionContext ctx(256);
  auto m = build_three_spin(ctx);
  auto d = eigendecompose(m.hamiltonian, ctx);
  auto rho = pure_density(m.initial_state, ctx);
  std::vector<Real> times;
  for (long n : {0L, 1L, 2L, 3L, 10L, 99L, 500L, 1999L, 2000L}) times.push_back(ctx.real(n));
  auto series = expectation_series(d, rho, m.observable, times, ctx);
  for (std::size_t i = 0; i < times.size(); ++i) {
    long n = times[i].to_long();
    Real y = explicit_signal(n, ctx);
    EXPECT_TRUE(near(series[i], y, pow10(-60, 256))) << "n=" << n;
    // closed form against the independent cosine
    Real oracle = ctx.zero();
    for (Real omega : {ctx.real(2L), sqrt(ctx.real(8L)), sqrt(ctx.real(12L))})
      oracle += wbavg::testing::taylor_cos(omega * n, 512);
    EXPECT_TRUE(near(y, oracle / 3L, pow10(-60, 256))) << "n=" << n;
  }
}

TEST(ThreeSpin, PolynomialFormAgrees) {
  PrecisionContext ctx(256);
  auto poly = three_spin_polynomial(ctx);
  ASSERT_EQ(poly.terms.size(), 6u);
  for (long n : {0L, 5L, 123L, 1200L}) {
    Complex g = eval_signal(poly, n, ctx);
    EXPECT_TRUE(near(g.real(), explicit_signal(n, ctx), ctx.tolerance(40)));
    EXPECT_TRUE(abs(g.imag()) < ctx.tolerance(40));
  }
  EXPECT_THROW(explicit_signal(-1, ctx), DomainError);
}

TEST(RandomSystem, DeterministicPerSeed) {
  PrecisionContext ctx(256);
  auto a = random_degenerate_system(42, ctx);
  auto b = random_degenerate_system(42, ctx);
  auto c = random_degenerate_system(43, ctx);
  EXPECT_TRUE((a.hamiltonian.matrix() - b.hamiltonian.matrix()).max_abs().is_zero());
  EXPECT_TRUE((a.rho0.matrix - b.rho0.matrix).max_abs().is_zero());
  EXPECT_FALSE((a.hamiltonian.matrix() - c.hamiltonian.matrix()).max_abs().is_zero());
}

TEST(RandomSystem, OneDoubledLevelWithGaps) {
  PrecisionContext ctx(256);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto s = random_degenerate_system(seed, ctx);
    int doubled = 0;
    for (std::size_t i = 1; i < s.levels.size(); ++i) {
      Real gap = s.levels[i] - s.levels[i - 1];
      if (gap.is_zero()) ++doubled;
      else EXPECT_TRUE(gap >= 0.1);
    }
    EXPECT_EQ(doubled, 1);
    EXPECT_NO_THROW(validate_density(s.rho0.matrix, ctx));
    EXPECT_TRUE(is_hermitian(s.observable.matrix, ctx.zero()));
  }
  EXPECT_THROW(random_degenerate_system(1, ctx, 6, 0.5), DomainError);
}

#include "support.hpp"

using namespace wbavg;
using wbavg::testing::near;

namespace {

ComplexMatrix diag(std::initializer_list<double> values, long bits) {
  ComplexMatrix m(values.size(), values.size(), bits);
  std::size_t i = 0;
  for (double v : values) {
    m(i, i) = Complex(Real(v, bits));
    ++i;
  }
  return m;
}

}  // namespace

TEST(Density, ValidationErrors) {
  PrecisionContext ctx(128);
  EXPECT_THROW(make_density(diag({0.5, 0.25}, 128), ctx), TraceError);
  EXPECT_THROW(make_density(diag({1.5, -0.5}, 128), ctx), DomainError);
  ComplexMatrix nh = diag({0.5, 0.5}, 128);
  nh(0, 1) = Complex(ctx.real(0.1));
  EXPECT_THROW(make_density(nh, ctx), NotHermitian);
  EXPECT_THROW(make_density(ComplexMatrix(2, 3, 128), ctx), DimensionMismatch);
  EXPECT_NO_THROW(make_density(diag({0.5, 0.5}, 128), ctx));
}

TEST(Density, PureStateNormIsChecked) {
  PrecisionContext ctx(128);
  PureState bad{{Complex(ctx.real(1L)), Complex(ctx.real(1L))}};
  EXPECT_THROW(pure_density(bad, ctx), TraceError);
  PureState good{{Complex(ctx.real(3L) / 5L), Complex(ctx.zero(), ctx.real(4L) / 5L)}};
  auto rho = pure_density(good, ctx);
  EXPECT_TRUE(near(rho.matrix.trace().real(), ctx.real(1L), ctx.tolerance(8)));
  EXPECT_TRUE(near(rho.matrix(0, 1), Complex(ctx.zero(), ctx.real(-12L) / 25L), ctx.tolerance(8)));
}

TEST(Evolution, ZeroTimeIsIdentity) {
  PrecisionContext ctx(256);
  auto sys = random_degenerate_system(11, ctx);
  auto d = eigendecompose(sys.hamiltonian, ctx);
  auto rho = evolve(d, sys.rho0, ctx.zero(), ctx);
  EXPECT_TRUE((rho.matrix - sys.rho0.matrix).max_abs().is_zero());
}

TEST(Evolution, PreservesTraceHermiticityAndPurity) {
  PrecisionContext ctx(256);
  auto sys = random_degenerate_system(12, ctx);
  auto d = eigendecompose(sys.hamiltonian, ctx);
  for (double t : {0.3, 17.0, 1234.5}) {
    auto rho = evolve(d, sys.rho0, ctx.real(t), ctx);
    EXPECT_TRUE(near(rho.matrix.trace(), Complex(ctx.real(1L)), ctx.tolerance(24)));
    EXPECT_TRUE(is_hermitian(rho.matrix, ctx.tolerance(24)));
    EXPECT_TRUE(near(trace_of_product(rho.matrix, rho.matrix), Complex(ctx.real(1L)), ctx.tolerance(24)));
  }
}

TEST(Evolution, MatchesSchrodingerOnAQubit) {
  // H = sigma_z: <sigma_x>_t = cos 2t for |+>.
  PrecisionContext ctx(256);
  auto d = eigendecompose(HermitianMatrix(pauli_tensor(PauliAxis::kZ, 1, ctx, 1).matrix, ctx), ctx);
  Real amp = sqrt(ctx.real(0.5));
  auto rho = pure_density(PureState{{Complex(amp), Complex(amp)}}, ctx);
  auto x = pauli_tensor(PauliAxis::kX, 1, ctx, 1);
  for (double t : {0.0, 0.7, 5.0, 100.0}) {
    Real got = expectation(evolve(d, rho, ctx.real(t), ctx), x, ctx);
    EXPECT_TRUE(near(got, wbavg::testing::taylor_cos(ctx.real(2 * t), 512), ctx.tolerance(24))) << t;
  }
}

TEST(Expectation, DimensionAndHermiticityChecks) {
  PrecisionContext ctx(128);
  DensityOperator rho{diag({0.5, 0.5}, 128)};
  EXPECT_THROW(expectation(rho, Observable{ComplexMatrix::identity(3, 128)}, ctx), DimensionMismatch);
  ComplexMatrix skew(2, 2, 128);
  skew(0, 0) = Complex(ctx.zero(), ctx.real(1L));
  EXPECT_THROW(expectation(rho, Observable{skew}, ctx), NotHermitian);
  EXPECT_THROW(make_observable(skew, ctx), NotHermitian);
}

TEST(Dephasing, BlockMaskInTheEigenbasis) {
  // Spectrum {0, 0, 1, 2}: the dephased state keeps the 2x2 degenerate block
  // and the two remaining diagonal entries.
  PrecisionContext ctx(256);
  auto rot = random_degenerate_system(5, ctx, 4);
  auto d0 = eigendecompose(rot.hamiltonian, ctx);
  const ComplexMatrix& u = d0.eigenvectors;  // any unitary will do
  ComplexMatrix h = u * diag({0, 0, 1, 2}, 256) * u.adjoint();
  auto d = eigendecompose(HermitianMatrix(h, ctx), ctx);
  ASSERT_EQ(d.clusters.size(), 3u);

  ComplexMatrix r = u.adjoint() * rot.rho0.matrix * u;
  ComplexMatrix masked(4, 4, 256);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      if ((i < 2 && j < 2) || i == j) masked(i, j) = r(i, j);
  auto rho_diag = diagonal_state(d, rot.rho0, ctx);
  EXPECT_TRUE(near(rho_diag.matrix, u * masked * u.adjoint(), ctx.tolerance(24)));
  // Idempotent and stationary.
  EXPECT_TRUE(near(diagonal_state(d, rho_diag, ctx).matrix, rho_diag.matrix, ctx.tolerance(24)));
  EXPECT_TRUE(near(h * rho_diag.matrix, rho_diag.matrix * h, ctx.tolerance(24)));
}

TEST(Series, UnitaryAndEigenbasisPathsAgree) {
  PrecisionContext ctx(256);
  auto sys = random_degenerate_system(21, ctx);
  auto d = eigendecompose(sys.hamiltonian, ctx);
  std::vector<Real> times;
  for (double t : {0.0, 0.5, 3.0, 77.0, 2500.0}) times.push_back(ctx.real(t));
  auto a = expectation_series(d, sys.rho0, sys.observable, times, ctx, SeriesPath::kUnitary);
  auto b = expectation_series(d, sys.rho0, sys.observable, times, ctx, SeriesPath::kEigenbasis);
  for (std::size_t i = 0; i < times.size(); ++i) EXPECT_TRUE(near(a[i], b[i], ctx.tolerance(24)));
  EXPECT_THROW(expectation_series(d, sys.rho0, sys.observable, {}, ctx), DomainError);
}

TEST(Averaged, TimeIntegralOfTheSeries) {
  // Tr(rho_T A) against direct quadrature of w(s) <A>_{Ts}.
  PrecisionContext ctx(192);
  auto sys = random_degenerate_system(3, ctx);
  auto d = eigendecompose(sys.hamiltonian, ctx);
  auto w = normalize({1, 1}, ctx);
  for (long T : {2L, 15L}) {
    auto g = [&](const Real& t) {
      std::vector<Real> one{t};
      return expectation_series(d, sys.rho0, sys.observable, one, ctx).front();
    };
    Complex direct = continuous_weighted_average(w, g, ctx.real(T));
    Real via_state = weighted_time_average(d, sys.rho0, sys.observable, w, ctx.real(T), ctx);
    EXPECT_TRUE(near(via_state, direct.real(), ctx.half_precision_tolerance() * 16L)) << "T=" << T;
  }
}

TEST(Averaged, ApproachesTheDephasedState) {
  PrecisionContext ctx(256);
  auto sys = random_degenerate_system(4, ctx);
  auto d = eigendecompose(sys.hamiltonian, ctx);
  auto w = normalize({1, 1}, ctx);
  auto rho_diag = diagonal_state(d, sys.rho0, ctx);
  Real prev = ctx.real(10L);
  for (long T : {100L, 1000L, 10000L}) {
    auto avg = weighted_averaged_state(d, sys.rho0, w, ctx.real(T), ctx);
    EXPECT_TRUE(near(avg.matrix.trace(), Complex(ctx.real(1L)), ctx.tolerance(24)));
    Real dist = (avg.matrix - rho_diag.matrix).max_abs();
    EXPECT_TRUE(dist < prev) << "T=" << T;
    prev = dist;
  }
  EXPECT_TRUE(prev < 1e-15);
  EXPECT_THROW(weighted_averaged_state(d, sys.rho0, w, ctx.zero(), ctx), DomainError);
}

TEST(Averaged, DephasedInputIsAFixedPoint) {
  PrecisionContext ctx(256);
  auto sys = random_degenerate_system(8, ctx);
  auto d = eigendecompose(sys.hamiltonian, ctx);
  auto w = normalize({2, 2}, ctx);
  auto rho_diag = diagonal_state(d, sys.rho0, ctx);
  auto avg = weighted_averaged_state(d, rho_diag, w, ctx.real(100L), ctx);
  EXPECT_TRUE(near(avg.matrix, rho_diag.matrix, ctx.tolerance(24)));
}

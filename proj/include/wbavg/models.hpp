#pragma once

// The non-interacting three-spin model H = sum_j omega_j sigma^z_j with
// (omega_1, omega_2, omega_3) = (1, sqrt 2, sqrt 3), initial state |+>^3 and
// observable A = (1/3) sum_j sigma^x_j. Basis states are ordered
// lexicographically with up before down and site 1 most significant.

#include <algorithm>
#include <array>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "matrix.hpp"
#include "numerics.hpp"
#include "quantum.hpp"
#include "signals.hpp"
#include "spectral.hpp"

namespace wbavg {

enum class PauliAxis { kX, kY, kZ };

// sigma^axis on `site` (1-based) of an `sites`-spin register.
inline Observable pauli_tensor(PauliAxis axis, int site, const PrecisionContext& ctx, int sites = 3) {
  if (sites < 1 || sites > 6) throw DomainError("pauli_tensor supports 1..6 sites");
  if (site < 1 || site > sites) throw DomainError("site must be in 1.." + std::to_string(sites));
  const std::size_t dim = std::size_t{1} << sites;
  const int shift = sites - site;
  ComplexMatrix m(dim, dim, ctx.bits());
  for (std::size_t col = 0; col < dim; ++col) {
    const bool down = (col >> shift) & 1u;
    const std::size_t flipped = col ^ (std::size_t{1} << shift);
    switch (axis) {
      case PauliAxis::kZ:
        m(col, col).real() = ctx.real(down ? -1L : 1L);
        break;
      case PauliAxis::kX:
        m(flipped, col).real() = ctx.real(1L);
        break;
      case PauliAxis::kY:
        // sigma^y |up> = i |down>, sigma^y |down> = -i |up>
        m(flipped, col).imag() = ctx.real(down ? -1L : 1L);
        break;
    }
  }
  return Observable{std::move(m)};
}

struct SpinModel {
  HermitianMatrix hamiltonian;
  PureState initial_state;
  Observable observable;
  std::array<Real, 3> frequencies;
};

inline std::array<Real, 3> default_frequencies(const PrecisionContext& ctx) {
  return {ctx.real(1L), Real(ctx.sqrt2(), ctx.bits()), Real(ctx.sqrt3(), ctx.bits())};
}

inline SpinModel build_three_spin(const PrecisionContext& ctx, std::array<Real, 3> omega) {
  ComplexMatrix h(8, 8, ctx.bits());
  ComplexMatrix a(8, 8, ctx.bits());
  for (int j = 1; j <= 3; ++j) {
    h += pauli_tensor(PauliAxis::kZ, j, ctx).matrix * omega[j - 1];
    a += pauli_tensor(PauliAxis::kX, j, ctx).matrix;
  }
  a *= ctx.real(1L) / 3L;
  // |+>^3 has every amplitude 1/(2 sqrt 2)
  Real amp = 1L / (Real(ctx.sqrt2(), ctx.bits()) * 2L);
  PureState psi{std::vector<Complex>(8, Complex(amp))};
  return SpinModel{HermitianMatrix(h, ctx), std::move(psi), Observable{std::move(a)}, std::move(omega)};
}

inline SpinModel build_three_spin(const PrecisionContext& ctx) {
  return build_three_spin(ctx, default_frequencies(ctx));
}

// (1/3)[cos(2 omega_1 n) + cos(2 omega_2 n) + cos(2 omega_3 n)] with the
// arguments formed at guard precision and range-reduced.
inline Real explicit_signal(long n, const PrecisionContext& ctx) {
  if (n < 0) throw DomainError("explicit_signal needs n >= 0");
  const Real two_n(2L * n, ctx.guard_bits());
  Real sum = cos(reduce_angle(two_n, ctx));
  sum += cos(reduce_angle(ctx.sqrt2() * two_n, ctx));
  sum += cos(reduce_angle(ctx.sqrt3() * two_n, ctx));
  return sum / 3L;
}

// y_n as the six-term polynomial (1/6) sum_{+-} e^{+-2 i omega_j n}, i.e.
// frequencies +-omega_j / pi.
inline TrigPolynomial three_spin_polynomial(const PrecisionContext& ctx) {
  TrigPolynomial poly{ctx.complex(0), {}};
  Real sixth = ctx.real(1L) / 6L;
  Real pi(ctx.pi(), ctx.guard_bits());
  for (const Real& w : default_frequencies(ctx)) {
    Real nu(Real(w, ctx.guard_bits()) / pi, ctx.bits());
    poly.terms.push_back({Complex(sixth), nu});
    poly.terms.push_back({Complex(sixth), -nu});
  }
  return poly;
}

// (rho_diag, Tr(rho_diag A)) through the spectral route.
inline std::pair<DensityOperator, Real> model_equilibrium(const SpinModel& model, const PrecisionContext& ctx) {
  auto decomp = eigendecompose(model.hamiltonian, ctx);
  auto rho0 = pure_density(model.initial_state, ctx);
  auto rho_diag = diagonal_state(decomp, rho0, ctx);
  Real a_eq = expectation(rho_diag, model.observable, ctx);
  return {std::move(rho_diag), std::move(a_eq)};
}

// A seeded dim x dim system H = U diag(levels) U^* whose spectrum has dim-1
// distinct levels in [-1/2, 1/2], pairwise at least min_gap apart, one of
// them doubled. U comes from Gram-Schmidt on a random complex matrix; rho_0
// is a random pure state and A a random Hermitian matrix with entries in
// [-1, 1]. Only the raw mt19937_64 stream is used, so the output is the same
// on every platform.
struct RandomSystem {
  HermitianMatrix hamiltonian;
  DensityOperator rho0;
  Observable observable;
  std::vector<Real> levels;
};

namespace detail {

struct UnitInterval {
  std::mt19937_64 engine;
  // Uniform on [lo, hi) from the top 53 bits.
  double operator()(double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(engine() >> 11) * 0x1.0p-53;
  }
};

}  // namespace detail

inline RandomSystem random_degenerate_system(std::uint64_t seed, const PrecisionContext& ctx, std::size_t dim = 6,
                                             double min_gap = 0.1) {
  if (dim < 2) throw DomainError("random system needs dimension >= 2");
  if (min_gap < 0 || min_gap * static_cast<double>(dim - 2) >= 1.0) {
    throw DomainError("min_gap too large for " + std::to_string(dim - 1) + " levels in [-1/2, 1/2]");
  }
  detail::UnitInterval u{std::mt19937_64(seed)};
  std::vector<double> distinct(dim - 1);
  for (;;) {
    for (auto& x : distinct) x = u(-0.5, 0.5);
    std::sort(distinct.begin(), distinct.end());
    bool ok = true;
    for (std::size_t i = 1; i < distinct.size(); ++i) ok = ok && distinct[i] - distinct[i - 1] >= min_gap;
    if (ok) break;
  }
  std::vector<double> levels = distinct;
  levels.push_back(distinct[u.engine() % distinct.size()]);
  std::sort(levels.begin(), levels.end());

  const mpfr_prec_t bits = ctx.bits();
  auto random_complex = [&] { return Complex(Real(u(-1, 1), bits), Real(u(-1, 1), bits)); };

  ComplexMatrix q(dim, dim, bits);
  for (std::size_t j = 0; j < dim; ++j) {
    for (std::size_t i = 0; i < dim; ++i) q(i, j) = random_complex();
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < j; ++k) {
        Complex dot(bits);
        for (std::size_t i = 0; i < dim; ++i) multiply_accumulate(dot, conj(q(i, k)), q(i, j));
        for (std::size_t i = 0; i < dim; ++i) q(i, j) -= q(i, k) * dot;
      }
    }
    Real nrm(bits);
    for (std::size_t i = 0; i < dim; ++i) nrm += norm(q(i, j));
    nrm = sqrt(nrm);
    if (nrm < 1e-6) throw DomainError("degenerate random basis; try another seed");
    for (std::size_t i = 0; i < dim; ++i) q(i, j) /= nrm;
  }
  ComplexMatrix diag(dim, dim, bits);
  std::vector<Real> level_values;
  for (std::size_t i = 0; i < dim; ++i) {
    level_values.emplace_back(levels[i], bits);
    diag(i, i) = Complex(level_values.back());
  }
  HermitianMatrix h(q * diag * q.adjoint(), ctx);

  PureState psi;
  Real nrm(bits);
  for (std::size_t i = 0; i < dim; ++i) {
    psi.amplitudes.push_back(random_complex());
    nrm += norm(psi.amplitudes.back());
  }
  nrm = sqrt(nrm);
  for (auto& a : psi.amplitudes) a /= nrm;

  ComplexMatrix a(dim, dim, bits);
  for (std::size_t i = 0; i < dim; ++i) {
    a(i, i) = Complex(Real(u(-1, 1), bits));
    for (std::size_t j = i + 1; j < dim; ++j) {
      a(i, j) = random_complex();
      a(j, i) = conj(a(i, j));
    }
  }
  return RandomSystem{std::move(h), pure_density(psi, ctx), Observable{std::move(a)}, std::move(level_values)};
}

}  // namespace wbavg

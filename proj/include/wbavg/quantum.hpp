#pragma once

// Density operators, unitary evolution rho_t = U rho_0 U^* with
// U = sum_lambda e^{-i lambda t} Pi_lambda, expectation values, the dephased
// state sum_lambda Pi_lambda rho_0 Pi_lambda, and its weighted-time-average
// approximant.

#include <map>
#include <span>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "matrix.hpp"
#include "numerics.hpp"
#include "spectral.hpp"
#include "weights.hpp"

namespace wbavg {

struct PureState {
  std::vector<Complex> amplitudes;

  std::size_t dim() const { return amplitudes.size(); }
  Real norm(mpfr_prec_t bits) const {
    Real s(bits);
    for (const auto& a : amplitudes) s += wbavg::norm(a);
    return sqrt(s);
  }
};

struct DensityOperator {
  ComplexMatrix matrix;

  std::size_t dim() const { return matrix.rows(); }
};

struct Observable {
  ComplexMatrix matrix;

  std::size_t dim() const { return matrix.rows(); }
};

// Hermitian within 2^(8-bits), unit trace and smallest eigenvalue no lower
// than -2^(-bits/2).
inline void validate_density(const ComplexMatrix& m, const PrecisionContext& ctx) {
  if (!m.square() || m.rows() == 0) throw DimensionMismatch("density operator must be square");
  if (!is_hermitian(m, ctx.tolerance(8))) throw NotHermitian("density operator is not Hermitian");
  const Real tol = ctx.half_precision_tolerance();
  Complex tr = m.trace();
  if (abs(tr.real() - 1L) > tol || abs(tr.imag()) > tol) {
    throw TraceError("density operator trace is " + tr.real().to_string(20) + ", expected 1");
  }
  auto spectrum = eigendecompose(HermitianMatrix(m, ctx), ctx);
  if (spectrum.eigenvalues.front() < -tol) {
    throw DomainError("density operator is not positive semidefinite (eigenvalue " +
                      spectrum.eigenvalues.front().to_string(20) + ")");
  }
}

inline DensityOperator make_density(ComplexMatrix m, const PrecisionContext& ctx) {
  validate_density(m, ctx);
  return DensityOperator{std::move(m)};
}

inline Observable make_observable(ComplexMatrix m, const PrecisionContext& ctx) {
  if (!m.square() || m.rows() == 0) throw DimensionMismatch("observable must be square");
  if (!is_hermitian(m, ctx.tolerance(8))) throw NotHermitian("observable is not Hermitian");
  return Observable{std::move(m)};
}

// |psi><psi|; rejects states whose norm is off by more than 10 * 2^(-bits/2).
inline DensityOperator pure_density(const PureState& psi, const PrecisionContext& ctx) {
  if (psi.dim() == 0) throw DimensionMismatch("empty state vector");
  Real deviation = abs(psi.norm(ctx.bits()) - 1L);
  if (deviation > ctx.half_precision_tolerance() * 10L) {
    throw TraceError("state vector is not normalized (|norm - 1| = " + deviation.to_string(6) + ")");
  }
  const std::size_t n = psi.dim();
  ComplexMatrix m(n, n, ctx.bits());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = psi.amplitudes[i] * conj(psi.amplitudes[j]);
  return DensityOperator{std::move(m)};
}

namespace detail {

inline void require_dim(const SpectralDecomposition& d, std::size_t dim, const char* what) {
  if (d.dim() != dim) {
    throw DimensionMismatch(std::string(what) + " has dimension " + std::to_string(dim) +
                            " but the Hamiltonian has " + std::to_string(d.dim()));
  }
}

// e^{-i E_c t} for the cluster of every eigen-index.
inline std::vector<Complex> eigen_phases(const SpectralDecomposition& d, const Real& t, const PrecisionContext& ctx) {
  std::vector<Complex> cluster_phase;
  for (const auto& e : d.cluster_energies) {
    cluster_phase.push_back(unit_phase(-(Real(e, ctx.guard_bits()) * t), ctx));
  }
  std::vector<Complex> out;
  for (std::size_t i = 0; i < d.dim(); ++i) out.push_back(cluster_phase[d.cluster_of[i]]);
  return out;
}

}  // namespace detail

// U(t) = V diag(e^{-i E t}) V^*
inline ComplexMatrix propagator(const SpectralDecomposition& d, const Real& t, const PrecisionContext& ctx) {
  auto ph = detail::eigen_phases(d, t, ctx);
  ComplexMatrix diag(d.dim(), d.dim(), ctx.bits());
  for (std::size_t i = 0; i < d.dim(); ++i) diag(i, i) = ph[i];
  return from_eigenbasis(d, diag);
}

// rho_t = U rho_0 U^*; t = 0 returns rho_0 unchanged.
inline DensityOperator evolve(const SpectralDecomposition& d, const DensityOperator& rho0, const Real& t,
                              const PrecisionContext& ctx) {
  detail::require_dim(d, rho0.dim(), "state");
  if (t.is_zero()) return rho0;
  ComplexMatrix u = propagator(d, t, ctx);
  return DensityOperator{u * rho0.matrix * u.adjoint()};
}

// Tr(rho A). Throws NotHermitian when the imaginary part exceeds 2^(-bits/2).
inline Real expectation(const DensityOperator& rho, const Observable& a, const PrecisionContext& ctx) {
  if (rho.dim() != a.dim()) throw DimensionMismatch("state and observable dimensions differ");
  Complex v = trace_of_product(rho.matrix, a.matrix);
  if (abs(v.imag()) > ctx.half_precision_tolerance() * max(ctx.real(1L), a.matrix.max_abs())) {
    throw NotHermitian("expectation has imaginary part " + v.imag().to_string(6));
  }
  return std::move(v.real());
}

// rho_diag = sum over clusters of Pi rho_0 Pi.
inline DensityOperator diagonal_state(const SpectralDecomposition& d, const DensityOperator& rho0,
                                      const PrecisionContext& ctx) {
  detail::require_dim(d, rho0.dim(), "state");
  ComplexMatrix out(d.dim(), d.dim(), ctx.bits());
  for (std::size_t c = 0; c < d.clusters.size(); ++c) {
    const ComplexMatrix& pi = projection(d, c).matrix;
    out += pi * rho0.matrix * pi;
  }
  return DensityOperator{std::move(out)};
}

// int_0^1 w(s) rho_{Ts} ds: in the eigenbasis, entry (m,n) of rho_0 picks
// up the factor F_T(E_m - E_n).
inline DensityOperator weighted_averaged_state(const SpectralDecomposition& d, const DensityOperator& rho0,
                                               const NormalizedWeight& w, const Real& T,
                                               const PrecisionContext& /*ctx*/) {
  detail::require_dim(d, rho0.dim(), "state");
  if (!(T > 0.0)) throw DomainError("weighted averaged state needs T > 0");
  const std::size_t nc = d.clusters.size();
  std::vector<Real> omegas;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> slot;
  for (std::size_t a = 0; a < nc; ++a)
    for (std::size_t b = a + 1; b < nc; ++b) {
      slot[{a, b}] = omegas.size();
      omegas.push_back(d.cluster_energies[a] - d.cluster_energies[b]);
    }
  auto kernels = kernel_FT_batch(w, omegas, T);

  ComplexMatrix r = to_eigenbasis(d, rho0.matrix);
  for (std::size_t m = 0; m < d.dim(); ++m)
    for (std::size_t n = 0; n < d.dim(); ++n) {
      std::size_t cm = d.cluster_of[m], cn = d.cluster_of[n];
      if (cm == cn) continue;
      // F_T(-omega) = conj(F_T(omega)) since w is real.
      r(m, n) *= cm < cn ? kernels[slot[{cm, cn}]] : conj(kernels[slot[{cn, cm}]]);
    }
  return DensityOperator{from_eigenbasis(d, r)};
}

enum class SeriesPath { kUnitary, kEigenbasis };

// <A>_t for each t, either by evolving the state or by the expansion
// sum_{m,n} rho_mn A_nm e^{-i t (E_m - E_n)} in the eigenbasis.
inline std::vector<Real> expectation_series(const SpectralDecomposition& d, const DensityOperator& rho0,
                                            const Observable& a, std::span<const Real> times,
                                            const PrecisionContext& ctx,
                                            SeriesPath path = SeriesPath::kEigenbasis) {
  if (times.empty()) throw DomainError("expectation_series needs at least one time");
  detail::require_dim(d, rho0.dim(), "state");
  detail::require_dim(d, a.dim(), "observable");
  std::vector<Real> out;
  out.reserve(times.size());
  if (path == SeriesPath::kUnitary) {
    for (const auto& t : times) out.push_back(expectation(evolve(d, rho0, t, ctx), a, ctx));
    return out;
  }
  const std::size_t n = d.dim();
  ComplexMatrix r = to_eigenbasis(d, rho0.matrix);
  ComplexMatrix at = to_eigenbasis(d, a.matrix);
  // c_mn = rho_mn A_nm
  ComplexMatrix coeff(n, n, ctx.bits());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) coeff(i, j) = r(i, j) * at(j, i);
  const Real tol = ctx.half_precision_tolerance() * max(ctx.real(1L), a.matrix.max_abs());
  for (const auto& t : times) {
    auto ph = detail::eigen_phases(d, t, ctx);
    Complex sum(ctx.bits());
    for (std::size_t i = 0; i < n; ++i) {
      Complex row(ctx.bits());
      for (std::size_t j = 0; j < n; ++j) multiply_accumulate(row, coeff(i, j), conj(ph[j]));
      multiply_accumulate(sum, row, ph[i]);
    }
    if (abs(sum.imag()) > tol) throw NotHermitian("expectation has imaginary part " + sum.imag().to_string(6));
    out.push_back(std::move(sum.real()));
  }
  return out;
}

// Tr(rho A) averaged with the continuous weight over [0, T], via the
// averaged state.
inline Real weighted_time_average(const SpectralDecomposition& d, const DensityOperator& rho0,
                                  const Observable& a, const NormalizedWeight& w, const Real& T,
                                  const PrecisionContext& ctx) {
  return expectation(weighted_averaged_state(d, rho0, w, T, ctx), a, ctx);
}

}  // namespace wbavg

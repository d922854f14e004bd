#pragma once

// Hermitian eigendecomposition by cyclic complex Jacobi rotations, grouping
// of (near-)equal eigenvalues into degeneracy clusters, and the orthogonal
// projections onto each cluster's eigenspace.

#include <algorithm>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "matrix.hpp"
#include "numerics.hpp"
#include "real.hpp"

namespace wbavg {

class HermitianMatrix {
 public:
  // Accepts entries that are Hermitian to within 2^(8-bits) relative to the
  // larger of each mirrored pair, then stores the exact Hermitian part.
  HermitianMatrix(const ComplexMatrix& entries, const PrecisionContext& ctx) : m_(entries) {
    if (!entries.square() || entries.rows() == 0) throw DimensionMismatch("Hermitian matrix must be square");
    if (!is_hermitian(entries, ctx.tolerance(8))) throw NotHermitian("matrix is not Hermitian");
    const std::size_t n = entries.rows();
    for (std::size_t i = 0; i < n; ++i) {
      m_(i, i).imag() = Real(ctx.bits());
      for (std::size_t j = i + 1; j < n; ++j) {
        Complex avg = (entries(i, j) + conj(entries(j, i))) * Real(0.5, ctx.bits());
        m_(j, i) = conj(avg);
        m_(i, j) = std::move(avg);
      }
    }
  }

  std::size_t dim() const { return m_.rows(); }
  const ComplexMatrix& matrix() const { return m_; }

 private:
  ComplexMatrix m_;
};

using Cluster = std::vector<std::size_t>;

struct SpectralDecomposition {
  // Ascending, with multiplicity.
  std::vector<Real> eigenvalues;
  // Orthonormal eigenvectors as columns, in eigenvalue order.
  ComplexMatrix eigenvectors;
  std::vector<Cluster> clusters;
  Real cluster_tolerance;
  // Mean eigenvalue of each cluster; the lambda of its projection.
  std::vector<Real> cluster_energies;
  // cluster_of[i] is the cluster holding eigenvalue i.
  std::vector<std::size_t> cluster_of;

  std::size_t dim() const { return eigenvalues.size(); }
};

struct SpectralProjection {
  std::size_t cluster_id = 0;
  ComplexMatrix matrix;
};

// Greedy left-to-right: a new cluster starts whenever the gap to the
// previous eigenvalue exceeds `tolerance`.
inline std::vector<Cluster> cluster_degeneracies(std::span<const Real> eigenvalues, const Real& tolerance) {
  if (tolerance.sign() < 0) throw DomainError("cluster tolerance must be non-negative");
  std::vector<Cluster> clusters;
  for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
    if (i > 0 && eigenvalues[i] < eigenvalues[i - 1]) throw DomainError("eigenvalues must be ascending");
    if (i == 0 || eigenvalues[i] - eigenvalues[i - 1] > tolerance) clusters.emplace_back();
    clusters.back().push_back(i);
  }
  return clusters;
}

// 2^(-bits/2) * (lambda_max - lambda_min)
inline Real default_cluster_tolerance(std::span<const Real> ascending, const PrecisionContext& ctx) {
  if (ascending.empty()) return ctx.zero();
  return ctx.half_precision_tolerance() * (ascending.back() - ascending.front());
}

struct JacobiOptions {
  int max_sweeps = 100;
  // Overrides the default cluster tolerance when set.
  std::optional<Real> cluster_tolerance;
};

namespace detail {

// One unitary rotation in the (p,q) plane that zeroes a(p,q).
inline void jacobi_rotate(ComplexMatrix& a, ComplexMatrix& v, std::size_t p, std::size_t q, mpfr_prec_t bits) {
  const std::size_t n = a.rows();
  Real r = abs(a(p, q));
  // u = e^{-i phi} where a(p,q) = r e^{i phi}
  Complex u = conj(a(p, q)) / r;
  Complex ubar = conj(u);
  Real tau = (a(q, q).real() - a(p, p).real()) / (r * 2L);
  Real t = 1L / (abs(tau) + sqrt(tau * tau + 1L));
  if (tau.sign() < 0) t = -t;
  Real c = 1L / sqrt(t * t + 1L);
  Real s = t * c;
  Real app = a(p, p).real() - t * r;
  Real aqq = a(q, q).real() + t * r;

  auto rotate_columns = [&](ComplexMatrix& m) {
    for (std::size_t k = 0; k < m.rows(); ++k) {
      Complex mp = m(k, p) * c - (u * m(k, q)) * s;
      Complex mq = m(k, p) * s + (u * m(k, q)) * c;
      m(k, p) = std::move(mp);
      m(k, q) = std::move(mq);
    }
  };
  rotate_columns(a);
  rotate_columns(v);
  for (std::size_t k = 0; k < n; ++k) {
    Complex rp = a(p, k) * c - (ubar * a(q, k)) * s;
    Complex rq = a(p, k) * s + (ubar * a(q, k)) * c;
    a(p, k) = std::move(rp);
    a(q, k) = std::move(rq);
  }
  a(p, q) = Complex(bits);
  a(q, p) = Complex(bits);
  a(p, p) = Complex(std::move(app), Real(bits));
  a(q, q) = Complex(std::move(aqq), Real(bits));
}

inline Real off_diagonal_norm(const ComplexMatrix& a) {
  Real s(a.precision());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += norm(a(i, j));
  return sqrt(s);
}

inline void assign_clusters(SpectralDecomposition& d, const PrecisionContext& ctx) {
  d.clusters = cluster_degeneracies(d.eigenvalues, d.cluster_tolerance);
  d.cluster_of.assign(d.dim(), 0);
  d.cluster_energies.clear();
  for (std::size_t c = 0; c < d.clusters.size(); ++c) {
    Real mean = ctx.zero();
    for (std::size_t i : d.clusters[c]) {
      d.cluster_of[i] = c;
      mean += d.eigenvalues[i];
    }
    d.cluster_energies.push_back(mean / static_cast<long>(d.clusters[c].size()));
  }
}

}  // namespace detail

// Cyclic Jacobi sweeps in fixed (p,q) order until the off-diagonal Frobenius
// norm is below n * 2^(8-bits) of the total; eigenvalues are returned ascending.
// Off-diagonal entries under 2^(2-bits) of the total are rounding noise and
// are zeroed rather than rotated.
inline SpectralDecomposition eigendecompose(const HermitianMatrix& h, const PrecisionContext& ctx,
                                            const JacobiOptions& opts = {}) {
  const std::size_t n = h.dim();
  if (n > 64) throw DomainError("eigendecompose is limited to dimension 64");
  const mpfr_prec_t bits = ctx.bits();
  ComplexMatrix a(n, n, bits);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const Complex& z = h.matrix()(i, j);
      a(i, j) = Complex(Real(z.real(), bits), Real(z.imag(), bits));
    }
  ComplexMatrix v = ComplexMatrix::identity(n, bits);

  const Real total = a.frobenius_norm();
  const Real stop = ctx.tolerance(8) * total * static_cast<long>(n);
  const Real negligible = ctx.tolerance(2) * total;
  bool converged = total.is_zero();
  for (int sweep = 0; sweep < opts.max_sweeps && !converged; ++sweep) {
    if (detail::off_diagonal_norm(a) <= stop) {
      converged = true;
      break;
    }
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        if (abs(a(p, q)) <= negligible) {
          a(p, q) = Complex(bits);
          a(q, p) = Complex(bits);
          continue;
        }
        detail::jacobi_rotate(a, v, p, q, bits);
      }
  }
  if (!converged && detail::off_diagonal_norm(a) > stop) {
    throw ConvergenceError("Jacobi eigensolver did not converge in " + std::to_string(opts.max_sweeps) + " sweeps",
                           "", detail::off_diagonal_norm(a).to_string(10));
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });

  SpectralDecomposition d;
  d.eigenvectors = ComplexMatrix(n, n, bits);
  for (std::size_t col = 0; col < n; ++col) {
    d.eigenvalues.push_back(a(order[col], order[col]).real());
    for (std::size_t row = 0; row < n; ++row) d.eigenvectors(row, col) = v(row, order[col]);
  }
  d.cluster_tolerance =
      opts.cluster_tolerance ? *opts.cluster_tolerance : default_cluster_tolerance(d.eigenvalues, ctx);
  detail::assign_clusters(d, ctx);
  return d;
}

// Pi = sum over the cluster of v_i v_i^*.
inline SpectralProjection projection(const SpectralDecomposition& d, std::size_t cluster_id) {
  if (cluster_id >= d.clusters.size()) {
    throw DomainError("cluster id " + std::to_string(cluster_id) + " out of range");
  }
  const std::size_t n = d.dim();
  ComplexMatrix pi(n, n, d.eigenvectors.precision());
  for (std::size_t k : d.clusters[cluster_id])
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        multiply_accumulate(pi(i, j), d.eigenvectors(i, k), conj(d.eigenvectors(j, k)));
  return SpectralProjection{cluster_id, std::move(pi)};
}

// V^* m V: `m` expressed in the eigenbasis.
inline ComplexMatrix to_eigenbasis(const SpectralDecomposition& d, const ComplexMatrix& m) {
  if (m.rows() != d.dim() || m.cols() != d.dim()) throw DimensionMismatch("matrix does not match the spectrum");
  return d.eigenvectors.adjoint() * m * d.eigenvectors;
}

// V m V^*
inline ComplexMatrix from_eigenbasis(const SpectralDecomposition& d, const ComplexMatrix& m) {
  if (m.rows() != d.dim() || m.cols() != d.dim()) throw DimensionMismatch("matrix does not match the spectrum");
  return d.eigenvectors * m * d.eigenvectors.adjoint();
}

}  // namespace wbavg

#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "errors.hpp"
#include "real.hpp"

namespace wbavg {

// Dense row-major complex matrix at a fixed precision.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols, mpfr_prec_t bits)
      : rows_(rows), cols_(cols), bits_(bits), data_(rows * cols, Complex(bits)) {}

  static ComplexMatrix identity(std::size_t n, mpfr_prec_t bits) {
    ComplexMatrix m(n, n, bits);
    for (std::size_t i = 0; i < n; ++i) m(i, i).real() = Real(1L, bits);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }
  mpfr_prec_t precision() const { return bits_; }

  Complex& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  ComplexMatrix adjoint() const {
    ComplexMatrix out(cols_, rows_, bits_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out(j, i) = conj((*this)(i, j));
    return out;
  }

  ComplexMatrix& operator+=(const ComplexMatrix& o) {
    require_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  ComplexMatrix& operator-=(const ComplexMatrix& o) {
    require_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  ComplexMatrix& operator*=(const Real& s) {
    for (auto& z : data_) z *= s;
    return *this;
  }

  Complex trace() const {
    Complex t(bits_);
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
  }

  // Largest entry modulus.
  Real max_abs() const {
    Real m(bits_);
    for (const auto& z : data_) m = max(m, abs(z));
    return m;
  }

  Real frobenius_norm() const {
    Real s(bits_);
    for (const auto& z : data_) s += norm(z);
    return sqrt(s);
  }

 private:
  void require_same_shape(const ComplexMatrix& o) const {
    if (o.rows_ != rows_ || o.cols_ != cols_) throw DimensionMismatch("matrix shapes differ");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  mpfr_prec_t bits_ = 64;
  std::vector<Complex> data_;
};

inline ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
inline ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
inline ComplexMatrix operator*(ComplexMatrix a, const Real& s) { return a *= s; }

inline ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionMismatch("matrix product: inner dimensions differ");
  ComplexMatrix out(a.rows(), b.cols(), std::max(a.precision(), b.precision()));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Complex& aik = a(i, k);
      if (aik.real().is_zero() && aik.imag().is_zero()) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) multiply_accumulate(out(i, j), aik, b(k, j));
    }
  return out;
}

// Tr(a b) without forming the product.
inline Complex trace_of_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows() || a.rows() != b.cols()) throw DimensionMismatch("trace of product: shapes differ");
  Complex t(std::max(a.precision(), b.precision()));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) multiply_accumulate(t, a(i, j), b(j, i));
  return t;
}

// Largest |m_ij - conj(m_ji)| measured against max(|m_ij|, |m_ji|); zero pairs pass.
inline bool is_hermitian(const ComplexMatrix& m, const Real& rel_tol) {
  if (!m.square()) return false;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i; j < m.cols(); ++j) {
      Real diff = abs(m(i, j) - conj(m(j, i)));
      if (diff.is_zero()) continue;
      Real scale = max(abs(m(i, j)), abs(m(j, i)));
      if (diff > rel_tol * scale) return false;
    }
  return true;
}

}  // namespace wbavg

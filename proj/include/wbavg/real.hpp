#pragma once

// Value-semantic wrappers around MPFR numbers. Every Real carries its own
// precision; binary operations produce the larger of the two operand
// precisions and round to nearest.

#include <mpfr.h>

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <ostream>
#include <string>
#include <utility>

#include "errors.hpp"

namespace wbavg {

class Real {
 public:
  explicit Real(mpfr_prec_t bits = 64) {
    mpfr_init2(v_, bits);
    mpfr_set_zero(v_, 1);
  }
  Real(long value, mpfr_prec_t bits) {
    mpfr_init2(v_, bits);
    mpfr_set_si(v_, value, MPFR_RNDN);
  }
  Real(int value, mpfr_prec_t bits) : Real(static_cast<long>(value), bits) {}
  Real(double value, mpfr_prec_t bits) {
    mpfr_init2(v_, bits);
    mpfr_set_d(v_, value, MPFR_RNDN);
  }
  // Copy of `other` rounded to `bits`.
  Real(const Real& other, mpfr_prec_t bits) {
    mpfr_init2(v_, bits);
    mpfr_set(v_, other.v_, MPFR_RNDN);
  }

  Real(const Real& other) {
    mpfr_init2(v_, mpfr_get_prec(other.v_));
    mpfr_set(v_, other.v_, MPFR_RNDN);
  }
  Real(Real&& other) noexcept {
    std::memcpy(v_, other.v_, sizeof(v_));
    other.v_->_mpfr_d = nullptr;
  }
  Real& operator=(const Real& other) {
    if (this == &other) return *this;
    if (!alive()) {
      mpfr_init2(v_, mpfr_get_prec(other.v_));
    } else if (mpfr_get_prec(v_) != mpfr_get_prec(other.v_)) {
      mpfr_set_prec(v_, mpfr_get_prec(other.v_));
    }
    mpfr_set(v_, other.v_, MPFR_RNDN);
    return *this;
  }
  Real& operator=(Real&& other) noexcept {
    std::swap(*v_, *other.v_);
    return *this;
  }
  ~Real() {
    if (alive()) mpfr_clear(v_);
  }

  // Parses a decimal (or "inf"/"nan") string; throws DomainError on junk.
  static Real parse(const std::string& text, mpfr_prec_t bits) {
    Real r(bits);
    char* end = nullptr;
    if (!text.empty()) mpfr_strtofr(r.v_, text.c_str(), &end, 10, MPFR_RNDN);
    if (end == nullptr || end == text.c_str() || *end != '\0') {
      throw DomainError("not a decimal number: '" + text + "'");
    }
    return r;
  }

  mpfr_ptr raw() { return v_; }
  mpfr_srcptr raw() const { return v_; }
  mpfr_prec_t precision() const { return mpfr_get_prec(v_); }

  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  bool is_finite() const { return mpfr_number_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }
  long exponent() const { return is_zero() || !is_finite() ? 0 : mpfr_get_exp(v_); }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  long to_long() const { return mpfr_get_si(v_, MPFR_RNDN); }

  // Scientific notation with `digits` significant digits, e.g. "1.5e+00".
  std::string to_string(int digits = 40) const {
    if (!is_finite()) return mpfr_nan_p(v_) ? "nan" : (sign() > 0 ? "inf" : "-inf");
    char* buf = nullptr;
    mpfr_asprintf(&buf, "%.*Re", digits - 1, v_);
    std::string out(buf);
    mpfr_free_str(buf);
    return out;
  }

  Real& operator+=(const Real& o) { return widen(o), mpfr_add(v_, v_, o.v_, MPFR_RNDN), *this; }
  Real& operator-=(const Real& o) { return widen(o), mpfr_sub(v_, v_, o.v_, MPFR_RNDN), *this; }
  Real& operator*=(const Real& o) { return widen(o), mpfr_mul(v_, v_, o.v_, MPFR_RNDN), *this; }
  Real& operator/=(const Real& o) { return widen(o), mpfr_div(v_, v_, o.v_, MPFR_RNDN), *this; }
  Real& operator+=(long o) { return mpfr_add_si(v_, v_, o, MPFR_RNDN), *this; }
  Real& operator-=(long o) { return mpfr_sub_si(v_, v_, o, MPFR_RNDN), *this; }
  Real& operator*=(long o) { return mpfr_mul_si(v_, v_, o, MPFR_RNDN), *this; }
  Real& operator/=(long o) { return mpfr_div_si(v_, v_, o, MPFR_RNDN), *this; }

  Real operator-() const {
    Real r(*this);
    mpfr_neg(r.v_, r.v_, MPFR_RNDN);
    return r;
  }

 private:
  bool alive() const { return v_->_mpfr_d != nullptr; }
  void widen(const Real& o) {
    if (mpfr_get_prec(o.v_) > mpfr_get_prec(v_)) mpfr_prec_round(v_, mpfr_get_prec(o.v_), MPFR_RNDN);
  }

  mpfr_t v_;
};

inline mpfr_prec_t common_precision(const Real& a, const Real& b) {
  return std::max(a.precision(), b.precision());
}

inline Real operator+(Real a, const Real& b) { return a += b; }
inline Real operator-(Real a, const Real& b) { return a -= b; }
inline Real operator*(Real a, const Real& b) { return a *= b; }
inline Real operator/(Real a, const Real& b) { return a /= b; }
inline Real operator+(Real a, long b) { return a += b; }
inline Real operator-(Real a, long b) { return a -= b; }
inline Real operator*(Real a, long b) { return a *= b; }
inline Real operator/(Real a, long b) { return a /= b; }
inline Real operator*(long a, Real b) { return b *= a; }
inline Real operator+(long a, Real b) { return b += a; }
inline Real operator+(Real a, double b) { return mpfr_add_d(a.raw(), a.raw(), b, MPFR_RNDN), a; }
inline Real operator-(Real a, double b) { return mpfr_sub_d(a.raw(), a.raw(), b, MPFR_RNDN), a; }
inline Real operator*(Real a, double b) { return mpfr_mul_d(a.raw(), a.raw(), b, MPFR_RNDN), a; }
inline Real operator/(Real a, double b) { return mpfr_div_d(a.raw(), a.raw(), b, MPFR_RNDN), a; }
inline Real operator*(double a, Real b) { return b * a; }
inline Real operator+(double a, Real b) { return b + a; }
inline Real operator+(Real a, int b) { return a += static_cast<long>(b); }
inline Real operator-(Real a, int b) { return a -= static_cast<long>(b); }
inline Real operator*(Real a, int b) { return a *= static_cast<long>(b); }
inline Real operator/(Real a, int b) { return a /= static_cast<long>(b); }
inline Real operator*(int a, Real b) { return b *= static_cast<long>(a); }
inline Real operator+(int a, Real b) { return b += static_cast<long>(a); }
inline Real operator-(long a, const Real& b) {
  Real r(b.precision());
  mpfr_si_sub(r.raw(), a, b.raw(), MPFR_RNDN);
  return r;
}
inline Real operator/(long a, const Real& b) {
  Real r(b.precision());
  mpfr_si_div(r.raw(), a, b.raw(), MPFR_RNDN);
  return r;
}

inline bool operator<(const Real& a, const Real& b) { return mpfr_less_p(a.raw(), b.raw()); }
inline bool operator<=(const Real& a, const Real& b) { return mpfr_lessequal_p(a.raw(), b.raw()); }
inline bool operator>(const Real& a, const Real& b) { return mpfr_greater_p(a.raw(), b.raw()); }
inline bool operator>=(const Real& a, const Real& b) { return mpfr_greaterequal_p(a.raw(), b.raw()); }
inline bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.raw(), b.raw()); }
inline bool operator!=(const Real& a, const Real& b) { return !(a == b); }
inline bool operator<(const Real& a, double b) { return mpfr_cmp_d(a.raw(), b) < 0; }
inline bool operator<=(const Real& a, double b) { return mpfr_cmp_d(a.raw(), b) <= 0; }
inline bool operator>(const Real& a, double b) { return mpfr_cmp_d(a.raw(), b) > 0; }
inline bool operator>=(const Real& a, double b) { return mpfr_cmp_d(a.raw(), b) >= 0; }
inline bool operator==(const Real& a, double b) { return mpfr_cmp_d(a.raw(), b) == 0; }
inline bool operator!=(const Real& a, double b) { return mpfr_cmp_d(a.raw(), b) != 0; }

inline std::ostream& operator<<(std::ostream& os, const Real& x) { return os << x.to_string(); }

#define WBAVG_REAL_UNARY(name, fn)        \
  inline Real name(const Real& x) {       \
    Real r(x.precision());                \
    fn(r.raw(), x.raw(), MPFR_RNDN);      \
    return r;                             \
  }
WBAVG_REAL_UNARY(exp, mpfr_exp)
WBAVG_REAL_UNARY(log, mpfr_log)
WBAVG_REAL_UNARY(log1p, mpfr_log1p)
WBAVG_REAL_UNARY(sqrt, mpfr_sqrt)
WBAVG_REAL_UNARY(rec_sqrt, mpfr_rec_sqrt)
WBAVG_REAL_UNARY(sin, mpfr_sin)
WBAVG_REAL_UNARY(cos, mpfr_cos)
WBAVG_REAL_UNARY(abs, mpfr_abs)
WBAVG_REAL_UNARY(log10, mpfr_log10)
#undef WBAVG_REAL_UNARY

inline Real floor(const Real& x) {
  Real r(x.precision());
  mpfr_floor(r.raw(), x.raw());
  return r;
}
// Nearest integer, ties away from zero.
inline Real round(const Real& x) {
  Real r(x.precision());
  mpfr_round(r.raw(), x.raw());
  return r;
}
inline Real pow(const Real& x, const Real& y) {
  Real r(common_precision(x, y));
  mpfr_pow(r.raw(), x.raw(), y.raw(), MPFR_RNDN);
  return r;
}
inline Real pow(const Real& x, long n) {
  Real r(x.precision());
  mpfr_pow_si(r.raw(), x.raw(), n, MPFR_RNDN);
  return r;
}
// x * 2^k, exact.
inline Real ldexp(const Real& x, long k) {
  Real r(x.precision());
  mpfr_mul_2si(r.raw(), x.raw(), k, MPFR_RNDN);
  return r;
}
inline Real hypot(const Real& x, const Real& y) {
  Real r(common_precision(x, y));
  mpfr_hypot(r.raw(), x.raw(), y.raw(), MPFR_RNDN);
  return r;
}
inline Real max(const Real& a, const Real& b) { return a < b ? b : a; }
inline Real min(const Real& a, const Real& b) { return b < a ? b : a; }

// 2^k at the given precision.
inline Real power_of_two(long k, mpfr_prec_t bits) {
  Real r(1L, bits);
  mpfr_mul_2si(r.raw(), r.raw(), k, MPFR_RNDN);
  return r;
}

class Complex {
 public:
  explicit Complex(mpfr_prec_t bits = 64) : re_(bits), im_(bits) {}
  explicit Complex(Real re) : re_(std::move(re)), im_(re_.precision()) {}
  Complex(Real re, Real im) : re_(std::move(re)), im_(std::move(im)) {}

  const Real& real() const { return re_; }
  const Real& imag() const { return im_; }
  Real& real() { return re_; }
  Real& imag() { return im_; }
  mpfr_prec_t precision() const { return std::max(re_.precision(), im_.precision()); }

  Complex& operator+=(const Complex& o) { return re_ += o.re_, im_ += o.im_, *this; }
  Complex& operator-=(const Complex& o) { return re_ -= o.re_, im_ -= o.im_, *this; }
  Complex& operator*=(const Real& s) { return re_ *= s, im_ *= s, *this; }
  Complex& operator/=(const Real& s) { return re_ /= s, im_ /= s, *this; }
  Complex& operator*=(const Complex& o) {
    Real re = re_ * o.re_ - im_ * o.im_;
    im_ = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(re);
    return *this;
  }
  Complex& operator/=(const Complex& o) {
    Real den = o.re_ * o.re_ + o.im_ * o.im_;
    Real re = (re_ * o.re_ + im_ * o.im_) / den;
    im_ = (im_ * o.re_ - re_ * o.im_) / den;
    re_ = std::move(re);
    return *this;
  }
  Complex operator-() const { return Complex(-re_, -im_); }

 private:
  Real re_;
  Real im_;
};

inline Complex operator+(Complex a, const Complex& b) { return a += b; }
inline Complex operator-(Complex a, const Complex& b) { return a -= b; }
inline Complex operator*(Complex a, const Complex& b) { return a *= b; }
inline Complex operator/(Complex a, const Complex& b) { return a /= b; }
inline Complex operator*(Complex a, const Real& s) { return a *= s; }
inline Complex operator*(const Real& s, Complex a) { return a *= s; }
inline Complex operator/(Complex a, const Real& s) { return a /= s; }

inline Complex conj(const Complex& z) { return Complex(z.real(), -z.imag()); }
inline Real abs(const Complex& z) { return hypot(z.real(), z.imag()); }
inline Real norm(const Complex& z) { return z.real() * z.real() + z.imag() * z.imag(); }

// acc += a * b without allocating the product's temporaries twice.
inline void multiply_accumulate(Complex& acc, const Complex& a, const Complex& b) {
  Real t(acc.precision());
  mpfr_mul(t.raw(), a.real().raw(), b.real().raw(), MPFR_RNDN);
  mpfr_add(acc.real().raw(), acc.real().raw(), t.raw(), MPFR_RNDN);
  mpfr_mul(t.raw(), a.imag().raw(), b.imag().raw(), MPFR_RNDN);
  mpfr_sub(acc.real().raw(), acc.real().raw(), t.raw(), MPFR_RNDN);
  mpfr_mul(t.raw(), a.real().raw(), b.imag().raw(), MPFR_RNDN);
  mpfr_add(acc.imag().raw(), acc.imag().raw(), t.raw(), MPFR_RNDN);
  mpfr_mul(t.raw(), a.imag().raw(), b.real().raw(), MPFR_RNDN);
  mpfr_add(acc.imag().raw(), acc.imag().raw(), t.raw(), MPFR_RNDN);
}

inline std::ostream& operator<<(std::ostream& os, const Complex& z) {
  return os << '(' << z.real() << ", " << z.imag() << ')';
}

}  // namespace wbavg

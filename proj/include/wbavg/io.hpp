#pragma once

// JSON input and output for matrices, states and trigonometric polynomials,
// plus a small arithmetic expression parser for exact-looking inputs such as
// "sqrt(2)/pi" or "1.5e-3".

#include <cctype>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "errors.hpp"
#include "json.hpp"
#include "matrix.hpp"
#include "numerics.hpp"
#include "quantum.hpp"
#include "signals.hpp"

namespace wbavg {

namespace detail {

// expr   := term (('+' | '-') term)*
// term   := factor (('*' | '/') factor)*
// factor := ('+' | '-') factor | number | 'pi' | 'sqrt' '(' expr ')' | '(' expr ')'
class ExpressionParser {
 public:
  ExpressionParser(std::string_view text, const PrecisionContext& ctx) : s_(text), ctx_(ctx) {}

  Real parse() {
    Real v = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return v;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
  const PrecisionContext& ctx_;

  [[noreturn]] void fail(const std::string& why) const {
    throw DomainError("cannot parse number '" + std::string(s_) + "': " + why);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  bool accept_word(std::string_view w) {
    skip();
    if (s_.substr(pos_, w.size()) != w) return false;
    std::size_t end = pos_ + w.size();
    if (end < s_.size() && std::isalnum(static_cast<unsigned char>(s_[end]))) return false;
    pos_ = end;
    return true;
  }

  Real expr() {
    Real v = term();
    for (;;) {
      if (accept('+')) v += term();
      else if (accept('-')) v -= term();
      else return v;
    }
  }
  Real term() {
    Real v = factor();
    for (;;) {
      if (accept('*')) {
        v *= factor();
      } else if (accept('/')) {
        Real d = factor();
        if (d.is_zero()) fail("division by zero");
        v /= d;
      } else {
        return v;
      }
    }
  }
  Real factor() {
    if (accept('-')) return -factor();
    if (accept('+')) return factor();
    if (accept('(')) {
      Real v = expr();
      if (!accept(')')) fail("missing ')'");
      return v;
    }
    if (accept_word("pi")) return Real(ctx_.pi(), ctx_.guard_bits());
    if (accept_word("sqrt")) {
      if (!accept('(')) fail("sqrt needs '('");
      Real v = expr();
      if (!accept(')')) fail("missing ')'");
      if (v.sign() < 0) fail("sqrt of a negative number");
      return sqrt(v);
    }
    return number();
  }
  Real number() {
    skip();
    const std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ == start || (pos_ == start + 1 && s_[start] == '.')) fail("expected a number");
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      const std::size_t exp_start = pos_;
      digits();
      if (pos_ == exp_start) pos_ = save;
    }
    return Real::parse(std::string(s_.substr(start, pos_ - start)), ctx_.guard_bits());
  }
};

}  // namespace detail

// Evaluated at guard precision, then rounded to the working precision.
inline Real parse_expression(std::string_view text, const PrecisionContext& ctx) {
  return Real(detail::ExpressionParser(text, ctx).parse(), ctx.bits());
}

// A JSON number or a string expression.
inline Real real_from_json(const nlohmann::json& j, const PrecisionContext& ctx) {
  if (j.is_string()) return parse_expression(j.get<std::string>(), ctx);
  if (j.is_number()) {
    // Integers exactly; floating literals through their shortest decimal form.
    if (j.is_number_integer()) return ctx.real(j.get<long>());
    return parse_expression(j.dump(), ctx);
  }
  throw DomainError("expected a number or a numeric string, got " + j.dump());
}

// [re, im] or a bare real.
inline Complex complex_from_json(const nlohmann::json& j, const PrecisionContext& ctx) {
  if (j.is_array()) {
    if (j.size() != 2) throw DomainError("complex entries are [re, im] pairs");
    return Complex(real_from_json(j[0], ctx), real_from_json(j[1], ctx));
  }
  return Complex(real_from_json(j, ctx), ctx.zero());
}

// {"dim": n, "entries": [[[re, im], ...], ...]}
inline ComplexMatrix matrix_from_json(const nlohmann::json& j, const PrecisionContext& ctx) {
  if (!j.is_object() || !j.contains("entries")) throw DomainError("matrix JSON needs an \"entries\" array");
  const auto& rows = j.at("entries");
  if (!rows.is_array() || rows.empty()) throw DimensionMismatch("matrix has no rows");
  const std::size_t n = rows.size();
  if (j.contains("dim") && j.at("dim").get<std::size_t>() != n) {
    throw DimensionMismatch("\"dim\" is " + j.at("dim").dump() + " but there are " + std::to_string(n) + " rows");
  }
  ComplexMatrix m(n, n, ctx.bits());
  for (std::size_t i = 0; i < n; ++i) {
    if (!rows[i].is_array() || rows[i].size() != n) {
      throw DimensionMismatch("row " + std::to_string(i) + " does not have " + std::to_string(n) + " entries");
    }
    for (std::size_t k = 0; k < n; ++k) m(i, k) = complex_from_json(rows[i][k], ctx);
  }
  return m;
}

// A density matrix ("entries") or a pure state ("amplitudes").
inline DensityOperator state_from_json(const nlohmann::json& j, const PrecisionContext& ctx) {
  if (j.is_object() && j.contains("amplitudes")) {
    PureState psi;
    for (const auto& a : j.at("amplitudes")) psi.amplitudes.push_back(complex_from_json(a, ctx));
    if (j.contains("dim") && j.at("dim").get<std::size_t>() != psi.dim()) {
      throw DimensionMismatch("\"dim\" does not match the number of amplitudes");
    }
    return pure_density(psi, ctx);
  }
  return make_density(matrix_from_json(j, ctx), ctx);
}

inline int digits_for_bits(long bits) { return static_cast<int>(bits * 0.30103) + 2; }

inline nlohmann::json matrix_to_json(const ComplexMatrix& m, int digits) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t k = 0; k < m.cols(); ++k)
      row.push_back({m(i, k).real().to_string(digits), m(i, k).imag().to_string(digits)});
    rows.push_back(std::move(row));
  }
  return {{"dim", m.rows()}, {"entries", std::move(rows)}};
}

// {"a0": z, "terms": [{"amplitude": z, "frequency": x}, ...]}
inline TrigPolynomial polynomial_from_json(const nlohmann::json& j, const PrecisionContext& ctx) {
  TrigPolynomial poly{ctx.complex(0), {}};
  if (j.contains("a0")) poly.a0 = complex_from_json(j.at("a0"), ctx);
  for (const auto& t : j.at("terms")) {
    poly.terms.push_back({complex_from_json(t.at("amplitude"), ctx), real_from_json(t.at("frequency"), ctx)});
  }
  return poly;
}

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError("'" + path + "' is not valid JSON: " + e.what());
  }
}

}  // namespace wbavg

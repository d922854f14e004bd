#pragma once

// Convergence experiments on a real signal with known equilibrium value:
// plain running averages B_N and weighted averages W_N for several (p,q),
// their errors, the stretched-exponential linearisation log10 E vs N^zeta,
// and the ordering check across weights.

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "json.hpp"
#include "models.hpp"
#include "numerics.hpp"
#include "regression.hpp"
#include "weights.hpp"

namespace wbavg {

struct Window {
  long lo = 0;
  long hi = 0;

  bool contains(long n) const { return lo <= n && n <= hi; }
  friend bool operator==(const Window&, const Window&) = default;
};

struct ExperimentConfig {
  std::vector<WeightParams> pairs{{0.5, 0.5}, {1, 1}, {2, 2}, {4, 4}};
  long n_min = 2;
  long n_max = 1200;
  Window running_window{40, 400};
  Window asymptotic_window{650, 1200};
  // The (4,4) errors reach ~1e-118 by N = 1200; 256 bits floors them near 1e-75.
  long mantissa_bits = 512;
  // Spacing of N outside the two windows and inside them.
  long stride = 5;
  long window_stride = 1;

  void validate() const {
    if (pairs.empty()) throw DomainError("experiment needs at least one (p,q) pair");
    for (const auto& p : pairs) p.validate();
    if (n_min < 2) throw DomainError("n_min must be at least 2");
    if (!(n_min < n_max)) throw DomainError("n_min must be below n_max");
    for (const Window& w : {running_window, asymptotic_window}) {
      if (w.lo > w.hi || w.lo < n_min || w.hi > n_max) {
        throw DomainError("window [" + std::to_string(w.lo) + "," + std::to_string(w.hi) +
                          "] must lie within [n_min, n_max]");
      }
    }
    if (stride < 1 || window_stride < 1) throw DomainError("strides must be >= 1");
    if (mantissa_bits < PrecisionContext::kMinBits) throw PrecisionError("mantissa_bits below 64");
  }

  // Ascending N values: every window_stride-th N inside a window, every
  // stride-th N (counted from n_min) elsewhere.
  std::vector<long> n_grid() const {
    std::vector<long> out;
    for (long n = n_min; n <= n_max; ++n) {
      bool take = (n - n_min) % stride == 0;
      for (const Window& w : {running_window, asymptotic_window}) {
        if (w.contains(n) && (n - w.lo) % window_stride == 0) take = true;
      }
      if (take) out.push_back(n);
    }
    return out;
  }
};

struct ErrorSeries {
  std::vector<WeightParams> pairs;
  long mantissa_bits = PrecisionContext::kDefaultBits;
  std::vector<long> N_values;
  std::vector<Real> E_unw;
  // E_pq[k][i]: pair k at N_values[i].
  std::vector<std::vector<Real>> E_pq;

  std::size_t pair_index(const WeightParams& params) const {
    auto it = std::find(pairs.begin(), pairs.end(), params);
    if (it == pairs.end()) throw DomainError("pair not present in the series");
    return static_cast<std::size_t>(it - pairs.begin());
  }
};

// E_N^unw = |B_N - a_eq| and E_N^(p,q) = |W_N - a_eq| on the configured grid.
// `samples` must hold g_0 .. g_{n_max - 1}.
inline ErrorSeries run_convergence(std::span<const Real> samples, const Real& a_eq, const ExperimentConfig& config) {
  config.validate();
  if (static_cast<long>(samples.size()) < config.n_max) {
    throw DomainError("signal has " + std::to_string(samples.size()) + " samples, need " +
                      std::to_string(config.n_max));
  }
  PrecisionContext ctx(config.mantissa_bits);
  ErrorSeries out;
  out.pairs = config.pairs;
  out.mantissa_bits = config.mantissa_bits;
  out.N_values = config.n_grid();

  // Running sums let every N reuse the samples before it.
  std::vector<Real> prefix;
  prefix.reserve(config.n_max + 1);
  prefix.push_back(ctx.zero());
  for (long n = 0; n < config.n_max; ++n) prefix.push_back(prefix.back() + samples[n]);
  for (long N : out.N_values) out.E_unw.push_back(abs(prefix[N] / N - a_eq));

  // Weights depend on n/N, so each N gets its own weight vector.
  for (const auto& params : config.pairs) {
    WeightEvaluator weight(params, ctx);
    std::vector<Real> errors;
    errors.reserve(out.N_values.size());
    Real num(ctx.bits()), den(ctx.bits()), tmp(ctx.bits());
    for (long N : out.N_values) {
      auto w = discrete_weights(weight, N, ctx);
      mpfr_set_zero(num.raw(), 1);
      mpfr_set_zero(den.raw(), 1);
      for (long n = 1; n < N; ++n) {
        mpfr_mul(tmp.raw(), w[n].raw(), samples[n].raw(), MPFR_RNDN);
        mpfr_add(num.raw(), num.raw(), tmp.raw(), MPFR_RNDN);
        mpfr_add(den.raw(), den.raw(), w[n].raw(), MPFR_RNDN);
      }
      errors.push_back(abs(num / den - a_eq));
    }
    out.E_pq.push_back(std::move(errors));
  }
  return out;
}

// The three-spin signal y_n with equilibrium value 0.
inline ErrorSeries run_three_spin(const ExperimentConfig& config) {
  config.validate();
  PrecisionContext ctx(config.mantissa_bits);
  std::vector<Real> y;
  y.reserve(config.n_max);
  for (long n = 0; n < config.n_max; ++n) y.push_back(explicit_signal(n, ctx));
  return run_convergence(y, ctx.zero(), config);
}

struct FitResult {
  Real slope;
  Real intercept;
  Real r_squared;
  Window window;
  Real exponent_used;
  long points_used = 0;
  // Points under the precision floor, left out of the fit.
  long points_excluded = 0;
};

// Errors below 10^(-bits/4) are treated as limited by the working precision.
inline Real precision_floor(long mantissa_bits) {
  Real f(1L, mantissa_bits);
  Real ten(10L, mantissa_bits);
  return pow(ten, Real(-0.25 * static_cast<double>(mantissa_bits), mantissa_bits)) * f;
}

// Ordinary least squares of log10 E against N^zeta over the window.
inline FitResult fit_stretched(const ErrorSeries& series, const WeightParams& pair, const Window& window) {
  const std::size_t k = series.pair_index(pair);
  PrecisionContext ctx(series.mantissa_bits);
  Real zeta = zeta_exponent(pair, ctx);
  const Real floor = precision_floor(series.mantissa_bits);
  std::vector<Real> xs, ys;
  long in_window = 0, excluded = 0;
  for (std::size_t i = 0; i < series.N_values.size(); ++i) {
    const long N = series.N_values[i];
    if (!window.contains(N)) continue;
    ++in_window;
    const Real& e = series.E_pq[k][i];
    if (e.is_zero()) {
      throw PrecisionLimited("error underflowed to zero at N = " + std::to_string(N) +
                             "; raise mantissa_bits");
    }
    if (e < floor) {
      ++excluded;
      continue;
    }
    xs.push_back(pow(ctx.real(N), zeta));
    ys.push_back(log10(e));
  }
  if (in_window < 10) {
    throw DomainError("fit window [" + std::to_string(window.lo) + "," + std::to_string(window.hi) +
                      "] holds " + std::to_string(in_window) + " points; need at least 10");
  }
  if (xs.size() < 10) {
    throw PrecisionLimited("only " + std::to_string(xs.size()) +
                           " errors above the precision floor in the window; raise mantissa_bits");
  }
  LineFit fit = fit_line(xs, ys);
  return FitResult{std::move(fit.slope), std::move(fit.intercept), std::move(fit.r_squared), window,
                   std::move(zeta), static_cast<long>(xs.size()), excluded};
}

// Fraction of N in the window where the errors are strictly ordered by
// decreasing min(p,q), all below the unweighted error.
inline double check_ordering(const ErrorSeries& series, const Window& window) {
  std::vector<std::size_t> chain(series.pairs.size());
  for (std::size_t k = 0; k < chain.size(); ++k) chain[k] = k;
  std::stable_sort(chain.begin(), chain.end(), [&](std::size_t a, std::size_t b) {
    return std::min(series.pairs[a].p, series.pairs[a].q) > std::min(series.pairs[b].p, series.pairs[b].q);
  });
  long total = 0, ordered = 0;
  for (std::size_t i = 0; i < series.N_values.size(); ++i) {
    if (!window.contains(series.N_values[i])) continue;
    ++total;
    bool ok = true;
    for (std::size_t c = 0; c < chain.size() && ok; ++c) {
      const Real& here = series.E_pq[chain[c]][i];
      const Real& next = c + 1 < chain.size() ? series.E_pq[chain[c + 1]][i] : series.E_unw[i];
      ok = here < next;
    }
    if (ok) ++ordered;
  }
  if (total == 0) throw DomainError("ordering window contains no N values");
  return static_cast<double>(ordered) / static_cast<double>(total);
}

// ---- output ----------------------------------------------------------------

inline constexpr int kOutputDigits = 40;

inline std::string format_parameter(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string column_name(const WeightParams& p) {
  return "E_p" + format_parameter(p.p) + "_q" + format_parameter(p.q);
}

inline void write_csv(const ErrorSeries& series, std::ostream& os) {
  os << "N,E_unw";
  for (const auto& p : series.pairs) os << ',' << column_name(p);
  os << '\n';
  for (std::size_t i = 0; i < series.N_values.size(); ++i) {
    os << series.N_values[i] << ',' << series.E_unw[i].to_string(kOutputDigits);
    for (const auto& col : series.E_pq) os << ',' << col[i].to_string(kOutputDigits);
    os << '\n';
  }
}

inline nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : c.pairs) pairs.push_back({p.p, p.q});
  return {{"pairs", pairs},
          {"n_min", c.n_min},
          {"n_max", c.n_max},
          {"running_window", {c.running_window.lo, c.running_window.hi}},
          {"asymptotic_window", {c.asymptotic_window.lo, c.asymptotic_window.hi}},
          {"mantissa_bits", c.mantissa_bits},
          {"stride", c.stride},
          {"window_stride", c.window_stride}};
}

// Missing keys keep their defaults.
inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  try {
    if (j.contains("pairs")) {
      c.pairs.clear();
      for (const auto& p : j.at("pairs")) c.pairs.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    }
    auto window = [&](const char* key, Window& w) {
      if (j.contains(key)) w = Window{j.at(key).at(0).get<long>(), j.at(key).at(1).get<long>()};
    };
    if (j.contains("n_min")) c.n_min = j.at("n_min").get<long>();
    if (j.contains("n_max")) c.n_max = j.at("n_max").get<long>();
    window("running_window", c.running_window);
    window("asymptotic_window", c.asymptotic_window);
    if (j.contains("mantissa_bits")) c.mantissa_bits = j.at("mantissa_bits").get<long>();
    if (j.contains("stride")) c.stride = j.at("stride").get<long>();
    if (j.contains("window_stride")) c.window_stride = j.at("window_stride").get<long>();
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("bad experiment config: ") + e.what());
  }
  c.validate();
  return c;
}

inline nlohmann::json series_to_json(const ErrorSeries& series, const ExperimentConfig& config) {
  nlohmann::json j;
  j["config"] = config_to_json(config);
  nlohmann::json columns = {"N", "E_unw"};
  for (const auto& p : series.pairs) columns.push_back(column_name(p));
  j["columns"] = columns;
  j["N"] = series.N_values;
  auto strings = [](const std::vector<Real>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& x : v) a.push_back(x.to_string(kOutputDigits));
    return a;
  };
  j["E_unw"] = strings(series.E_unw);
  for (std::size_t k = 0; k < series.pairs.size(); ++k) j[column_name(series.pairs[k])] = strings(series.E_pq[k]);
  return j;
}

inline nlohmann::json fit_to_json(const WeightParams& pair, const FitResult& fit) {
  return {{"pair", {pair.p, pair.q}},
          {"slope", fit.slope.to_string(kOutputDigits)},
          {"intercept", fit.intercept.to_string(kOutputDigits)},
          {"r_squared", fit.r_squared.to_string(kOutputDigits)},
          {"window", {fit.window.lo, fit.window.hi}},
          {"exponent_used", fit.exponent_used.to_string(kOutputDigits)},
          {"points_used", fit.points_used},
          {"points_excluded", fit.points_excluded}};
}

inline void write_fits_csv(const std::vector<std::pair<WeightParams, FitResult>>& fits, std::ostream& os) {
  os << "p,q,slope,intercept,r_squared,window_lo,window_hi,zeta,points_used,points_excluded\n";
  for (const auto& [pair, fit] : fits) {
    os << format_parameter(pair.p) << ',' << format_parameter(pair.q) << ',' << fit.slope.to_string(kOutputDigits)
       << ',' << fit.intercept.to_string(kOutputDigits) << ',' << fit.r_squared.to_string(kOutputDigits) << ','
       << fit.window.lo << ',' << fit.window.hi << ',' << fit.exponent_used.to_string(kOutputDigits) << ','
       << fit.points_used << ',' << fit.points_excluded << '\n';
  }
}

enum class OutputFormat { kCsv, kJson };

inline void emit(const ErrorSeries& series, const ExperimentConfig& config, const std::string& path,
                 OutputFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  if (format == OutputFormat::kCsv) {
    write_csv(series, out);
  } else {
    out << series_to_json(series, config).dump(2) << '\n';
  }
  if (!out) throw IoError("write to '" + path + "' failed");
}

namespace detail {

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

inline WeightParams parse_column_name(const std::string& name) {
  // E_p<p>_q<q>
  auto qpos = name.rfind("_q");
  if (name.rfind("E_p", 0) != 0 || qpos == std::string::npos) throw IoError("unexpected CSV column '" + name + "'");
  try {
    return WeightParams{std::stod(name.substr(3, qpos - 3)), std::stod(name.substr(qpos + 2))};
  } catch (const std::exception&) {
    throw IoError("unexpected CSV column '" + name + "'");
  }
}

}  // namespace detail

// Reads back a CSV written by write_csv; values are parsed at `bits`.
inline ErrorSeries read_csv(std::istream& is, long bits) {
  ErrorSeries s;
  s.mantissa_bits = bits;
  std::string line;
  if (!std::getline(is, line)) throw IoError("empty CSV");
  auto header = detail::split(line, ',');
  if (header.size() < 2 || header[0] != "N" || header[1] != "E_unw") throw IoError("CSV header must start N,E_unw");
  for (std::size_t c = 2; c < header.size(); ++c) s.pairs.push_back(detail::parse_column_name(header[c]));
  s.E_pq.resize(s.pairs.size());
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto cells = detail::split(line, ',');
    if (cells.size() != header.size()) throw IoError("CSV row has " + std::to_string(cells.size()) + " cells");
    s.N_values.push_back(std::stol(cells[0]));
    s.E_unw.push_back(Real::parse(cells[1], bits));
    for (std::size_t k = 0; k < s.pairs.size(); ++k) s.E_pq[k].push_back(Real::parse(cells[k + 2], bits));
  }
  return s;
}

}  // namespace wbavg

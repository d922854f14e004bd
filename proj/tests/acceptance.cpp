// One PASS/FAIL line per acceptance criterion; exit status 1 if any fail.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "wbavg/wbavg.hpp"

using namespace wbavg;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& title, const std::function<Outcome()>& body) {
  auto start = std::chrono::steady_clock::now();
  Outcome r;
  try {
    r = body();
  } catch (const std::exception& e) {
    r = {false, std::string("exception: ") + e.what()};
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!r.pass) ++failures;
  char t[32];
  std::snprintf(t, sizeof t, "%.1fs", secs);
  std::cout << "criterion " << id << ": " << (r.pass ? "PASS" : "FAIL") << "  " << title << "  [" << r.detail << "; "
            << t << "]" << std::endl;
}

Real pow10(long e, long bits) { return pow(Real(10L, bits), Real(e, bits)); }

std::string csv_of(const ErrorSeries& s) {
  std::ostringstream os;
  write_csv(s, os);
  return os.str();
}

}  // namespace

int main() {
  const ExperimentConfig defaults;
  ErrorSeries series;

  criterion(1, "matrix path equals closed form for n = 0..2000 within 1e-60", [] {
    PrecisionContext ctx(256);
    auto m = build_three_spin(ctx);
    auto d = eigendecompose(m.hamiltonian, ctx);
    auto rho = pure_density(m.initial_state, ctx);
    std::vector<Real> times;
    for (long n = 0; n <= 2000; ++n) times.push_back(ctx.real(n));
    auto values = expectation_series(d, rho, m.observable, times, ctx);
    Real worst = ctx.zero();
    for (long n = 0; n <= 2000; ++n) worst = max(worst, abs(values[n] - explicit_signal(n, ctx)));
    return Outcome{worst <= pow10(-60, 256), "max deviation " + worst.to_string(4)};
  });

  criterion(2, "rho_diag = I/8 and Tr(rho_diag A) = 0 within 1e-60", [] {
    PrecisionContext ctx(256);
    auto [rho_diag, a_eq] = model_equilibrium(build_three_spin(ctx), ctx);
    Real worst = (rho_diag.matrix - ComplexMatrix::identity(8, 256) * (ctx.real(1L) / 8L)).max_abs();
    Real tol = pow10(-60, 256);
    return Outcome{worst <= tol && abs(a_eq) <= tol,
                   "max entry deviation " + worst.to_string(4) + ", |A_eq| " + abs(a_eq).to_string(4)};
  });

  criterion(3, "strict error ordering on >= 90% of N in [650,1200]", [&] {
    series = run_three_spin(defaults);
    double frac = check_ordering(series, defaults.asymptotic_window);
    return Outcome{frac >= 0.9, "fraction " + std::to_string(frac) + " at " +
                                    std::to_string(defaults.mantissa_bits) + " bits"};
  });

  criterion(4, "stretched-exponential fit: slope < 0 and r^2 >= 0.95 for every pair", [&] {
    bool ok = true;
    std::string detail;
    for (const auto& p : defaults.pairs) {
      FitResult f = fit_stretched(series, p, defaults.asymptotic_window);
      bool good = f.slope < 0.0 && f.r_squared >= 0.95;
      ok = ok && good;
      detail += (detail.empty() ? "" : ", ") + column_name(p) + " slope " + f.slope.to_string(4) + " r^2 " +
                f.r_squared.to_string(4) + (good ? "" : " (fails)");
    }
    return Outcome{ok, detail};
  });

  criterion(5, "direct and Poisson K_N agree to 20 significant digits", [] {
    // K_N(1/2) reaches 1e-59 at N = 512, so 20 digits need about 80 digits of headroom.
    constexpr long bits = 320;
    PrecisionContext ctx(bits);
    Real pi(ctx.pi(), bits);
    std::vector<Real> nus{ctx.real(1L) / 10L, ctx.real(1L) / 2L, 1L / pi, sqrt(ctx.real(2L)) / pi};
    Real worst = ctx.zero();
    int cases = 0;
    for (WeightParams pq : {WeightParams{1, 1}, WeightParams{2, 2}}) {
      auto w = normalize(pq, ctx);
      auto env = fit_fourier_envelope(w);
      for (long N : {16L, 64L, 256L, 512L})
        for (const Real& nu : nus) {
          Complex direct = kernel_KN(w, nu, N);
          Complex poisson = kernel_KN_poisson(w, nu, N, env).value;
          worst = max(worst, abs(direct - poisson) / abs(direct));
          ++cases;
        }
    }
    return Outcome{worst <= pow10(-20, bits),
                   std::to_string(cases) + " cases at " + std::to_string(bits) + " bits, worst relative difference " + worst.to_string(4)};
  });

  criterion(6, "gap strictly decreasing over T = 1e2, 1e3, 1e4 for five random 6x6 systems", [] {
    PrecisionContext ctx(256);
    auto w = normalize({1, 1}, ctx);
    bool ok = true;
    std::string detail;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      auto sys = random_degenerate_system(seed, ctx);
      auto d = eigendecompose(sys.hamiltonian, ctx);
      Real a_eq = expectation(diagonal_state(d, sys.rho0, ctx), sys.observable, ctx);
      std::vector<Real> gaps;
      for (long T : {100L, 1000L, 10000L})
        gaps.push_back(abs(weighted_time_average(d, sys.rho0, sys.observable, w, ctx.real(T), ctx) - a_eq));
      bool dec = gaps[1] < gaps[0] && gaps[2] < gaps[1];
      ok = ok && dec && d.clusters.size() == 5;
      detail += (seed > 1 ? ", " : "") + std::string("seed ") + std::to_string(seed) + " " + gaps[0].to_string(3) +
                " > " + gaps[1].to_string(3) + " > " + gaps[2].to_string(3);
    }
    return Outcome{ok, detail};
  });

  criterion(7, "unit mass within 1e-60 and reflection symmetry on 1000 points", [&] {
    PrecisionContext ctx(256);
    bool ok = true;
    std::string detail;
    for (const auto& pq : defaults.pairs) {
      auto w = normalize(pq, ctx);
      auto reflected = normalize({pq.q, pq.p}, ctx);
      // Trapezoid with vanishing endpoints; its error is the Fourier tail at 2 pi M.
      const long M = std::min(pq.p, pq.q) < 1 ? 100001 : 3001;
      Real sum = ctx.zero();
      for (long i = 1; i < M; ++i) sum += w(ctx.real(i) / M);
      Real mass_err = abs(sum / M - 1L);
      Real sym_err = ctx.zero();
      for (long i = 0; i < 1000; ++i) {
        Real x = (ctx.real(i) + ctx.real(1L) / 2L) / 1000L;
        sym_err = max(sym_err, abs(w(x) - reflected(1L - x)));
      }
      bool good = mass_err <= pow10(-60, 256) && sym_err <= pow10(-60, 256);
      ok = ok && good;
      detail += (detail.empty() ? "" : ", ") + column_name(pq) + " mass " + mass_err.to_string(3) + " sym " +
                sym_err.to_string(3);
    }
    return Outcome{ok, detail};
  });

  criterion(8, "Fourier envelope of (1,1): negative slope and r^2 >= 0.9", [] {
    PrecisionContext ctx(256);
    auto env = fit_fourier_envelope(normalize({1, 1}, ctx));
    return Outcome{env.c > 0.0 && env.r_squared >= 0.9,
                   "slope " + (-env.c).to_string(6) + " r^2 " + env.r_squared.to_string(6)};
  });

  criterion(9, "repeated default runs give byte-identical CSV", [&] {
    std::string first = csv_of(series.N_values.empty() ? run_three_spin(defaults) : series);
    std::string second = csv_of(run_three_spin(defaults));
    return Outcome{first == second && !first.empty(), std::to_string(first.size()) + " bytes each"};
  });

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}

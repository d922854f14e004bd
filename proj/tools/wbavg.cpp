// wbavg: weighted Birkhoff averages from the command line.
//
// Exit codes: 0 ok, 1 numerical failure, 2 usage or input error,
// 3 dimension mismatch, 4 non-Hermitian input, 5 bad trace or norm.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wbavg/wbavg.hpp"

using namespace wbavg;

namespace {

constexpr int kDigits = 40;

enum ExitCode { kOk = 0, kNumerical = 1, kUsage = 2, kDimension = 3, kHermitian = 4, kTrace = 5 };

std::string fmt(const Real& x) { return x.to_string(kDigits); }

std::string fmt(const Complex& z) {
  if (z.imag().is_zero()) return fmt(z.real());
  return fmt(z.real()) + (z.imag().sign() < 0 ? " - " : " + ") + fmt(abs(z.imag())) + "i";
}

long resolve_bits(const std::optional<long>& flag, long fallback) {
  if (flag) return *flag;
  return default_bits_from_env(fallback);
}

WeightParams parse_pair(const std::string& text) {
  auto comma = text.find(',');
  if (comma == std::string::npos) throw DomainError("pair '" + text + "' must look like p,q");
  try {
    std::size_t used = 0;
    WeightParams w{std::stod(text.substr(0, comma), &used), 0};
    if (used != comma) throw std::invalid_argument(text);
    std::string rest = text.substr(comma + 1);
    w.q = std::stod(rest, &used);
    if (used != rest.size()) throw std::invalid_argument(text);
    w.validate();
    return w;
  } catch (const std::logic_error&) {
    throw DomainError("pair '" + text + "' must look like p,q");
  }
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

struct Common {
  std::optional<long> bits;
  double p = 1;
  double q = 1;
};

void add_weight_flags(CLI::App* cmd, Common& c) {
  cmd->add_option("--p", c.p, "left exponent p > 0")->capture_default_str();
  cmd->add_option("--q", c.q, "right exponent q > 0")->capture_default_str();
  cmd->add_option("--bits", c.bits, "mantissa bits (default $WBAVG_BITS or 256)");
}

int cmd_weight(const Common& c, const std::string& x_text) {
  PrecisionContext ctx(resolve_bits(c.bits, PrecisionContext::kDefaultBits));
  WeightParams params{c.p, c.q};
  auto w = normalize(params, ctx);
  std::cout << fmt(w(parse_expression(x_text, ctx))) << '\n';
  return kOk;
}

int cmd_kernel(const Common& c, const std::string& nu_text, long N, std::optional<long> terms) {
  PrecisionContext ctx(resolve_bits(c.bits, PrecisionContext::kDefaultBits));
  auto w = normalize({c.p, c.q}, ctx);
  Real nu = parse_expression(nu_text, ctx);
  Complex direct = kernel_KN(w, nu, N);
  auto env = fit_fourier_envelope(w);
  auto poisson = terms ? kernel_KN_poisson(w, nu, N, *terms, env) : kernel_KN_poisson(w, nu, N, env);
  std::cout << "direct  " << fmt(direct) << '\n';
  std::cout << "poisson " << fmt(poisson.value) << '\n';
  std::cout << "terms   " << poisson.m_terms << '\n';
  std::cout << "tail    " << poisson.tail_bound.to_string(6) << '\n';
  return kOk;
}

int cmd_fourier(const Common& c, const std::vector<std::string>& xis) {
  PrecisionContext ctx(resolve_bits(c.bits, PrecisionContext::kDefaultBits));
  auto w = normalize({c.p, c.q}, ctx);
  std::vector<std::string> grid = xis;
  if (grid.empty())
    for (double xi : default_fourier_grid()) grid.push_back(format_parameter(xi));
  for (const auto& text : grid) {
    Real xi = parse_expression(text, ctx);
    std::cout << text << ' ' << fmt(weight_fourier(w, xi)) << '\n';
  }
  return kOk;
}

struct ThreeSpinFlags {
  std::optional<long> bits;
  std::optional<long> n_min, n_max, stride, window_stride;
  std::vector<std::string> pairs;
  std::string out;
  std::string format = "csv";
  std::string config;
  std::string fits_out;
};

int cmd_three_spin(const ThreeSpinFlags& f) {
  ExperimentConfig config;
  if (!f.config.empty()) config = config_from_json(read_json_file(f.config));
  if (f.bits) {
    config.mantissa_bits = *f.bits;
  } else if (f.config.empty() && std::getenv(kPrecisionEnvVar)) {
    config.mantissa_bits = default_bits_from_env(config.mantissa_bits);
  }
  if (f.n_min) config.n_min = *f.n_min;
  if (f.n_max) {
    config.n_max = *f.n_max;
    // Shrink the windows to fit a shorter run.
    for (Window* w : {&config.running_window, &config.asymptotic_window}) {
      w->hi = std::min(w->hi, config.n_max);
      w->lo = std::min(w->lo, w->hi);
    }
  }
  if (f.stride) config.stride = *f.stride;
  if (f.window_stride) config.window_stride = *f.window_stride;
  if (!f.pairs.empty()) {
    config.pairs.clear();
    for (const auto& p : f.pairs) config.pairs.push_back(parse_pair(p));
  }
  if (f.format != "csv" && f.format != "json") throw DomainError("--format must be csv or json");
  config.validate();

  ErrorSeries series = run_three_spin(config);
  const OutputFormat format = f.format == "csv" ? OutputFormat::kCsv : OutputFormat::kJson;
  if (f.out.empty()) {
    if (format == OutputFormat::kCsv) write_csv(series, std::cout);
    else std::cout << series_to_json(series, config).dump(2) << '\n';
    return kOk;
  }
  emit(series, config, f.out, format);

  const Window& win = config.asymptotic_window;
  std::cout << "wrote " << f.out << " (" << series.N_values.size() << " rows, " << config.mantissa_bits
            << " bits)\n";
  std::cout << "ordering fraction over [" << win.lo << "," << win.hi << "]: " << check_ordering(series, win) << '\n';
  std::vector<std::pair<WeightParams, FitResult>> fits;
  for (const auto& p : config.pairs) {
    std::optional<FitResult> maybe;
    try {
      maybe = fit_stretched(series, p, win);
    } catch (const PrecisionLimited&) {
      throw;
    } catch (const DomainError& e) {
      std::cout << "fit (" << format_parameter(p.p) << "," << format_parameter(p.q) << "): skipped, " << e.what()
                << '\n';
      continue;
    }
    FitResult& fit = *maybe;
    std::cout << "fit (" << format_parameter(p.p) << "," << format_parameter(p.q)
              << "): zeta = " << fit.exponent_used.to_string(6) << "  slope = " << fit.slope.to_string(12)
              << "  intercept = " << fit.intercept.to_string(12) << "  r^2 = " << fit.r_squared.to_string(6)
              << "  points = " << fit.points_used << " (+" << fit.points_excluded << " floored)\n";
    fits.emplace_back(p, std::move(fit));
  }
  if (!f.fits_out.empty()) {
    std::ofstream out(f.fits_out);
    if (!out) throw IoError("cannot open '" + f.fits_out + "' for writing");
    write_fits_csv(fits, out);
  }
  return kOk;
}

struct DephaseFlags {
  Common common;
  std::string hamiltonian, rho0, observable;
  std::vector<std::string> T{"100", "1000", "10000"};
};

int cmd_dephase(const DephaseFlags& f) {
  PrecisionContext ctx(resolve_bits(f.common.bits, PrecisionContext::kDefaultBits));
  HermitianMatrix h(matrix_from_json(read_json_file(f.hamiltonian), ctx), ctx);
  DensityOperator rho0 = state_from_json(read_json_file(f.rho0), ctx);
  Observable a = make_observable(matrix_from_json(read_json_file(f.observable), ctx), ctx);
  if (rho0.dim() != h.dim() || a.dim() != h.dim()) {
    throw DimensionMismatch("dimensions differ: Hamiltonian " + std::to_string(h.dim()) + ", state " +
                            std::to_string(rho0.dim()) + ", observable " + std::to_string(a.dim()));
  }
  auto w = normalize({f.common.p, f.common.q}, ctx);
  auto d = eigendecompose(h, ctx);
  DensityOperator rho_diag = diagonal_state(d, rho0, ctx);
  Real a_eq = expectation(rho_diag, a, ctx);
  std::cout << "clusters " << d.clusters.size() << " of dimension " << d.dim() << '\n';
  std::cout << "Tr(rho_diag A) = " << fmt(a_eq) << '\n';
  for (const auto& text : f.T) {
    Real T = parse_expression(text, ctx);
    DensityOperator avg = weighted_averaged_state(d, rho0, w, T, ctx);
    Real value = expectation(avg, a, ctx);
    Real distance = (avg.matrix - rho_diag.matrix).max_abs();
    std::cout << "T = " << text << "  W_T[<A>] = " << fmt(value) << "  gap = " << fmt(abs(value - a_eq))
              << "  max|rho_T - rho_diag| = " << distance.to_string(12) << '\n';
  }
  return kOk;
}

void write_system(const std::filesystem::path& dir, const ComplexMatrix& h, const ComplexMatrix& rho,
                  const ComplexMatrix& a, int digits) {
  std::filesystem::create_directories(dir);
  write_json_file(dir / "hamiltonian.json", matrix_to_json(h, digits));
  write_json_file(dir / "rho0.json", matrix_to_json(rho, digits));
  write_json_file(dir / "observable.json", matrix_to_json(a, digits));
  std::cout << "wrote hamiltonian.json, rho0.json, observable.json to " << dir.string() << '\n';
}

int cmd_export_model(std::optional<long> bits, const std::string& dir) {
  PrecisionContext ctx(resolve_bits(bits, PrecisionContext::kDefaultBits));
  SpinModel m = build_three_spin(ctx);
  write_system(dir, m.hamiltonian.matrix(), pure_density(m.initial_state, ctx).matrix, m.observable.matrix,
               digits_for_bits(ctx.bits()));
  return kOk;
}

int cmd_random_system(std::optional<long> bits, std::uint64_t seed, std::size_t dim, const std::string& dir) {
  PrecisionContext ctx(resolve_bits(bits, PrecisionContext::kDefaultBits));
  RandomSystem s = random_degenerate_system(seed, ctx, dim);
  write_system(dir, s.hamiltonian.matrix(), s.rho0.matrix, s.observable.matrix, digits_for_bits(ctx.bits()));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted Birkhoff averages and dephasing in arbitrary precision"};
  app.require_subcommand(1);

  Common weight_flags;
  std::string x_text;
  auto* weight = app.add_subcommand("weight", "evaluate the normalized weight w_{p,q}(x)");
  add_weight_flags(weight, weight_flags);
  weight->add_option("--x", x_text, "point (number or expression)")->required();

  Common kernel_flags;
  std::string nu_text;
  long kernel_n = 64;
  std::optional<long> kernel_terms;
  auto* kernel = app.add_subcommand("kernel", "discrete kernel K_N(nu) by direct and Poisson summation");
  add_weight_flags(kernel, kernel_flags);
  kernel->add_option("--nu", nu_text, "frequency (number or expression)")->required();
  kernel->add_option("--N", kernel_n, "number of samples")->capture_default_str()->check(CLI::Range(2L, 1L << 30));
  kernel->add_option("--terms", kernel_terms, "Poisson terms on each side (default: from the envelope)")
      ->check(CLI::PositiveNumber);

  Common fourier_flags;
  std::vector<std::string> xis;
  auto* fourier = app.add_subcommand("fourier", "Fourier transform of the weight");
  add_weight_flags(fourier, fourier_flags);
  fourier->add_option("--xi,--grid", xis, "frequencies (default 10 20 50 100 200 500 1000)");

  ThreeSpinFlags ts;
  auto* three = app.add_subcommand("three-spin", "convergence experiment on the three-spin signal");
  three->add_option("--n-min", ts.n_min, "smallest N (default 2)");
  three->add_option("--n-max", ts.n_max, "largest N (default 1200)");
  three->add_option("--pairs", ts.pairs, "weight pairs as p,q (default 0.5,0.5 1,1 2,2 4,4)");
  three->add_option("--bits", ts.bits, "mantissa bits (default 512)");
  three->add_option("--stride", ts.stride, "N spacing outside the windows (default 5)");
  three->add_option("--window-stride", ts.window_stride, "N spacing inside the windows (default 1)");
  three->add_option("--out", ts.out, "output file (default: stdout)");
  three->add_option("--format", ts.format, "csv or json")->capture_default_str();
  three->add_option("--config", ts.config, "JSON experiment config");
  three->add_option("--fits-out", ts.fits_out, "CSV file for the asymptotic-window fits");

  DephaseFlags dp;
  auto* dephase = app.add_subcommand("dephase", "weighted time averages of a Hermitian system");
  add_weight_flags(dephase, dp.common);
  dephase->add_option("--hamiltonian", dp.hamiltonian, "Hamiltonian JSON")->required();
  dephase->add_option("--rho0", dp.rho0, "initial state JSON (entries or amplitudes)")->required();
  dephase->add_option("--observable", dp.observable, "observable JSON")->required();
  dephase->add_option("--T", dp.T, "averaging horizons")->capture_default_str();

  std::optional<long> export_bits;
  std::string export_dir = ".";
  auto* exporter = app.add_subcommand("export-model", "write the three-spin model as JSON inputs");
  exporter->add_option("--bits", export_bits, "mantissa bits");
  exporter->add_option("--dir", export_dir, "output directory")->capture_default_str();

  std::optional<long> random_bits;
  std::uint64_t seed = 1;
  std::size_t random_dim = 6;
  std::string random_dir = ".";
  auto* random = app.add_subcommand("random-system", "write a seeded random system with a doubled level");
  random->add_option("--bits", random_bits, "mantissa bits");
  random->add_option("--seed", seed, "random seed")->capture_default_str();
  random->add_option("--dim", random_dim, "dimension")->capture_default_str()->check(CLI::Range(2, 64));
  random->add_option("--dir", random_dir, "output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*weight) return cmd_weight(weight_flags, x_text);
    if (*kernel) return cmd_kernel(kernel_flags, nu_text, kernel_n, kernel_terms);
    if (*fourier) return cmd_fourier(fourier_flags, xis);
    if (*three) return cmd_three_spin(ts);
    if (*dephase) return cmd_dephase(dp);
    if (*exporter) return cmd_export_model(export_bits, export_dir);
    if (*random) return cmd_random_system(random_bits, seed, random_dim, random_dir);
  } catch (const DimensionMismatch& e) {
    std::cerr << "dimension mismatch: " << e.what() << '\n';
    return kDimension;
  } catch (const NotHermitian& e) {
    std::cerr << "not Hermitian: " << e.what() << '\n';
    return kHermitian;
  } catch (const TraceError& e) {
    std::cerr << "trace error: " << e.what() << '\n';
    return kTrace;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  }
  return kUsage;
}

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "rabispec/analytic.hpp"
#include "rabispec/errors.hpp"
#include "rabispec/fit.hpp"
#include "rabispec/io.hpp"
#include "rabispec/model.hpp"
#include "rabispec/regimes.hpp"
#include "rabispec/response.hpp"
#include "rabispec/verify.hpp"
#include "rabispec/version.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_verify_failed = 1;
constexpr int exit_usage = 2;
constexpr int exit_convergence = 3;
constexpr int exit_near_boundary = 4;
constexpr int exit_fit_not_converged = 5;

using Clock = std::chrono::steady_clock;
using Params = std::vector<std::pair<std::string, std::string>>;

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return std::string(buf);
}

double elapsed_seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void emit_artifact(const std::string& path, const std::string& contents,
                   const std::string& command, const Params& params,
                   Clock::time_point start) {
  rabispec::io::write_file(path, contents);
  rabispec::io::RunManifest manifest;
  manifest.command = command;
  manifest.parameters = params;
  manifest.version = std::string(rabispec::version);
  manifest.duration_seconds = elapsed_seconds(start);
  rabispec::io::write_file(path + ".manifest.json",
                           rabispec::io::manifest_json(manifest));
}

std::vector<std::pair<int, int>> parse_transition_list(const std::string& text) {
  std::vector<std::pair<int, int>> out;
  if (text.empty()) {
    return out;
  }
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    if (comma == std::string::npos) {
      comma = text.size();
    }
    const std::string token = text.substr(start, comma - start);
    const std::size_t colon = token.find(':');
    if (colon == std::string::npos) {
      throw std::invalid_argument("transition token '" + token +
                                  "' is not of the form i:j");
    }
    int i = 0;
    int j = 0;
    try {
      std::size_t used = 0;
      i = std::stoi(token.substr(0, colon), &used);
      if (used != colon) {
        throw std::invalid_argument(token);
      }
      const std::string rest = token.substr(colon + 1);
      j = std::stoi(rest, &used);
      if (used != rest.size()) {
        throw std::invalid_argument(token);
      }
    } catch (const std::exception&) {
      throw std::invalid_argument("transition token '" + token +
                                  "' is not of the form i:j");
    }
    if (i < 0 || j <= i) {
      throw std::invalid_argument("transition token '" + token +
                                  "' must satisfy 0 <= i < j");
    }
    out.emplace_back(i, j);
    start = comma + 1;
  }
  return out;
}

std::vector<double> linspace(double lo, double hi, int steps) {
  if (steps < 1) {
    throw std::invalid_argument("step count must be at least 1");
  }
  if (hi < lo) {
    throw std::invalid_argument("range is empty (max below min)");
  }
  if (steps == 1) {
    if (hi != lo) {
      throw std::invalid_argument("a single step requires min == max");
    }
    return {lo};
  }
  std::vector<double> out(static_cast<std::size_t>(steps));
  for (int k = 0; k < steps; ++k) {
    out[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / (steps - 1);
  }
  return out;
}

struct LevelsArgs {
  double delta = 0.0;
  double omega = 1.0;
  double g = 0.0;
  double eps_min = 0.0;
  double eps_max = 0.0;
  int eps_steps = 1;
  int levels = 6;
  std::string transitions;
  std::string out;
};

int run_levels(const LevelsArgs& args) {
  const auto start = Clock::now();
  const std::vector<std::pair<int, int>> pairs =
      parse_transition_list(args.transitions);
  if (args.levels < 1) {
    throw std::invalid_argument("--levels must be at least 1");
  }
  int checked = std::max(args.levels, 8);
  for (const auto& [i, j] : pairs) {
    checked = std::max(checked, j + 1);
  }

  rabispec::ModelParams base;
  base.delta = args.delta;
  base.omega = args.omega;
  base.g = args.g;
  base.validate();

  rabispec::TruncationConfig trunc;
  trunc.n_levels_checked = checked;

  rabispec::io::LevelTable table;
  table.epsilon = linspace(args.eps_min, args.eps_max, args.eps_steps);
  table.transitions = pairs;
  for (double eps : table.epsilon) {
    rabispec::ModelParams p = base;
    p.epsilon = eps;
    const rabispec::EigenSystem sys = rabispec::converged_eigensystem(p, trunc);
    std::vector<double> row(static_cast<std::size_t>(args.levels));
    for (int k = 0; k < args.levels; ++k) {
      row[static_cast<std::size_t>(k)] = sys.energies[k];
    }
    table.energies.push_back(std::move(row));
    std::vector<double> freqs;
    freqs.reserve(pairs.size());
    for (const auto& [i, j] : pairs) {
      freqs.push_back(rabispec::transition_frequency(sys, i, j));
    }
    table.frequencies.push_back(std::move(freqs));
  }

  const std::string csv = rabispec::io::levels_csv(table);
  const Params params = {
      {"delta", num(args.delta)},   {"omega", num(args.omega)},
      {"g", num(args.g)},           {"eps-min", num(args.eps_min)},
      {"eps-max", num(args.eps_max)}, {"eps-steps", std::to_string(args.eps_steps)},
      {"levels", std::to_string(args.levels)}, {"transitions", args.transitions},
  };
  if (args.out.empty()) {
    std::cout << csv;
  } else {
    emit_artifact(args.out, csv, "levels", params, start);
  }
  return exit_ok;
}

struct SpectrumArgs {
  double delta = 0.0;
  double omega = 1.0;
  double g = 0.0;
  double eps_min = 0.0;
  double eps_max = 0.0;
  int eps_steps = 0;
  double probe_min = 0.0;
  double probe_max = 0.0;
  int probe_steps = 0;
  bool custom_eps = false;
  bool custom_probe = false;
  double ap = 2e-3;
  double gamma = 3e-3;
  double r0 = 1.0;
  double kt = 0.5;
  int max_levels = 12;
  double pop_floor = 1e-6;
  std::string out;
  std::string json_out;
  std::string heatmap_out;
};

int run_spectrum(const SpectrumArgs& args) {
  const auto start = Clock::now();
  rabispec::ModelParams base;
  base.delta = args.delta;
  base.omega = args.omega;
  base.g = args.g;
  base.validate();

  const std::vector<double> eps_axis =
      args.custom_eps ? linspace(args.eps_min, args.eps_max, args.eps_steps)
                      : rabispec::default_epsilon_axis(args.omega);
  const std::vector<double> probe_axis =
      args.custom_probe
          ? linspace(args.probe_min, args.probe_max, args.probe_steps)
          : rabispec::default_probe_axis(args.omega);

  rabispec::ProbeConfig probe;
  probe.amplitude_ap = args.ap;
  probe.gamma = args.gamma;
  probe.r0 = args.r0;
  rabispec::ThermalConfig thermal;
  thermal.kt = args.kt;
  thermal.max_levels = args.max_levels;
  thermal.population_floor = args.pop_floor;

  const rabispec::SpectrumGrid grid =
      rabispec::transmission_grid(base, eps_axis, probe_axis, probe, thermal);

  const Params params = {
      {"delta", num(args.delta)},
      {"omega", num(args.omega)},
      {"g", num(args.g)},
      {"eps-min", num(eps_axis.front())},
      {"eps-max", num(eps_axis.back())},
      {"eps-steps", std::to_string(eps_axis.size())},
      {"probe-min", num(probe_axis.front())},
      {"probe-max", num(probe_axis.back())},
      {"probe-steps", std::to_string(probe_axis.size())},
      {"ap", num(args.ap)},
      {"gamma", num(args.gamma)},
      {"r0", num(args.r0)},
      {"kt", num(args.kt)},
      {"max-levels", std::to_string(args.max_levels)},
      {"pop-floor", num(args.pop_floor)},
  };

  const std::string csv = rabispec::io::spectrum_csv(grid);
  if (args.out.empty()) {
    std::cout << csv;
  } else {
    emit_artifact(args.out, csv, "spectrum", params, start);
  }
  if (!args.json_out.empty()) {
    emit_artifact(args.json_out, rabispec::io::spectrum_json(grid), "spectrum",
                  params, start);
  }
  if (!args.heatmap_out.empty()) {
    emit_artifact(args.heatmap_out, rabispec::io::heatmap_ppm(grid), "spectrum",
                  params, start);
  }
  return exit_ok;
}

struct ClassifyArgs {
  double delta = 0.0;
  double omega = 1.0;
  double g = 0.0;
  bool high = false;
  std::string out;
};

int run_classify(const ClassifyArgs& args) {
  const auto start = Clock::now();
  rabispec::ModelParams base;
  base.delta = args.delta;
  base.omega = args.omega;
  base.g = args.g;
  base.validate();

  const Params params = {
      {"delta", num(args.delta)},
      {"omega", num(args.omega)},
      {"g", num(args.g)},
      {"high", args.high ? "true" : "false"},
  };

  std::string payload;
  int code = exit_ok;
  if (args.high) {
    payload = rabispec::io::pattern_json(rabispec::classify_high(base));
  } else {
    const rabispec::RegimeReport report = rabispec::classify_low(base);
    payload = rabispec::io::regime_report_json(report);
    if (report.near_boundary) {
      code = exit_near_boundary;
    }
  }

  std::cout << payload;
  if (!args.out.empty()) {
    emit_artifact(args.out, payload, "classify", params, start);
  }
  return code;
}

struct BoundariesArgs {
  double delta_ratio = 0.0;
  std::string out;
};

int run_boundaries(const BoundariesArgs& args) {
  const auto start = Clock::now();
  const rabispec::BoundarySet bounds =
      rabispec::regime_boundaries(args.delta_ratio);
  const std::string payload = rabispec::io::boundary_set_json(bounds);
  std::cout << payload;
  if (!args.out.empty()) {
    emit_artifact(args.out, payload, "boundaries",
                  {{"delta-ratio", num(args.delta_ratio)}}, start);
  }
  return exit_ok;
}

struct FitArgs {
  std::string observations;
  double init_delta = 0.0;
  double init_omega = 0.0;
  double init_g = 0.0;
  double ip = 0.0;
  double flux_quantum = 0.0;
  double n_phi0 = 0.0;
  bool has_ip = false;
  bool has_flux_quantum = false;
  bool has_n_phi0 = false;
  unsigned seed = 0;
  int max_iterations = 500;
  double tolerance = 1e-6;
  std::string out;
};

int run_fit(const FitArgs& args) {
  const auto start = Clock::now();
  const std::vector<rabispec::ResonanceObservation> observations =
      rabispec::io::read_observations_file(args.observations);

  std::optional<rabispec::FluxCalibration> calibration;
  if (args.has_ip != args.has_flux_quantum) {
    throw std::invalid_argument(
        "calibration requires both --ip and --flux-quantum");
  }
  if (args.has_ip) {
    rabispec::FluxCalibration cal;
    cal.ip = args.ip;
    cal.flux_quantum = args.flux_quantum;
    if (args.has_n_phi0) {
      cal.n_phi0 = args.n_phi0;
    }
    calibration = cal;
  } else if (args.has_n_phi0) {
    throw std::invalid_argument("--nphi0 requires --ip and --flux-quantum");
  }

  rabispec::ModelParams initial;
  initial.delta = args.init_delta;
  initial.omega = args.init_omega;
  initial.g = args.init_g;
  initial.validate();

  rabispec::FitOptions options;
  options.max_iterations = args.max_iterations;
  options.relative_tolerance = args.tolerance;
  options.seed = args.seed;

  const rabispec::FitResult result =
      rabispec::fit_parameters(observations, initial, calibration, options);
  const std::string payload = rabispec::io::fit_result_json(result);

  Params params = {
      {"observations", args.observations},
      {"init-delta", num(args.init_delta)},
      {"init-omega", num(args.init_omega)},
      {"init-g", num(args.init_g)},
      {"seed", std::to_string(args.seed)},
      {"max-iterations", std::to_string(args.max_iterations)},
      {"tolerance", num(args.tolerance)},
  };
  if (calibration) {
    params.emplace_back("ip", num(args.ip));
    params.emplace_back("flux-quantum", num(args.flux_quantum));
    if (args.has_n_phi0) {
      params.emplace_back("nphi0", num(args.n_phi0));
    }
  }

  std::cout << payload;
  if (!args.out.empty()) {
    emit_artifact(args.out, payload, "fit", params, start);
  }
  return result.converged ? exit_ok : exit_fit_not_converged;
}

int run_verify() {
  const std::vector<rabispec::CheckResult> results =
      rabispec::run_verification();
  int failed = 0;
  for (const rabispec::CheckResult& r : results) {
    std::printf("%-28s %s  %s\n", r.name.c_str(),
                r.passed ? "PASS" : "FAIL", r.detail.c_str());
    failed += r.passed ? 0 : 1;
  }
  if (failed == 0) {
    std::printf("all %zu checks passed\n", results.size());
    return exit_ok;
  }
  std::printf("%d of %zu checks failed\n", failed, results.size());
  return exit_verify_failed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral toolkit for a biased two-level system coupled to an "
               "oscillator"};
  app.set_version_flag("--version", std::string(rabispec::version));
  app.require_subcommand(1);

  LevelsArgs levels;
  CLI::App* cmd_levels = app.add_subcommand(
      "levels", "Energy levels and transition frequencies over a bias sweep");
  cmd_levels->add_option("--delta", levels.delta, "Qubit gap")->required();
  cmd_levels->add_option("--omega", levels.omega, "Oscillator frequency")->capture_default_str();
  cmd_levels->add_option("--g", levels.g, "Coupling strength")->required();
  cmd_levels->add_option("--eps-min", levels.eps_min, "Bias sweep start")
      ->required();
  cmd_levels->add_option("--eps-max", levels.eps_max, "Bias sweep end")
      ->required();
  cmd_levels->add_option("--eps-steps", levels.eps_steps, "Bias sample count")
      ->required();
  cmd_levels->add_option("--levels", levels.levels, "Energy columns to emit")->capture_default_str();
  cmd_levels->add_option("--transitions", levels.transitions,
                         "Extra omega_i_j columns, e.g. 0:1,0:2");
  cmd_levels->add_option("--out", levels.out, "CSV output path");

  SpectrumArgs spectrum;
  CLI::App* cmd_spectrum = app.add_subcommand(
      "spectrum", "Thermal transmission grid over bias and probe frequency");
  cmd_spectrum->add_option("--delta", spectrum.delta, "Qubit gap")->required();
  cmd_spectrum->add_option("--omega", spectrum.omega, "Oscillator frequency")->capture_default_str();
  cmd_spectrum->add_option("--g", spectrum.g, "Coupling strength")->required();
  CLI::Option* eps_min_opt =
      cmd_spectrum->add_option("--eps-min", spectrum.eps_min, "Bias start");
  CLI::Option* eps_max_opt =
      cmd_spectrum->add_option("--eps-max", spectrum.eps_max, "Bias end");
  CLI::Option* eps_steps_opt = cmd_spectrum->add_option(
      "--eps-steps", spectrum.eps_steps, "Bias sample count");
  CLI::Option* probe_min_opt = cmd_spectrum->add_option(
      "--probe-min", spectrum.probe_min, "Probe frequency start");
  CLI::Option* probe_max_opt = cmd_spectrum->add_option(
      "--probe-max", spectrum.probe_max, "Probe frequency end");
  CLI::Option* probe_steps_opt = cmd_spectrum->add_option(
      "--probe-steps", spectrum.probe_steps, "Probe sample count");
  cmd_spectrum->add_option("--ap", spectrum.ap, "Probe amplitude")->capture_default_str();
  cmd_spectrum->add_option("--gamma", spectrum.gamma, "Decoherence rate")->capture_default_str();
  cmd_spectrum->add_option("--r0", spectrum.r0, "Peak reflection")->capture_default_str();
  cmd_spectrum->add_option("--kt", spectrum.kt, "Thermal energy k_B T")->capture_default_str();
  cmd_spectrum->add_option("--max-levels", spectrum.max_levels,
                           "Levels in the thermal sum")->capture_default_str();
  cmd_spectrum->add_option("--pop-floor", spectrum.pop_floor,
                           "Population cutoff")->capture_default_str();
  cmd_spectrum->add_option("--out", spectrum.out, "CSV output path");
  cmd_spectrum->add_option("--json", spectrum.json_out, "JSON output path");
  cmd_spectrum->add_option("--heatmap", spectrum.heatmap_out,
                           "P6 pixmap output path");

  ClassifyArgs classify;
  CLI::App* cmd_classify = app.add_subcommand(
      "classify", "Regime classification from qualitative spectral features");
  cmd_classify->add_option("--delta", classify.delta, "Qubit gap")->required();
  cmd_classify->add_option("--omega", classify.omega, "Oscillator frequency")->capture_default_str();
  cmd_classify->add_option("--g", classify.g, "Coupling strength")->required();
  cmd_classify->add_flag("--high", classify.high,
                         "Classify the upper-pair pattern instead of the "
                         "five-interval regime");
  cmd_classify->add_option("--out", classify.out, "JSON output path");

  BoundariesArgs boundaries;
  CLI::App* cmd_boundaries = app.add_subcommand(
      "boundaries", "Regime boundary couplings for a given delta/omega");
  cmd_boundaries
      ->add_option("--delta-ratio", boundaries.delta_ratio, "delta/omega")
      ->required();
  cmd_boundaries->add_option("--out", boundaries.out, "JSON output path");

  FitArgs fit;
  CLI::App* cmd_fit = app.add_subcommand(
      "fit", "Least-squares parameter estimation from resonance observations");
  cmd_fit
      ->add_option("--observations", fit.observations,
                   "CSV of bias,bias_kind,i,j,frequency,weight rows")
      ->required();
  cmd_fit->add_option("--init-delta", fit.init_delta, "Initial qubit gap")
      ->required();
  cmd_fit
      ->add_option("--init-omega", fit.init_omega,
                   "Initial oscillator frequency")
      ->required();
  cmd_fit->add_option("--init-g", fit.init_g, "Initial coupling")->required();
  CLI::Option* ip_opt =
      cmd_fit->add_option("--ip", fit.ip, "Persistent current");
  CLI::Option* fq_opt = cmd_fit->add_option("--flux-quantum", fit.flux_quantum,
                                            "Flux quantum");
  CLI::Option* nphi0_opt = cmd_fit->add_option(
      "--nphi0", fit.n_phi0, "Half-integer flux working point");
  cmd_fit->add_option("--seed", fit.seed, "Restart perturbation seed")->capture_default_str();
  cmd_fit->add_option("--max-iterations", fit.max_iterations,
                      "Simplex iteration budget")->capture_default_str();
  cmd_fit->add_option("--tolerance", fit.tolerance,
                      "Relative simplex size tolerance")->capture_default_str();
  cmd_fit->add_option("--out", fit.out, "JSON output path");

  CLI::App* cmd_verify =
      app.add_subcommand("verify", "Run the built-in invariant suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_usage;
  }

  spectrum.custom_eps = eps_min_opt->count() > 0 || eps_max_opt->count() > 0 ||
                        eps_steps_opt->count() > 0;
  if (spectrum.custom_eps &&
      (eps_min_opt->count() == 0 || eps_max_opt->count() == 0 ||
       eps_steps_opt->count() == 0)) {
    std::cerr << "spectrum: --eps-min, --eps-max, --eps-steps must be given "
                 "together\n";
    return exit_usage;
  }
  spectrum.custom_probe = probe_min_opt->count() > 0 ||
                          probe_max_opt->count() > 0 ||
                          probe_steps_opt->count() > 0;
  if (spectrum.custom_probe &&
      (probe_min_opt->count() == 0 || probe_max_opt->count() == 0 ||
       probe_steps_opt->count() == 0)) {
    std::cerr << "spectrum: --probe-min, --probe-max, --probe-steps must be "
                 "given together\n";
    return exit_usage;
  }
  fit.has_ip = ip_opt->count() > 0;
  fit.has_flux_quantum = fq_opt->count() > 0;
  fit.has_n_phi0 = nphi0_opt->count() > 0;

  try {
    if (cmd_levels->parsed()) {
      return run_levels(levels);
    }
    if (cmd_spectrum->parsed()) {
      return run_spectrum(spectrum);
    }
    if (cmd_classify->parsed()) {
      return run_classify(classify);
    }
    if (cmd_boundaries->parsed()) {
      return run_boundaries(boundaries);
    }
    if (cmd_fit->parsed()) {
      return run_fit(fit);
    }
    if (cmd_verify->parsed()) {
      return run_verify();
    }
  } catch (const rabispec::ConvergenceError& e) {
    std::cerr << "convergence failure: " << e.what() << "\n";
    return exit_convergence;
  } catch (const rabispec::BracketError& e) {
    std::cerr << "root bracketing failure: " << e.what() << "\n";
    return exit_convergence;
  } catch (const rabispec::ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid arguments: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  }
  return exit_usage;
}

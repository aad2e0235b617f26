#include "rabispec/fit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <stdexcept>
#include <tuple>

#include "rabispec/errors.hpp"

namespace rabispec {

void ResonanceObservation::validate() const {
  if (!std::isfinite(bias)) {
    throw std::invalid_argument("observation: bias must be finite");
  }
  const auto [i, j] = transition;
  if (i < 0 || j <= i || j > max_observed_level) {
    throw std::invalid_argument(
        "observation: level indices must satisfy 0 <= i < j <= 32");
  }
  if (!(frequency > 0.0) || !std::isfinite(frequency)) {
    throw std::invalid_argument("observation: frequency must be positive");
  }
  if (!(weight > 0.0) || !std::isfinite(weight)) {
    throw std::invalid_argument("observation: weight must be positive");
  }
}

void FluxCalibration::validate() const {
  if (!(ip > 0.0) || !std::isfinite(ip)) {
    throw std::invalid_argument("calibration: ip must be positive");
  }
  if (!(flux_quantum > 0.0) || !std::isfinite(flux_quantum)) {
    throw std::invalid_argument("calibration: flux_quantum must be positive");
  }
  if (n_phi0) {
    const double k = *n_phi0 - 0.5;
    if (std::abs(k - std::round(k)) > 1e-9) {
      throw std::invalid_argument("calibration: n_phi0 must be a half-integer");
    }
  }
}

double flux_to_epsilon(const FluxCalibration& cal, double n_phi) {
  cal.validate();
  if (!std::isfinite(n_phi)) {
    throw std::invalid_argument("flux_to_epsilon: n_phi must be finite");
  }
  const double center =
      cal.n_phi0 ? *cal.n_phi0 : std::round(n_phi - 0.5) + 0.5;
  return 2.0 * cal.ip * cal.flux_quantum * (n_phi - center);
}

double coupler_critical_current(double ic, double n_phi_c) {
  if (!(ic > 0.0) || !std::isfinite(ic)) {
    throw std::invalid_argument("coupler_critical_current: ic must be positive");
  }
  const double pi = std::numbers::pi;
  return 4.0 * ic * std::cos(2.0 * pi * n_phi_c) * std::cos(pi * n_phi_c);
}

namespace {

using Point = std::array<double, 3>;  // delta, omega, g

struct ObservationTerm {
  int i = 0;
  int j = 0;
  double frequency = 0.0;
  double weight = 1.0;
  std::size_t original = 0;
};

struct BiasGroup {
  double epsilon = 0.0;
  std::vector<ObservationTerm> terms;
};

constexpr double penalty_base = 1e12;

struct Objective {
  std::vector<BiasGroup> groups;
  TruncationConfig trunc;

  double operator()(const Point& x, std::vector<double>* residuals) const {
    const double delta = x[0];
    const double omega = x[1];
    const double g = x[2];
    double violation = 0.0;
    if (!std::isfinite(delta) || !std::isfinite(omega) || !std::isfinite(g)) {
      return penalty_base;
    }
    if (delta <= 0.0) {
      violation += 1.0 - delta;
    }
    if (omega <= 0.0) {
      violation += 1.0 - omega;
    }
    if (g < 0.0) {
      violation += -g;
    }
    if (violation > 0.0) {
      return penalty_base * (1.0 + violation);
    }

    double ssq = 0.0;
    for (const BiasGroup& group : groups) {
      ModelParams p;
      p.delta = delta;
      p.epsilon = group.epsilon;
      p.omega = omega;
      p.g = g;
      EigenSystem sys;
      try {
        sys = converged_eigensystem(p, trunc);
      } catch (const ConvergenceError&) {
        return penalty_base;
      }
      for (const ObservationTerm& term : group.terms) {
        const double r =
            transition_frequency(sys, term.i, term.j) - term.frequency;
        if (residuals != nullptr) {
          (*residuals)[term.original] = r;
        }
        ssq += term.weight * r * r;
      }
    }
    return ssq;
  }
};

struct SimplexOutcome {
  Point best{};
  double fbest = 0.0;
  int iterations = 0;
  bool converged = false;
};

SimplexOutcome nelder_mead(const Objective& obj, const Point& start,
                           int max_iterations, double relative_tolerance) {
  constexpr int n = 3;
  std::array<Point, n + 1> v;
  std::array<double, n + 1> f;
  v[0] = start;
  for (int k = 0; k < n; ++k) {
    v[k + 1] = start;
    if (v[k + 1][k] != 0.0) {
      v[k + 1][k] *= 1.05;
    } else {
      v[k + 1][k] = 0.00025;
    }
  }
  for (int i = 0; i <= n; ++i) {
    f[i] = obj(v[i], nullptr);
  }

  auto sort_vertices = [&] {
    std::array<int, n + 1> idx{};
    for (int i = 0; i <= n; ++i) {
      idx[i] = i;
    }
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int b) { return f[a] < f[b]; });
    const auto pv = v;
    const auto pf = f;
    for (int i = 0; i <= n; ++i) {
      v[i] = pv[idx[i]];
      f[i] = pf[idx[i]];
    }
  };

  auto shrink = [&] {
    for (int i = 1; i <= n; ++i) {
      for (int k = 0; k < n; ++k) {
        v[i][k] = v[0][k] + 0.5 * (v[i][k] - v[0][k]);
      }
      f[i] = obj(v[i], nullptr);
    }
  };

  int iter = 0;
  bool converged = false;
  while (true) {
    sort_vertices();
    double scale = 1e-12;
    for (int k = 0; k < n; ++k) {
      scale = std::max(scale, std::abs(v[0][k]));
    }
    double size = 0.0;
    for (int i = 1; i <= n; ++i) {
      for (int k = 0; k < n; ++k) {
        size = std::max(size, std::abs(v[i][k] - v[0][k]));
      }
    }
    if (size / scale < relative_tolerance) {
      converged = true;
      break;
    }
    if (iter >= max_iterations) {
      break;
    }
    ++iter;

    Point centroid{};
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < n; ++k) {
        centroid[k] += v[i][k] / n;
      }
    }
    auto along = [&](double t) {
      Point p;
      for (int k = 0; k < n; ++k) {
        p[k] = centroid[k] + t * (v[n][k] - centroid[k]);
      }
      return p;
    };

    const Point xr = along(-1.0);
    const double fr = obj(xr, nullptr);
    if (fr < f[0]) {
      const Point xe = along(-2.0);
      const double fe = obj(xe, nullptr);
      if (fe < fr) {
        v[n] = xe;
        f[n] = fe;
      } else {
        v[n] = xr;
        f[n] = fr;
      }
    } else if (fr < f[n - 1]) {
      v[n] = xr;
      f[n] = fr;
    } else if (fr < f[n]) {
      const Point xc = along(-0.5);
      const double fc = obj(xc, nullptr);
      if (fc <= fr) {
        v[n] = xc;
        f[n] = fc;
      } else {
        shrink();
      }
    } else {
      const Point xc = along(0.5);
      const double fc = obj(xc, nullptr);
      if (fc < f[n]) {
        v[n] = xc;
        f[n] = fc;
      } else {
        shrink();
      }
    }
  }

  sort_vertices();
  return SimplexOutcome{v[0], f[0], iter, converged};
}

}  // namespace

FitResult fit_parameters(const std::vector<ResonanceObservation>& observations,
                         const ModelParams& initial,
                         const std::optional<FluxCalibration>& calibration,
                         const FitOptions& options) {
  if (observations.size() < 3) {
    throw std::invalid_argument(
        "fit_parameters: at least three observations are required");
  }
  if (options.max_iterations <= 0) {
    throw std::invalid_argument(
        "fit_parameters: max_iterations must be positive");
  }
  if (!(options.relative_tolerance > 0.0)) {
    throw std::invalid_argument(
        "fit_parameters: relative_tolerance must be positive");
  }
  initial.validate();
  if (calibration) {
    calibration->validate();
  }

  int max_level = 1;
  std::map<double, std::vector<ObservationTerm>> grouped;
  for (std::size_t idx = 0; idx < observations.size(); ++idx) {
    const ResonanceObservation& obs = observations[idx];
    obs.validate();
    double eps = obs.bias;
    if (obs.kind == BiasKind::nphi) {
      if (!calibration) {
        throw std::invalid_argument(
            "fit_parameters: flux-biased observations require a calibration");
      }
      eps = flux_to_epsilon(*calibration, obs.bias);
    }
    max_level = std::max(max_level, obs.transition.second);
    grouped[eps].push_back(ObservationTerm{obs.transition.first,
                                           obs.transition.second,
                                           obs.frequency, obs.weight, idx});
  }
  if (grouped.size() < 2) {
    throw std::invalid_argument(
        "fit_parameters: observations must span at least two distinct bias "
        "values");
  }

  Objective objective;
  objective.trunc.n_levels_checked =
      std::max(objective.trunc.n_levels_checked, max_level + 1);
  objective.groups.reserve(grouped.size());
  for (auto& [eps, terms] : grouped) {
    std::sort(terms.begin(), terms.end(),
              [](const ObservationTerm& a, const ObservationTerm& b) {
                return std::tie(a.i, a.j, a.frequency, a.weight, a.original) <
                       std::tie(b.i, b.j, b.frequency, b.weight, b.original);
              });
    objective.groups.push_back(BiasGroup{eps, std::move(terms)});
  }

  const Point start{initial.delta, initial.omega, initial.g};
  const SimplexOutcome first = nelder_mead(objective, start,
                                           options.max_iterations,
                                           options.relative_tolerance);

  std::mt19937 rng(options.seed);
  Point perturbed = first.best;
  for (double& coordinate : perturbed) {
    const double u = static_cast<double>(rng()) / 4294967296.0;
    coordinate *= 1.0 + 0.02 * (2.0 * u - 1.0);
  }
  const SimplexOutcome second = nelder_mead(objective, perturbed,
                                            options.max_iterations,
                                            options.relative_tolerance);
  const SimplexOutcome& winner = second.fbest < first.fbest ? second : first;

  FitResult result;
  result.params.delta = winner.best[0];
  result.params.epsilon = 0.0;
  result.params.omega = winner.best[1];
  result.params.g = winner.best[2];
  result.iterations = first.iterations + second.iterations;
  result.converged = winner.converged;
  result.per_observation_residuals.assign(observations.size(), 0.0);
  objective(winner.best, &result.per_observation_residuals);

  double weighted_ssq = 0.0;
  double weight_sum = 0.0;
  for (std::size_t idx = 0; idx < observations.size(); ++idx) {
    const double r = result.per_observation_residuals[idx];
    weighted_ssq += observations[idx].weight * r * r;
    weight_sum += observations[idx].weight;
  }
  result.residual_rms = std::sqrt(weighted_ssq / weight_sum);
  return result;
}

}  // namespace rabispec

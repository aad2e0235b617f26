#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "rabispec/model.hpp"

namespace rabispec {

enum class BiasKind { epsilon, nphi };

/// One measured resonance frequency at one bias setting.
struct ResonanceObservation {
  double bias = 0.0;  ///< epsilon directly, or normalized flux, per kind
  BiasKind kind = BiasKind::epsilon;
  std::pair<int, int> transition{0, 1};
  double frequency = 0.0;
  double weight = 1.0;

  void validate() const;
};

/// Linear map from normalized flux to qubit bias.
struct FluxCalibration {
  double ip = 0.0;            ///< persistent current
  double flux_quantum = 0.0;  ///< in units matching ip and the frequencies
  /// Working point; must be a half-integer. Unset selects the half-integer
  /// nearest to each converted flux value.
  std::optional<double> n_phi0;

  void validate() const;
};

struct FitOptions {
  int max_iterations = 500;  ///< simplex iterations per start, shared budget
  double relative_tolerance = 1e-6;
  unsigned seed = 0;  ///< drives the single restart perturbation
};

/// Best-fit parameters and diagnostics. params.epsilon is fixed at zero; the
/// bias is an input per observation, never a fitted quantity.
struct FitResult {
  ModelParams params;
  double residual_rms = 0.0;
  std::vector<double> per_observation_residuals;  ///< model minus measured
  int iterations = 0;
  bool converged = false;
};

/// Highest level index an observation may reference.
inline constexpr int max_observed_level = 32;

/// epsilon = 2 ip flux_quantum (n_phi - n_phi0).
[[nodiscard]] double flux_to_epsilon(const FluxCalibration& cal, double n_phi);

/// Effective critical current 4 ic cos(2 pi n_phi_c) cos(pi n_phi_c).
[[nodiscard]] double coupler_critical_current(double ic, double n_phi_c);

/// Weighted least squares over (delta, omega, g) with a derivative-free
/// simplex search, restarted once from a perturbed best point.
///
/// Requires at least three observations spanning at least two distinct bias
/// values. Observations with kind nphi require a calibration. The objective
/// is accumulated in a canonical observation order, so the result is
/// invariant under reordering and under uniform weight scaling.
/// Non-convergence is reported through converged = false, not an exception.
[[nodiscard]] FitResult fit_parameters(
    const std::vector<ResonanceObservation>& observations,
    const ModelParams& initial,
    const std::optional<FluxCalibration>& calibration = std::nullopt,
    const FitOptions& options = {});

}  // namespace rabispec

#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "rabispec/model.hpp"

namespace rabispec {

/// Probe-drive settings of the phenomenological reflection model.
struct ProbeConfig {
  double amplitude_ap = 2e-3;  ///< drive amplitude A_p, frequency units
  double gamma = 3e-3;         ///< overall decoherence rate, frequency units
  double r0 = 1.0;             ///< peak reflection, in (0, 1]

  void validate() const;
};

/// Thermal-equilibrium settings for the multi-level sum.
struct ThermalConfig {
  double kt = 0.5;                ///< k_B T, same frequency unit as the model
  int max_levels = 12;            ///< levels retained in the transition sum
  double population_floor = 1e-6; ///< populations below this are skipped

  void validate() const;
};

/// Transmission T = 1 - R on an (epsilon, omega_p) lattice, stored row-major
/// with the epsilon index major.
struct SpectrumGrid {
  std::vector<double> epsilon_axis;
  std::vector<double> probe_axis;
  std::vector<double> values;

  ModelParams template_params;  ///< epsilon field is per-column, not global
  ProbeConfig probe;
  ThermalConfig thermal;
  std::size_t clamp_events = 0;  ///< lattice points where the sum exceeded 1

  [[nodiscard]] double at(std::size_t epsilon_index, std::size_t probe_index) const {
    return values[epsilon_index * probe_axis.size() + probe_index];
  }
};

/// One transition traced over bias, with the drive matrix element recorded so
/// forbidden segments can be rendered as gaps.
struct TransitionLine {
  int from_level = 0;
  int to_level = 0;
  struct Point {
    double epsilon;
    double frequency;
    double matrix_element;
  };
  std::vector<Point> points;
};

/// Boltzmann populations over the lowest thermal.max_levels levels,
/// normalized to 1. kt = 0 yields (1, 0, 0, ...).
[[nodiscard]] std::vector<double> thermal_populations(const EigenSystem& eig,
                                                      const ThermalConfig& thermal);

/// Thermal multi-transition reflection at one probe frequency:
///
///   R = r0 sum_{j>i} P_i Omega_ij^2 / (Omega_ij^2 + (omega_p - omega_ij)^2 + Gamma^2)
///
/// with Omega_ij = amplitude_ap |<j|(a+a^dag)|i>|. The sum is clamped at 1;
/// clamp_events, when supplied, counts how often that happened.
[[nodiscard]] double reflection(const EigenSystem& eig, const ProbeConfig& probe,
                                const ThermalConfig& thermal, double omega_p,
                                std::size_t* clamp_events = nullptr);

/// Default axes matching the published grids: 241 bias points on
/// [-2 omega, 2 omega] and 201 probe points on [0.8 omega, 1.2 omega].
[[nodiscard]] std::vector<double> default_epsilon_axis(double omega);
[[nodiscard]] std::vector<double> default_probe_axis(double omega);

/// T = 1 - R over the full lattice. Each epsilon column is computed from its
/// own converged eigensystem; columns are processed in parallel (worker count
/// from RABI_SPEC_THREADS, 0 or unset meaning all hardware threads) and
/// merged by index, so results are deterministic. A convergence failure is
/// rethrown with the offending epsilon named.
[[nodiscard]] SpectrumGrid transmission_grid(const ModelParams& template_params,
                                             const std::vector<double>& epsilon_axis,
                                             const std::vector<double>& probe_axis,
                                             const ProbeConfig& probe = {},
                                             const ThermalConfig& thermal = {},
                                             const TruncationConfig& trunc = {});

/// Trace omega_ij and the drive matrix element for each requested pair over
/// the bias axis.
[[nodiscard]] std::vector<TransitionLine> transition_lines(
    const ModelParams& template_params, const std::vector<double>& epsilon_axis,
    const std::vector<std::pair<int, int>>& pairs, const TruncationConfig& trunc = {});

}  // namespace rabispec

#include <cmath>
#include <cstdlib>
#include <utility>
#include <vector>

#include "doctest.h"
#include "rabispec/model.hpp"
#include "rabispec/response.hpp"

namespace {

using rabispec::EigenSystem;
using rabispec::ModelParams;
using rabispec::ProbeConfig;
using rabispec::SpectrumGrid;
using rabispec::ThermalConfig;

ModelParams make_params(double delta, double epsilon, double omega, double g) {
  ModelParams p;
  p.delta = delta;
  p.epsilon = epsilon;
  p.omega = omega;
  p.g = g;
  return p;
}

std::vector<double> linear_axis(double lo, double hi, int steps) {
  std::vector<double> axis(steps);
  for (int k = 0; k < steps; ++k) {
    axis[k] = lo + (hi - lo) * k / (steps - 1);
  }
  return axis;
}

}  // namespace

TEST_SUITE("response") {

TEST_CASE("thermal populations normalize and follow the Boltzmann ratio") {
  const EigenSystem sys =
      rabispec::converged_eigensystem(make_params(0.3, 0.2, 1.0, 0.4));
  ThermalConfig thermal;
  thermal.kt = 0.7;
  const std::vector<double> populations =
      rabispec::thermal_populations(sys, thermal);

  REQUIRE(populations.size() == 12);
  double total = 0.0;
  for (double p : populations) {
    CHECK(p >= 0.0);
    total += p;
  }
  CHECK(std::abs(total - 1.0) < 1e-12);

  for (std::size_t i = 0; i + 1 < populations.size(); ++i) {
    const double gap = sys.energies[i + 1] - sys.energies[i];
    const double expected = std::exp(-gap / thermal.kt);
    CHECK(populations[i + 1] / populations[i] ==
          doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("zero temperature concentrates the population in the ground state") {
  const EigenSystem sys =
      rabispec::converged_eigensystem(make_params(0.3, 0.0, 1.0, 0.4));
  ThermalConfig thermal;
  thermal.kt = 0.0;
  const std::vector<double> populations =
      rabispec::thermal_populations(sys, thermal);

  CHECK(populations[0] == 1.0);
  for (std::size_t k = 1; k < populations.size(); ++k) {
    CHECK(populations[k] == 0.0);
  }
}

TEST_CASE("reflection reduces to the ground-state Lorentzian sum at zero temperature") {
  const EigenSystem sys =
      rabispec::converged_eigensystem(make_params(0.4, 0.1, 1.0, 0.45));
  ProbeConfig probe;
  ThermalConfig thermal;
  thermal.kt = 0.0;

  const double omega_01 = rabispec::transition_frequency(sys, 0, 1);
  for (double omega_p : {omega_01, omega_01 + 0.01, omega_01 - 0.01, 0.97}) {
    double expected = 0.0;
    for (int j = 1; j < thermal.max_levels; ++j) {
      const double element = rabispec::drive_matrix_element(sys, 0, j);
      const double rabi = probe.amplitude_ap * element;
      if (rabi == 0.0) continue;
      const double detuning = omega_p - rabispec::transition_frequency(sys, 0, j);
      expected += probe.r0 * rabi * rabi /
                  (rabi * rabi + detuning * detuning + probe.gamma * probe.gamma);
    }
    CHECK(rabispec::reflection(sys, probe, thermal, omega_p) ==
          doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("oversized drive saturates the response and is clamped") {
  const EigenSystem sys =
      rabispec::converged_eigensystem(make_params(0.4, 0.0, 1.0, 0.2));
  ProbeConfig probe;
  probe.amplitude_ap = 0.5;
  probe.r0 = 1.0;
  ThermalConfig thermal;
  thermal.kt = 0.5;

  std::size_t clamps = 0;
  const double omega_01 = rabispec::transition_frequency(sys, 0, 1);
  const double r = rabispec::reflection(sys, probe, thermal, omega_01, &clamps);
  CHECK(r == 1.0);
  CHECK(clamps == 1);

  const SpectrumGrid grid = rabispec::transmission_grid(
      make_params(0.4, 0.0, 1.0, 0.2), linear_axis(-0.5, 0.5, 7),
      linear_axis(0.8, 1.2, 9), probe, thermal);
  CHECK(grid.clamp_events > 0);
  for (double value : grid.values) {
    CHECK(value >= 0.0);
    CHECK(value <= 1.0);
  }
}

TEST_CASE("transmission grid is symmetric under bias reversal") {
  const SpectrumGrid grid = rabispec::transmission_grid(
      make_params(0.2, 0.0, 1.0, 0.55), linear_axis(-1.0, 1.0, 21),
      linear_axis(0.85, 1.15, 11));

  const std::size_t n_eps = grid.epsilon_axis.size();
  for (std::size_t i = 0; i < n_eps; ++i) {
    const std::size_t mirror = n_eps - 1 - i;
    for (std::size_t j = 0; j < grid.probe_axis.size(); ++j) {
      CHECK(std::abs(grid.at(i, j) - grid.at(mirror, j)) < 1e-8);
    }
  }
}

TEST_CASE("population floor changes the lattice by less than its documented bound") {
  const ModelParams p = make_params(0.3, 0.0, 1.0, 0.5);
  const std::vector<double> eps_axis = linear_axis(-0.8, 0.8, 9);
  const std::vector<double> probe_axis = linear_axis(0.85, 1.15, 9);

  ThermalConfig tight;
  tight.population_floor = 1e-6;
  ThermalConfig loose;
  loose.population_floor = 1e-3;
  ProbeConfig probe;

  const SpectrumGrid grid_tight =
      rabispec::transmission_grid(p, eps_axis, probe_axis, probe, tight);
  const SpectrumGrid grid_loose =
      rabispec::transmission_grid(p, eps_axis, probe_axis, probe, loose);

  double worst = 0.0;
  for (std::size_t k = 0; k < grid_tight.values.size(); ++k) {
    worst = std::max(worst,
                     std::abs(grid_tight.values[k] - grid_loose.values[k]));
  }
  CHECK(worst <= 10.0 * loose.population_floor * probe.r0);
}

TEST_CASE("default axes match the published lattice") {
  const std::vector<double> eps_axis = rabispec::default_epsilon_axis(2.0);
  const std::vector<double> probe_axis = rabispec::default_probe_axis(2.0);

  REQUIRE(eps_axis.size() == 241);
  REQUIRE(probe_axis.size() == 201);
  CHECK(eps_axis.front() == doctest::Approx(-4.0));
  CHECK(eps_axis.back() == doctest::Approx(4.0));
  CHECK(probe_axis.front() == doctest::Approx(1.6));
  CHECK(probe_axis.back() == doctest::Approx(2.4));

  for (std::size_t k = 1; k + 1 < eps_axis.size(); ++k) {
    const double left = eps_axis[k] - eps_axis[k - 1];
    const double right = eps_axis[k + 1] - eps_axis[k];
    CHECK(std::abs(left - right) < 1e-12);
  }
}

TEST_CASE("grid values agree with a point-by-point recomputation") {
  const ModelParams p = make_params(0.35, 0.0, 1.0, 0.6);
  const std::vector<double> eps_axis = {-0.4, 0.1, 0.55};
  const std::vector<double> probe_axis = {0.9, 1.05};
  const SpectrumGrid grid = rabispec::transmission_grid(p, eps_axis, probe_axis);

  REQUIRE(grid.values.size() == 6);
  for (std::size_t i = 0; i < eps_axis.size(); ++i) {
    ModelParams column = p;
    column.epsilon = eps_axis[i];
    const EigenSystem sys = rabispec::converged_eigensystem(column);
    for (std::size_t j = 0; j < probe_axis.size(); ++j) {
      const double expected =
          1.0 - rabispec::reflection(sys, grid.probe, grid.thermal, probe_axis[j]);
      CHECK(grid.at(i, j) == doctest::Approx(expected).epsilon(1e-12));
      CHECK(grid.at(i, j) == grid.values[i * probe_axis.size() + j]);
    }
  }
}

TEST_CASE("worker count does not change the lattice") {
  const ModelParams p = make_params(0.25, 0.0, 1.0, 0.7);
  const std::vector<double> eps_axis = linear_axis(-0.6, 0.6, 13);
  const std::vector<double> probe_axis = linear_axis(0.9, 1.1, 7);

  setenv("RABI_SPEC_THREADS", "1", 1);
  const SpectrumGrid serial = rabispec::transmission_grid(p, eps_axis, probe_axis);
  setenv("RABI_SPEC_THREADS", "4", 1);
  const SpectrumGrid parallel = rabispec::transmission_grid(p, eps_axis, probe_axis);
  unsetenv("RABI_SPEC_THREADS");

  REQUIRE(serial.values.size() == parallel.values.size());
  for (std::size_t k = 0; k < serial.values.size(); ++k) {
    CHECK(serial.values[k] == parallel.values[k]);
  }
}

TEST_CASE("the uncoupled line follows the two-level dispersion") {
  // The bias range keeps sqrt(delta^2 + eps^2) below omega so the qubit
  // doublet stays the lowest pair and level 1 tracks the two-level line.
  const std::vector<double> eps_axis = linear_axis(-0.7, 0.7, 11);
  const auto lines = rabispec::transition_lines(
      make_params(0.6, 0.0, 1.0, 0.0), eps_axis, {{0, 1}});

  REQUIRE(lines.size() == 1);
  REQUIRE(lines[0].points.size() == eps_axis.size());
  CHECK(lines[0].from_level == 0);
  CHECK(lines[0].to_level == 1);
  for (std::size_t k = 0; k < eps_axis.size(); ++k) {
    const auto& point = lines[0].points[k];
    CHECK(point.epsilon == eps_axis[k]);
    const double expected = std::sqrt(0.36 + eps_axis[k] * eps_axis[k]);
    CHECK(point.frequency == doctest::Approx(expected).epsilon(1e-10));
    CHECK(point.matrix_element < 1e-12);
  }
}

TEST_CASE("upper-pair lines coincide at the third boundary") {
  const auto lines = rabispec::transition_lines(
      make_params(0.1, 0.0, 1.0, 1.0 / std::sqrt(2.0)), {0.0}, {{0, 2}, {1, 3}});

  REQUIRE(lines.size() == 2);
  const double gap_02 = lines[0].points[0].frequency;
  const double gap_13 = lines[1].points[0].frequency;
  CHECK(std::abs(gap_02 - gap_13) < 1e-3);
}

TEST_CASE("validation rejects malformed axes and settings") {
  const ModelParams p = make_params(0.3, 0.0, 1.0, 0.4);
  CHECK_THROWS_AS((void)rabispec::transmission_grid(p, {}, {0.9, 1.1}),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)rabispec::transmission_grid(p, {0.5, -0.5}, {0.9, 1.1}),
                  std::invalid_argument);

  ProbeConfig probe;
  probe.r0 = 0.0;
  CHECK_THROWS_AS(probe.validate(), std::invalid_argument);
  probe = ProbeConfig{};
  probe.r0 = 1.5;
  CHECK_THROWS_AS(probe.validate(), std::invalid_argument);
  probe = ProbeConfig{};
  probe.gamma = 0.0;
  CHECK_THROWS_AS(probe.validate(), std::invalid_argument);
  probe = ProbeConfig{};
  probe.amplitude_ap = -1e-3;
  CHECK_THROWS_AS(probe.validate(), std::invalid_argument);

  ThermalConfig thermal;
  thermal.kt = -0.1;
  CHECK_THROWS_AS(thermal.validate(), std::invalid_argument);
  thermal = ThermalConfig{};
  thermal.max_levels = 1;
  CHECK_THROWS_AS(thermal.validate(), std::invalid_argument);
  thermal = ThermalConfig{};
  thermal.population_floor = -1e-9;
  CHECK_THROWS_AS(thermal.validate(), std::invalid_argument);
}

}  // TEST_SUITE("response")

#include "rabispec/response.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

namespace rabispec {

namespace {

void require(bool condition, const std::string& message) {
  if (!condition) throw std::invalid_argument(message);
}

void require_sorted_axis(const std::vector<double>& axis, const std::string& name) {
  require(!axis.empty(), name + " axis must be nonempty");
  require(std::is_sorted(axis.begin(), axis.end()), name + " axis must be sorted");
}

std::size_t resolve_worker_count(std::size_t work_items) {
  std::size_t workers = 0;
  if (const char* env = std::getenv("RABI_SPEC_THREADS")) {
    char* end = nullptr;
    const long parsed = std::strtol(env, &end, 10);
    if (end != env && parsed >= 0) workers = static_cast<std::size_t>(parsed);
  }
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  return std::max<std::size_t>(1, std::min(workers, work_items));
}

/// Per-column precomputation shared across probe frequencies.
struct ColumnTerms {
  struct Term {
    double population;
    double omega_sq;  ///< Omega_ij^2
    double frequency;
  };
  std::vector<Term> terms;
};

ColumnTerms column_terms(const EigenSystem& eig, const ProbeConfig& probe,
                         const ThermalConfig& thermal) {
  ColumnTerms column;
  const std::vector<double> populations = thermal_populations(eig, thermal);
  const int levels = static_cast<int>(populations.size());
  for (int i = 0; i < levels; ++i) {
    if (populations[i] < thermal.population_floor) continue;
    for (int j = i + 1; j < levels; ++j) {
      const double element = drive_matrix_element(eig, i, j);
      const double rabi = probe.amplitude_ap * element;
      if (rabi == 0.0) continue;
      column.terms.push_back({populations[i], rabi * rabi,
                              eig.energies[j] - eig.energies[i]});
    }
  }
  return column;
}

double reflection_from_terms(const ColumnTerms& column, const ProbeConfig& probe,
                             double omega_p, std::size_t* clamp_events) {
  const double gamma_sq = probe.gamma * probe.gamma;
  double total = 0.0;
  for (const auto& term : column.terms) {
    const double detuning = omega_p - term.frequency;
    total += probe.r0 * term.population * term.omega_sq /
             (term.omega_sq + detuning * detuning + gamma_sq);
  }
  if (total > 1.0) {
    if (clamp_events) ++(*clamp_events);
    total = 1.0;
  }
  return total;
}

/// Run fn(index) for every index in [0, count) on a deterministic-by-index
/// worker pool; the first exception wins and is rethrown after joining.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = resolve_worker_count(count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  auto body = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      {
        std::scoped_lock lock(error_mutex);
        if (first_error) return;
      }
      try {
        fn(i);
      } catch (...) {
        std::scoped_lock lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& thread : pool) thread.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::vector<double> linear_axis(double lo, double hi, int count) {
  std::vector<double> axis(count);
  for (int k = 0; k < count; ++k)
    axis[k] = lo + (hi - lo) * static_cast<double>(k) / (count - 1);
  return axis;
}

}  // namespace

void ProbeConfig::validate() const {
  require(gamma > 0.0, "ProbeConfig: gamma must be positive");
  require(amplitude_ap >= 0.0, "ProbeConfig: amplitude_ap must be nonnegative");
  require(r0 > 0.0 && r0 <= 1.0, "ProbeConfig: r0 must lie in (0, 1]");
}

void ThermalConfig::validate() const {
  require(kt >= 0.0, "ThermalConfig: kt must be nonnegative");
  require(max_levels >= 2, "ThermalConfig: max_levels must be >= 2");
  require(population_floor >= 0.0, "ThermalConfig: population_floor must be >= 0");
}

std::vector<double> thermal_populations(const EigenSystem& eig,
                                        const ThermalConfig& thermal) {
  thermal.validate();
  const int levels = std::min(thermal.max_levels, eig.dimension());
  std::vector<double> populations(levels, 0.0);
  if (thermal.kt == 0.0) {
    populations[0] = 1.0;
    return populations;
  }
  double norm = 0.0;
  for (int i = 0; i < levels; ++i) {
    populations[i] = std::exp(-(eig.energies[i] - eig.energies[0]) / thermal.kt);
    norm += populations[i];
  }
  for (double& p : populations) p /= norm;
  return populations;
}

double reflection(const EigenSystem& eig, const ProbeConfig& probe,
                  const ThermalConfig& thermal, double omega_p,
                  std::size_t* clamp_events) {
  probe.validate();
  require(omega_p >= 0.0, "reflection: omega_p must be nonnegative");
  return reflection_from_terms(column_terms(eig, probe, thermal), probe, omega_p,
                               clamp_events);
}

std::vector<double> default_epsilon_axis(double omega) {
  return linear_axis(-2.0 * omega, 2.0 * omega, 241);
}

std::vector<double> default_probe_axis(double omega) {
  return linear_axis(0.8 * omega, 1.2 * omega, 201);
}

SpectrumGrid transmission_grid(const ModelParams& template_params,
                               const std::vector<double>& epsilon_axis,
                               const std::vector<double>& probe_axis,
                               const ProbeConfig& probe, const ThermalConfig& thermal,
                               const TruncationConfig& trunc) {
  template_params.validate();
  probe.validate();
  thermal.validate();
  require_sorted_axis(epsilon_axis, "epsilon");
  require_sorted_axis(probe_axis, "probe");

  SpectrumGrid grid;
  grid.epsilon_axis = epsilon_axis;
  grid.probe_axis = probe_axis;
  grid.template_params = template_params;
  grid.probe = probe;
  grid.thermal = thermal;
  grid.values.assign(epsilon_axis.size() * probe_axis.size(), 0.0);

  TruncationConfig local = trunc;
  local.n_levels_checked = std::max(local.n_levels_checked, thermal.max_levels);

  std::vector<std::size_t> clamp_per_column(epsilon_axis.size(), 0);
  parallel_for(epsilon_axis.size(), [&](std::size_t column_index) {
    ModelParams params = template_params;
    params.epsilon = epsilon_axis[column_index];
    EigenSystem sys;
    try {
      sys = converged_eigensystem(params, local);
    } catch (const ConvergenceError& error) {
      throw ConvergenceError("epsilon=" + std::to_string(params.epsilon) + ": " +
                                 error.what(),
                             error.previous_energies, error.last_energies);
    }
    const ColumnTerms column = column_terms(sys, probe, thermal);
    double* row = grid.values.data() + column_index * probe_axis.size();
    for (std::size_t p = 0; p < probe_axis.size(); ++p) {
      row[p] = 1.0 - reflection_from_terms(column, probe, probe_axis[p],
                                           &clamp_per_column[column_index]);
    }
  });
  for (const std::size_t count : clamp_per_column) grid.clamp_events += count;
  return grid;
}

std::vector<TransitionLine> transition_lines(
    const ModelParams& template_params, const std::vector<double>& epsilon_axis,
    const std::vector<std::pair<int, int>>& pairs, const TruncationConfig& trunc) {
  template_params.validate();
  require_sorted_axis(epsilon_axis, "epsilon");
  require(!pairs.empty(), "transition_lines: no pairs requested");

  int max_level = 0;
  for (const auto& [i, j] : pairs) {
    require(i >= 0 && i < j, "transition_lines: pairs must satisfy 0 <= i < j");
    max_level = std::max(max_level, j);
  }
  TruncationConfig local = trunc;
  local.n_levels_checked = std::max(local.n_levels_checked, max_level + 1);

  std::vector<TransitionLine> lines(pairs.size());
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    lines[p].from_level = pairs[p].first;
    lines[p].to_level = pairs[p].second;
    lines[p].points.resize(epsilon_axis.size());
  }
  parallel_for(epsilon_axis.size(), [&](std::size_t column_index) {
    ModelParams params = template_params;
    params.epsilon = epsilon_axis[column_index];
    EigenSystem sys;
    try {
      sys = converged_eigensystem(params, local);
    } catch (const ConvergenceError& error) {
      throw ConvergenceError("epsilon=" + std::to_string(params.epsilon) + ": " +
                                 error.what(),
                             error.previous_energies, error.last_energies);
    }
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const auto [i, j] = pairs[p];
      lines[p].points[column_index] = {params.epsilon, transition_frequency(sys, i, j),
                                       drive_matrix_element(sys, i, j)};
    }
  });
  return lines;
}

}  // namespace rabispec

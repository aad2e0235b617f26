#include <cmath>
#include <vector>

#include <benchmark/benchmark.h>

#include "rabispec/analytic.hpp"
#include "rabispec/model.hpp"
#include "rabispec/regimes.hpp"
#include "rabispec/response.hpp"

namespace {

rabispec::ModelParams make_params(double delta, double epsilon, double omega,
                                  double g) {
  rabispec::ModelParams p;
  p.delta = delta;
  p.epsilon = epsilon;
  p.omega = omega;
  p.g = g;
  return p;
}

void BM_BuildHamiltonian(benchmark::State& state) {
  const auto params = make_params(0.1, 0.3, 1.0, 0.8);
  const int n_fock = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(rabispec::build_hamiltonian(params, n_fock));
  }
}
BENCHMARK(BM_BuildHamiltonian)->Arg(16)->Arg(64)->Arg(256);

void BM_Diagonalize(benchmark::State& state) {
  const auto params = make_params(0.1, 0.3, 1.0, 0.8);
  const int n_fock = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(rabispec::diagonalize(params, n_fock));
  }
}
BENCHMARK(BM_Diagonalize)->Arg(16)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);

void BM_ConvergedEigensystem(benchmark::State& state) {
  const double coupling = 0.1 * static_cast<double>(state.range(0));
  const auto params = make_params(0.1, 0.2, 1.0, coupling);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rabispec::converged_eigensystem(params));
  }
}
BENCHMARK(BM_ConvergedEigensystem)->Arg(5)->Arg(10)->Arg(15)->Unit(benchmark::kMicrosecond);

void BM_GridColumn(benchmark::State& state) {
  const auto params = make_params(0.1, 0.4, 1.0, 0.7);
  const auto probe_axis = rabispec::default_probe_axis(1.0);
  const auto sys = rabispec::converged_eigensystem(params);
  const rabispec::ProbeConfig probe;
  const rabispec::ThermalConfig thermal;
  for (auto _ : state) {
    double total = 0.0;
    for (double omega_p : probe_axis) {
      total += rabispec::reflection(sys, probe, thermal, omega_p);
    }
    benchmark::DoNotOptimize(total);
  }
}
BENCHMARK(BM_GridColumn)->Unit(benchmark::kMicrosecond);

void BM_TransmissionGrid(benchmark::State& state) {
  const auto params = make_params(0.1, 0.0, 1.0, 0.7);
  std::vector<double> eps_axis;
  for (int k = 0; k < 21; ++k) {
    eps_axis.push_back(-1.0 + 0.1 * k);
  }
  std::vector<double> probe_axis;
  for (int k = 0; k < 41; ++k) {
    probe_axis.push_back(0.8 + 0.01 * k);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        rabispec::transmission_grid(params, eps_axis, probe_axis));
  }
}
BENCHMARK(BM_TransmissionGrid)->Unit(benchmark::kMillisecond);

void BM_AssocLaguerre(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(rabispec::assoc_laguerre(50, 3, 1.7));
  }
}
BENCHMARK(BM_AssocLaguerre);

void BM_DisplacedFockOverlap(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(rabispec::displaced_fock_overlap(1.3, 40, 35));
  }
}
BENCHMARK(BM_DisplacedFockOverlap);

void BM_RegimeBoundaries(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(rabispec::regime_boundaries(0.1));
  }
}
BENCHMARK(BM_RegimeBoundaries)->Unit(benchmark::kMillisecond);

void BM_ClassifyHigh(benchmark::State& state) {
  const auto params = make_params(0.1, 0.0, 1.0, 0.8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rabispec::classify_high(params));
  }
}
BENCHMARK(BM_ClassifyHigh)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

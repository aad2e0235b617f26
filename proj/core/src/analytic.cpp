#include "rabispec/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rabispec {

namespace {

constexpr double k_bisect_tol = 1e-5;

/// Signed E3-E2 splitting at epsilon = 0: positive while the odd-parity state
/// lies below (the ordering before the crossing), negative after.
double signed_splitting_23(double delta_ratio, double g) {
  const ModelParams params{delta_ratio, 0.0, 1.0, g};
  const EigenSystem sys = converged_eigensystem(params);
  const double split = sys.energies[3] - sys.energies[2];
  return parity_expectation(sys, 2) < 0.0 ? split : -split;
}

/// (E3-E2) - (E1-E0) at epsilon = 0; changes sign at b3.
double pair_gap_difference_at_zero(double delta_ratio, double g) {
  const ModelParams params{delta_ratio, 0.0, 1.0, g};
  const EigenSystem sys = converged_eigensystem(params);
  return (sys.energies[3] - sys.energies[2]) - (sys.energies[1] - sys.energies[0]);
}

/// (E4-E3) - (E2-E1) at epsilon = omega; changes sign where the first two
/// pair splittings cross, which is where the 1->3 line's extremum at
/// epsilon = omega flips between dip and peak.
double pair_gap_difference_at_omega(double delta_ratio, double g) {
  const ModelParams params{delta_ratio, 1.0, 1.0, g};
  const EigenSystem sys = converged_eigensystem(params);
  return (sys.energies[4] - sys.energies[3]) - (sys.energies[2] - sys.energies[1]);
}

double bisect(const std::function<double(double)>& f, double lo, double hi,
              double f_lo) {
  while (hi - lo > k_bisect_tol) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = f(mid);
    if ((f_mid < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// All sign-change roots of f on [lo, hi] found by a fixed-step scan.
std::vector<double> scan_roots(const std::function<double(double)>& f, double lo,
                               double hi, double step) {
  std::vector<double> roots;
  double g_prev = lo;
  double f_prev = f(lo);
  for (double g = lo + step; g <= hi + 0.5 * step; g += step) {
    const double f_here = f(g);
    if ((f_here < 0.0) != (f_prev < 0.0))
      roots.push_back(bisect(f, g_prev, g, f_prev));
    g_prev = g;
    f_prev = f_here;
  }
  return roots;
}

double single_root(const std::function<double(double)>& f, double lo, double hi,
                   double step, const std::string& name) {
  const std::vector<double> roots = scan_roots(f, lo, hi, step);
  if (roots.empty())
    throw BracketError("regime_boundaries: no sign change bracketed for " + name +
                       " in (" + std::to_string(lo) + ", " + std::to_string(hi) + ")");
  return roots.front();
}

}  // namespace

double assoc_laguerre(int n, int m, double x) {
  if (n < 0 || m < 0)
    throw std::invalid_argument("assoc_laguerre: n and m must be nonnegative");
  if (n == 0) return 1.0;
  double prev = 1.0;
  double current = 1.0 + m - x;
  for (int k = 1; k < n; ++k) {
    const double next = ((2.0 * k + m + 1.0 - x) * current - (k + m) * prev) / (k + 1.0);
    prev = current;
    current = next;
  }
  return current;
}

double displaced_fock_overlap(double alpha, int m, int n) {
  if (m < 0 || n < 0)
    throw std::invalid_argument("displaced_fock_overlap: indices must be nonnegative");
  const int lo = std::min(m, n);
  const int hi = std::max(m, n);
  const int d = hi - lo;
  // sqrt(lo!/hi!) alpha^d as one product, avoiding factorial overflow
  double prefactor = 1.0;
  for (int k = lo + 1; k <= hi; ++k) prefactor *= alpha / std::sqrt(static_cast<double>(k));
  if (m < n && d % 2 != 0) prefactor = -prefactor;
  const double x = alpha * alpha;
  return prefactor * std::exp(-0.5 * x) * assoc_laguerre(lo, d, x);
}

double e31_second_term(double g, double omega, Branch branch) {
  if (omega <= 0.0) throw std::invalid_argument("e31_second_term: omega must be positive");
  const double y = (g / omega) * (g / omega);
  const double sign = (branch == Branch::plus) ? 1.0 : -1.0;
  const double bracket = 1.0 + sign * (2.0 - 4.0 * y) / std::sqrt(2.0);
  return std::exp(-2.0 * y) * (2.0 * g / omega) * bracket;
}

double symmetry_point_splitting(int n, const ModelParams& params) {
  params.validate();
  if (n < 0) throw std::invalid_argument("symmetry_point_splitting: n must be >= 0");
  if (params.epsilon != 0.0)
    throw std::invalid_argument(
        "symmetry_point_splitting: defined at the symmetry point only (epsilon = 0)");
  const double x = 4.0 * params.coupling_ratio() * params.coupling_ratio();
  return params.delta * std::exp(-0.5 * x) * std::abs(assoc_laguerre(n, 0, x));
}

BoundarySet regime_boundaries(double delta_ratio) {
  if (!(delta_ratio >= 0.0 && delta_ratio < 1.0))
    throw std::invalid_argument("regime_boundaries: delta_ratio must lie in [0, 1)");

  BoundarySet set;
  set.delta_ratio = delta_ratio;
  if (delta_ratio == 0.0) {
    set.b1 = 0.5 * std::sqrt(2.0 - std::sqrt(2.0));
    set.b2 = 0.5;
    set.b3 = 1.0 / std::sqrt(2.0);
    set.b4 = 0.5 * std::sqrt(2.0 + std::sqrt(2.0));
    set.method = BoundarySet::Method::analytic_limit;
    return set;
  }

  set.method = BoundarySet::Method::numeric_root;
  set.b2 = single_root([&](double g) { return signed_splitting_23(delta_ratio, g); },
                       0.05, 0.9, 0.025, "b2");
  set.b3 = single_root([&](double g) { return pair_gap_difference_at_zero(delta_ratio, g); },
                       0.1, 1.2, 0.025, "b3");

  const std::vector<double> flips = scan_roots(
      [&](double g) { return pair_gap_difference_at_omega(delta_ratio, g); },
      0.02, 1.4, 0.02);
  for (const double root : flips) {
    if (root < set.b2 && !set.b1) set.b1 = root;
    if (root > set.b3 && !set.b4) set.b4 = root;
  }
  return set;
}

Eigen::VectorXd DeepStrongState::full_vector() const {
  const int cutoff = static_cast<int>(right_component.coefficients.size()) - 1;
  Eigen::VectorXd v = Eigen::VectorXd::Zero(2 * (cutoff + 1));
  for (int m = 0; m <= cutoff; ++m) {
    v[2 * m] = right_component.coefficients[m];
    v[2 * m + 1] = relative_sign * left_component.coefficients[m];
  }
  return v.normalized();
}

DeepStrongPair build_deep_strong_states(double g, double omega, int n_fock) {
  if (omega <= 0.0) throw std::invalid_argument("build_deep_strong_states: omega must be positive");
  if (g < 0.0) throw std::invalid_argument("build_deep_strong_states: g must be nonnegative");
  if (n_fock < 1) throw std::invalid_argument("build_deep_strong_states: n_fock must be >= 1");
  const double alpha = g / omega;

  auto component = [&](DisplacedState::QubitBranch branch, double displacement,
                       int fock_index) {
    DisplacedState state;
    state.branch = branch;
    state.displacement = displacement;
    state.fock_index = fock_index;
    state.coefficients.resize(n_fock + 1);
    for (int m = 0; m <= n_fock; ++m)
      state.coefficients[m] = displaced_fock_overlap(displacement, m, fock_index);
    const double captured = state.coefficients.squaredNorm();
    if (captured < 1.0 - 1e-8) {
      throw ConvergenceError(
          "build_deep_strong_states: cutoff n_fock=" + std::to_string(n_fock) +
              " captures only " + std::to_string(captured) +
              " of the displaced-state norm",
          {captured}, {captured});
    }
    return state;
  };

  auto make_state = [&](int fock_index, double relative_sign) {
    DeepStrongState state;
    state.right_component =
        component(DisplacedState::QubitBranch::right, -alpha, fock_index);
    state.left_component =
        component(DisplacedState::QubitBranch::left, +alpha, fock_index);
    state.relative_sign = relative_sign;
    return state;
  };

  DeepStrongPair pair;
  pair.ground = make_state(0, +1.0);
  pair.third = make_state(1, -1.0);
  return pair;
}

}  // namespace rabispec

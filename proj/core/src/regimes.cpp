#include "rabispec/regimes.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace rabispec {

namespace {

constexpr double flatness_scale = 1e-6;
constexpr double allowed_threshold = 1e-6;

EigenSystem solve_at(const ModelParams& base, double epsilon,
                     const TruncationConfig& trunc) {
  ModelParams p = base;
  p.epsilon = epsilon;
  return converged_eigensystem(p, trunc);
}

Shape shape_from_difference(double d2, double omega) {
  if (std::abs(d2) < flatness_scale * omega) {
    return Shape::flat;
  }
  return d2 < 0.0 ? Shape::peak : Shape::dip;
}

}  // namespace

std::vector<LineShapeFeature> extract_features(
    const ModelParams& params, const std::vector<std::pair<int, int>>& transitions,
    double h) {
  params.validate();
  if (h < 0.0 || !std::isfinite(h)) {
    throw std::invalid_argument("extract_features: step h must be positive");
  }
  if (h == 0.0) {
    h = 0.01 * params.omega;
  }
  if (transitions.empty()) {
    return {};
  }
  int max_level = 0;
  for (const auto& [i, j] : transitions) {
    if (i < 0 || j <= i) {
      throw std::invalid_argument(
          "extract_features: transition indices must satisfy 0 <= i < j");
    }
    max_level = std::max(max_level, j);
  }

  TruncationConfig trunc;
  trunc.n_levels_checked = std::max(trunc.n_levels_checked, max_level + 1);

  const double w = params.omega;
  const std::array<double, 6> biases = {-h, 0.0, h, w - h, w, w + h};
  std::vector<EigenSystem> systems;
  systems.reserve(biases.size());
  for (double eps : biases) {
    systems.push_back(solve_at(params, eps, trunc));
  }
  const EigenSystem& at_symmetry = systems[1];

  std::vector<LineShapeFeature> out;
  out.reserve(2 * transitions.size());
  for (const auto& [i, j] : transitions) {
    const bool allowed =
        drive_matrix_element(at_symmetry, i, j) > allowed_threshold;
    for (int loc = 0; loc < 2; ++loc) {
      const int base = 3 * loc;
      const double fm = transition_frequency(systems[base + 0], i, j);
      const double fc = transition_frequency(systems[base + 1], i, j);
      const double fp = transition_frequency(systems[base + 2], i, j);
      const double d2 = fp - 2.0 * fc + fm;

      LineShapeFeature feature;
      feature.transition = {i, j};
      feature.location =
          loc == 0 ? FeatureLocation::at_zero : FeatureLocation::at_pm_omega;
      feature.shape = shape_from_difference(d2, w);
      feature.allowed = allowed;
      out.push_back(feature);
    }
  }
  return out;
}

RegimeReport classify_low(const ModelParams& params) {
  params.validate();
  if (params.delta_ratio() >= 1.0) {
    throw std::invalid_argument(
        "classify_low: taxonomy is defined for delta < omega");
  }
  return classify_low(params, regime_boundaries(params.delta_ratio()));
}

RegimeReport classify_low(const ModelParams& params, const BoundarySet& bset) {
  params.validate();
  if (params.delta_ratio() >= 1.0) {
    throw std::invalid_argument(
        "classify_low: taxonomy is defined for delta < omega");
  }
  const double r = params.coupling_ratio();
  const double inf = std::numeric_limits<double>::infinity();

  RegimeReport report;
  if (bset.b1 && r < *bset.b1) {
    report.interval_index = 1;
    report.bounds = {0.0, *bset.b1};
  } else if (r < bset.b2) {
    report.interval_index = 2;
    report.bounds = {bset.b1.value_or(0.0), bset.b2};
  } else if (r < bset.b3) {
    report.interval_index = 3;
    report.bounds = {bset.b2, bset.b3};
  } else if (!bset.b4 || r < *bset.b4) {
    report.interval_index = 4;
    report.bounds = {bset.b3, bset.b4 ? *bset.b4 : inf};
  } else {
    report.interval_index = 5;
    report.bounds = {*bset.b4, inf};
  }

  const std::array<std::pair<int, std::optional<double>>, 4> edges = {
      {{1, bset.b1}, {2, bset.b2}, {3, bset.b3}, {4, bset.b4}}};
  for (const auto& [index, value] : edges) {
    if (!value) {
      continue;
    }
    const double distance = std::abs(r - *value);
    if (distance < near_boundary_band &&
        (!report.near_boundary || distance < report.near_boundary->distance)) {
      report.near_boundary = NearBoundaryFlag{index, *value, distance};
    }
  }

  report.features = extract_features(params, {{0, 2}, {1, 3}});
  return report;
}

HigherLevelPattern classify_high(const ModelParams& params) {
  params.validate();
  if (params.delta_ratio() >= 1.0) {
    throw std::invalid_argument(
        "classify_high: taxonomy is defined for delta < omega");
  }
  const auto features = extract_features(params, {{2, 4}, {3, 5}});

  HigherLevelPattern pattern;
  pattern.shape_24_at0 = features[0].shape;
  pattern.shape_24_at_eps_omega = features[1].shape;
  pattern.shape_35_at_eps_omega = features[3].shape;

  TruncationConfig trunc;
  trunc.n_levels_checked = std::max(trunc.n_levels_checked, 6);
  const EigenSystem at_symmetry = solve_at(params, 0.0, trunc);
  const int even_member = parity_expectation(at_symmetry, 4) > 0.0 ? 4 : 5;
  const int odd_member = even_member == 4 ? 5 : 4;
  const double element_24 = drive_matrix_element(at_symmetry, 2, even_member);
  const double element_35 = drive_matrix_element(at_symmetry, 3, odd_member);
  pattern.allowed_24_35_at0 =
      element_24 > allowed_threshold && element_35 > allowed_threshold;
  return pattern;
}

}  // namespace rabispec

#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "rabispec/analytic.hpp"
#include "rabispec/model.hpp"

namespace rabispec {

enum class Shape { peak, dip, flat };

enum class FeatureLocation { at_zero, at_pm_omega };

/// Qualitative description of one transition line at one special bias point.
struct LineShapeFeature {
  std::pair<int, int> transition;
  FeatureLocation location = FeatureLocation::at_zero;
  Shape shape = Shape::flat;
  bool allowed = false;  ///< drive element at epsilon = 0 above threshold
};

/// Set when the coupling sits within the refuse-to-classify band of a
/// boundary; boundary_index is 1-based (b1..b4).
struct NearBoundaryFlag {
  int boundary_index = 0;
  double boundary = 0.0;
  double distance = 0.0;
};

/// Five-interval classification with feature evidence attached.
struct RegimeReport {
  int interval_index = 0;                      ///< 1..5
  std::pair<double, double> bounds{0.0, 0.0};  ///< g/omega range; upper may be inf
  std::vector<LineShapeFeature> features;
  std::optional<NearBoundaryFlag> near_boundary;
};

/// The quadruple classified by the nine-pattern higher-level taxonomy.
struct HigherLevelPattern {
  bool allowed_24_35_at0 = false;
  Shape shape_24_at0 = Shape::flat;
  Shape shape_24_at_eps_omega = Shape::flat;
  Shape shape_35_at_eps_omega = Shape::flat;
};

/// Half-width of the refuse-to-classify band around each boundary, in g/omega.
inline constexpr double near_boundary_band = 0.02;

/// Shape and allowedness of each requested transition at epsilon = 0 and at
/// epsilon = +-omega, in that order per transition.
///
/// The shape is the sign of the centered second difference of omega_ij(eps)
/// with step h (negative peak, positive dip); magnitudes below 1e-6 omega are
/// flat. Allowedness compares the epsilon = 0 drive element against 1e-6 of
/// the bare-oscillator 0->1 element. h = 0 selects the default 0.01 omega.
[[nodiscard]] std::vector<LineShapeFeature> extract_features(
    const ModelParams& params, const std::vector<std::pair<int, int>>& transitions,
    double h = 0.0);

/// Place g/omega within the five intervals for the given delta/omega < 1,
/// attaching (0,2) and (1,3) features as evidence. Sets near_boundary when
/// the coupling is within near_boundary_band of a boundary. Intervals whose
/// defining transformation is absent at large delta/omega have zero width.
[[nodiscard]] RegimeReport classify_low(const ModelParams& params);

/// Same classification against caller-supplied boundaries, which must have
/// been computed for the same delta/omega. Avoids recomputing the boundary
/// set when classifying many couplings at one detuning.
[[nodiscard]] RegimeReport classify_low(const ModelParams& params,
                                        const BoundarySet& bounds);

/// Evaluate the higher-level quadruple on transitions (2,4) and (3,5).
///
/// For the allowed flag the two upper-pair states are identified by parity
/// character, with the even-parity member playing the role of level 4; the
/// pair swaps energy order at its two internal crossings, and the taxonomy's
/// labels follow the displaced-Fock character through them.
[[nodiscard]] HigherLevelPattern classify_high(const ModelParams& params);

}  // namespace rabispec

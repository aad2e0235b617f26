#pragma once

#include <Eigen/Dense>
#include <optional>

#include "rabispec/model.hpp"

namespace rabispec {

/// Associated Laguerre polynomial L_n^m(x) by the three-term recurrence in n.
/// Requires n >= 0 and m >= 0.
[[nodiscard]] double assoc_laguerre(int n, int m, double x);

/// <m|D(alpha)|n> for real alpha, with D(alpha) = exp(alpha a^dag - alpha a).
/// Uses the Laguerre closed form with the factorial ratio folded into a
/// product, stable for large indices.
[[nodiscard]] double displaced_fock_overlap(double alpha, int m, int n);

/// Sign branch of the closed-form bracket below.
enum class Branch { minus, plus };

/// Second term of the 1->3 transition frequency at epsilon = omega:
///
///   e^{-2 g^2/omega^2} (2 g/omega) [1 +- (1/sqrt(2))(2 - 4 g^2/omega^2)]
///
/// The minus branch applies for g/omega < 1/sqrt(2) and changes sign at
/// g/omega = sqrt(2-sqrt(2))/2; the plus branch applies above 1/sqrt(2) and
/// changes sign at sqrt(2+sqrt(2))/2. The bracket is quoted without a gap
/// prefactor; sign-change locations do not depend on it.
[[nodiscard]] double e31_second_term(double g, double omega, Branch branch);

/// Small-delta estimate of the quasi-degenerate splitting E_{2n+1} - E_{2n}
/// at the symmetry point: delta e^{-2 g^2/omega^2} |L_n(4 g^2/omega^2)|.
/// Requires params.epsilon == 0.
[[nodiscard]] double symmetry_point_splitting(int n, const ModelParams& params);

/// The four g/omega values separating the five spectral regimes.
///
/// b1 and b4 mark where the pair-splitting order at epsilon = omega flips
/// (the 1->3 line's extremum changes between dip and peak); they cease to
/// exist at large delta/omega and are then absent. b2 is the E2 = E3 level
/// crossing and b3 the transition-frequency crossing E3-E2 = E1-E0, both at
/// epsilon = 0.
struct BoundarySet {
  std::optional<double> b1;  ///< dip-to-peak flip below b2, absent at large delta
  double b2 = 0.0;
  double b3 = 0.0;
  std::optional<double> b4;  ///< peak-to-dip flip above b3, absent at large delta

  double delta_ratio = 0.0;
  enum class Method { analytic_limit, numeric_root } method = Method::analytic_limit;
};

/// Boundaries for a given delta/omega in [0, 1). delta_ratio = 0 returns the
/// closed-form limits (sqrt(2-sqrt(2))/2, 1/2, 1/sqrt(2), sqrt(2+sqrt(2))/2);
/// otherwise each boundary is bracketed on a scan of the relevant level-
/// crossing function and bisected to 1e-5 in g/omega. Throws BracketError if
/// b2 or b3 cannot be bracketed; missing b1/b4 are reported as absent, not
/// as errors.
[[nodiscard]] BoundarySet regime_boundaries(double delta_ratio);

/// One displaced-Fock component D(displacement)|fock_index> attached to a
/// qubit branch, expanded over bare Fock states 0..cutoff.
struct DisplacedState {
  enum class QubitBranch { right, left };
  QubitBranch branch = QubitBranch::right;
  double displacement = 0.0;
  int fock_index = 0;
  Eigen::VectorXd coefficients;  ///< coefficients[m] = <m|D(displacement)|fock_index>
};

/// Equal-weight superposition of the two branch components, the deep-strong
/// limit of a symmetry-point eigenstate. relative_sign is the sign on the
/// |L> component: +1 (symmetric) for the ground state, -1 (antisymmetric)
/// for the third excited state.
struct DeepStrongState {
  DisplacedState right_component;  ///< |R> carries displacement -g/omega
  DisplacedState left_component;   ///< |L> carries displacement +g/omega
  double relative_sign = 1.0;

  /// Assembled normalized vector in the interleaved basis k = 2n + s.
  [[nodiscard]] Eigen::VectorXd full_vector() const;
};

struct DeepStrongPair {
  DeepStrongState ground;  ///< symmetric combination on Fock 0
  DeepStrongState third;   ///< antisymmetric combination on Fock 1
};

/// Construct the two closed-form states with alpha = g/omega at the given
/// cutoff. Throws ConvergenceError if the cutoff truncates more than 1e-8 of
/// either component's norm. The drive matrix element between the two states
/// vanishes identically (they share even parity).
[[nodiscard]] DeepStrongPair build_deep_strong_states(double g, double omega, int n_fock);

}  // namespace rabispec

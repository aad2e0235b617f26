#pragma once

#include <Eigen/Dense>
#include <utility>

#include "rabispec/errors.hpp"

namespace rabispec {

/// Parameters of the biased Rabi Hamiltonian
///
///   H = -(delta/2) sigma_x - (epsilon/2) sigma_z + omega a^dag a
///       + g sigma_z (a + a^dag)
///
/// with hbar = 1. All four fields share one caller-chosen frequency unit;
/// nothing in the library converts units.
struct ModelParams {
  double delta = 0.0;    ///< qubit gap, >= 0
  double epsilon = 0.0;  ///< qubit bias, signed
  double omega = 1.0;    ///< oscillator frequency, > 0
  double g = 0.0;        ///< coupling strength, >= 0

  /// Throws std::invalid_argument if a field is out of range or non-finite.
  void validate() const;

  [[nodiscard]] double coupling_ratio() const { return g / omega; }
  [[nodiscard]] double delta_ratio() const { return delta / omega; }
};

/// Controls for the adaptive Fock truncation used by converged_eigensystem().
struct TruncationConfig {
  int n_fock = 0;            ///< starting cutoff; 0 selects the (g/omega)^2 heuristic
  double energy_tol = 1e-9;  ///< allowed drift of monitored energies per growth step
  int n_levels_checked = 8;  ///< number of lowest levels monitored
  int max_n_fock = 2048;     ///< hard ceiling for the cutoff

  void validate() const;
};

/// Eigendecomposition of the truncated Hamiltonian.
///
/// Basis ordering is interleaved, k = 2n + s: n is the Fock number and s
/// indexes the sigma_z eigenstates, s=0 for |R> (eigenvalue +1) and s=1 for
/// |L> (eigenvalue -1). Energies ascend; at epsilon = 0 exact degeneracies
/// are resolved deterministically with the even-parity state first.
struct EigenSystem {
  ModelParams params;
  int n_fock = 0;
  Eigen::VectorXd energies;        ///< ascending
  Eigen::MatrixXd vectors;         ///< orthonormal columns
  bool converged = true;

  [[nodiscard]] int dimension() const { return static_cast<int>(energies.size()); }
};

/// Starting Fock cutoff for the given coupling: max(16, ceil(8 (g/omega)^2 + 8)).
/// The displaced-state photon population grows like (g/omega)^2, so the cutoff
/// must scale at least quadratically in the coupling ratio.
[[nodiscard]] int default_n_fock(const ModelParams& params);

/// Assemble the Hamiltonian matrix, dimension 2(n_fock+1), exactly symmetric.
/// n_fock must be >= 1 (a single Fock state cannot represent the coupling).
[[nodiscard]] Eigen::MatrixXd build_hamiltonian(const ModelParams& params, int n_fock);

/// Full eigendecomposition of a symmetric matrix; values ascending, columns
/// orthonormal. Rejects input whose relative asymmetry exceeds 1e-12.
[[nodiscard]] std::pair<Eigen::VectorXd, Eigen::MatrixXd> eigendecompose(
    const Eigen::MatrixXd& h);

/// Build and decompose at a fixed cutoff.
[[nodiscard]] EigenSystem diagonalize(const ModelParams& params, int n_fock);

/// Diagonalize at growing cutoffs (factor 1.5 per step) until the lowest
/// trunc.n_levels_checked energies each move by less than trunc.energy_tol,
/// then return the system at the smaller of the two cutoffs compared.
/// Throws ConvergenceError if trunc.max_n_fock is reached first.
[[nodiscard]] EigenSystem converged_eigensystem(const ModelParams& params,
                                               const TruncationConfig& trunc = {});

/// E_j - E_i, nonnegative; requires 0 <= i < j < dimension.
[[nodiscard]] double transition_frequency(const EigenSystem& eig, int i, int j);

/// |<j|(a + a^dag)|i>| in the truncated basis.
[[nodiscard]] double drive_matrix_element(const EigenSystem& eig, int i, int j);

/// Parity operator sigma_x (x) exp(i pi a^dag a); commutes with H at epsilon=0.
[[nodiscard]] Eigen::MatrixXd parity_operator(int n_fock);

/// Driven operator (a + a^dag) (x) identity on the qubit.
[[nodiscard]] Eigen::MatrixXd drive_operator(int n_fock);

/// <psi_k|P|psi_k>; equals +-1 at epsilon = 0 away from degeneracies.
[[nodiscard]] double parity_expectation(const EigenSystem& eig, int k);

}  // namespace rabispec

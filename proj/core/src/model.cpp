#include "rabispec/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace rabispec {

namespace {

void require(bool condition, const std::string& message) {
  if (!condition) throw std::invalid_argument(message);
}

/// At epsilon = 0 the solver may return an arbitrary mix of the two parity
/// sectors for numerically exact degeneracies. Rotate each degenerate pair
/// onto parity eigenvectors and place the even state first so level labels
/// are deterministic.
void canonicalize_ties(const ModelParams& params, EigenSystem& sys) {
  if (params.epsilon != 0.0) return;
  const double scale = std::max(1.0, sys.energies.cwiseAbs().maxCoeff());
  const double tie_tol = 1e-12 * scale;
  const int dim = sys.dimension();
  for (int k = 0; k + 1 < dim; ++k) {
    if (sys.energies[k + 1] - sys.energies[k] >= tie_tol) continue;
    Eigen::VectorXd va = sys.vectors.col(k);
    Eigen::VectorXd vb = sys.vectors.col(k + 1);
    auto parity_apply = [&](const Eigen::VectorXd& v) {
      Eigen::VectorXd w(v.size());
      for (int n = 0; 2 * n + 1 < v.size(); ++n) {
        const double sign = (n % 2 == 0) ? 1.0 : -1.0;
        w[2 * n] = sign * v[2 * n + 1];
        w[2 * n + 1] = sign * v[2 * n];
      }
      return w;
    };
    const Eigen::VectorXd pa = parity_apply(va);
    const Eigen::VectorXd pb = parity_apply(vb);
    Eigen::Matrix2d block;
    block << va.dot(pa), va.dot(pb), vb.dot(pa), vb.dot(pb);
    block = 0.5 * (block + block.transpose().eval());
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(block);
    // eigenvalues ascend, so column 1 is the even (+1) state; put it first
    Eigen::VectorXd even = es.eigenvectors()(0, 1) * va + es.eigenvectors()(1, 1) * vb;
    Eigen::VectorXd odd = es.eigenvectors()(0, 0) * va + es.eigenvectors()(1, 0) * vb;
    sys.vectors.col(k) = even.normalized();
    sys.vectors.col(k + 1) = odd.normalized();
    ++k;
  }
}

}  // namespace

void ModelParams::validate() const {
  require(std::isfinite(delta) && std::isfinite(epsilon) && std::isfinite(omega) &&
              std::isfinite(g),
          "ModelParams: all fields must be finite");
  require(omega > 0.0, "ModelParams: omega must be positive");
  require(delta >= 0.0, "ModelParams: delta must be nonnegative");
  require(g >= 0.0, "ModelParams: g must be nonnegative");
}

void TruncationConfig::validate() const {
  require(energy_tol > 0.0, "TruncationConfig: energy_tol must be positive");
  require(n_levels_checked >= 1, "TruncationConfig: n_levels_checked must be >= 1");
  require(n_fock >= 0, "TruncationConfig: n_fock must be nonnegative");
  require(max_n_fock >= std::max(n_fock, n_levels_checked),
          "TruncationConfig: max_n_fock too small");
}

int default_n_fock(const ModelParams& params) {
  const double ratio = params.coupling_ratio();
  const int heuristic = static_cast<int>(std::ceil(8.0 * ratio * ratio + 8.0));
  return std::max(16, heuristic);
}

Eigen::MatrixXd build_hamiltonian(const ModelParams& params, int n_fock) {
  params.validate();
  require(n_fock >= 1, "build_hamiltonian: n_fock must be >= 1");
  const int dim = 2 * (n_fock + 1);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  // upper triangle only, mirrored at the end
  for (int n = 0; n <= n_fock; ++n) {
    for (int s = 0; s < 2; ++s) {
      const int k = 2 * n + s;
      const double sz = (s == 0) ? 1.0 : -1.0;
      h(k, k) = params.omega * n - 0.5 * params.epsilon * sz;
      if (n < n_fock)  // g sigma_z (a + a^dag)
        h(k, 2 * (n + 1) + s) = params.g * sz * std::sqrt(n + 1.0);
    }
    h(2 * n, 2 * n + 1) = -0.5 * params.delta;  // -(delta/2) sigma_x
  }
  h.triangularView<Eigen::StrictlyLower>() = h.transpose();
  return h;
}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> eigendecompose(const Eigen::MatrixXd& h) {
  require(h.rows() == h.cols(), "eigendecompose: matrix must be square");
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  const double asym = (h - h.transpose()).cwiseAbs().maxCoeff();
  require(asym <= 1e-12 * scale, "eigendecompose: matrix is not symmetric");
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigendecompose: solver failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

EigenSystem diagonalize(const ModelParams& params, int n_fock) {
  EigenSystem sys;
  sys.params = params;
  sys.n_fock = n_fock;
  auto [values, vectors] = eigendecompose(build_hamiltonian(params, n_fock));
  sys.energies = std::move(values);
  sys.vectors = std::move(vectors);
  canonicalize_ties(params, sys);
  return sys;
}

EigenSystem converged_eigensystem(const ModelParams& params,
                                  const TruncationConfig& trunc) {
  params.validate();
  trunc.validate();
  int n = std::max({default_n_fock(params), trunc.n_fock, trunc.n_levels_checked});
  n = std::min(n, trunc.max_n_fock);
  EigenSystem current = diagonalize(params, n);

  auto monitored = [&](const EigenSystem& sys) {
    const int count = std::min(trunc.n_levels_checked, sys.dimension());
    return std::vector<double>(sys.energies.data(), sys.energies.data() + count);
  };
  std::vector<double> previous = monitored(current);

  while (true) {
    const int next = static_cast<int>(std::ceil(1.5 * n));
    if (next > trunc.max_n_fock) {
      throw ConvergenceError(
          "converged_eigensystem: cutoff ceiling " +
              std::to_string(trunc.max_n_fock) + " reached at n_fock=" +
              std::to_string(n) + " without energy convergence",
          previous, monitored(current));
    }
    EigenSystem bigger = diagonalize(params, next);
    bool settled = true;
    for (int k = 0; k < trunc.n_levels_checked; ++k) {
      if (std::abs(current.energies[k] - bigger.energies[k]) >= trunc.energy_tol) {
        settled = false;
        break;
      }
    }
    if (settled) {
      current.converged = true;
      return current;
    }
    n = next;
    previous = monitored(current);
    current = std::move(bigger);
  }
}

double transition_frequency(const EigenSystem& eig, int i, int j) {
  require(i >= 0 && i < j && j < eig.dimension(),
          "transition_frequency: need 0 <= i < j < dimension");
  return eig.energies[j] - eig.energies[i];
}

double drive_matrix_element(const EigenSystem& eig, int i, int j) {
  require(i >= 0 && j >= 0 && i < eig.dimension() && j < eig.dimension(),
          "drive_matrix_element: level index out of range");
  const Eigen::VectorXd& vi = eig.vectors.col(i);
  const Eigen::VectorXd& vj = eig.vectors.col(j);
  // (x v)[2n+s] = sqrt(n) v[2(n-1)+s] + sqrt(n+1) v[2(n+1)+s]
  double acc = 0.0;
  for (int n = 0; n <= eig.n_fock; ++n) {
    for (int s = 0; s < 2; ++s) {
      const int k = 2 * n + s;
      double xv = 0.0;
      if (n > 0) xv += std::sqrt(static_cast<double>(n)) * vi[2 * (n - 1) + s];
      if (n < eig.n_fock) xv += std::sqrt(n + 1.0) * vi[2 * (n + 1) + s];
      acc += vj[k] * xv;
    }
  }
  return std::abs(acc);
}

Eigen::MatrixXd parity_operator(int n_fock) {
  require(n_fock >= 0, "parity_operator: n_fock must be nonnegative");
  const int dim = 2 * (n_fock + 1);
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(dim, dim);
  for (int n = 0; n <= n_fock; ++n) {
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    p(2 * n, 2 * n + 1) = sign;
    p(2 * n + 1, 2 * n) = sign;
  }
  return p;
}

Eigen::MatrixXd drive_operator(int n_fock) {
  require(n_fock >= 0, "drive_operator: n_fock must be nonnegative");
  const int dim = 2 * (n_fock + 1);
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(dim, dim);
  for (int n = 0; n < n_fock; ++n) {
    const double amp = std::sqrt(n + 1.0);
    for (int s = 0; s < 2; ++s) {
      x(2 * n + s, 2 * (n + 1) + s) = amp;
      x(2 * (n + 1) + s, 2 * n + s) = amp;
    }
  }
  return x;
}

double parity_expectation(const EigenSystem& eig, int k) {
  require(k >= 0 && k < eig.dimension(), "parity_expectation: level out of range");
  const Eigen::VectorXd& v = eig.vectors.col(k);
  double acc = 0.0;
  for (int n = 0; n <= eig.n_fock; ++n) {
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    acc += 2.0 * sign * v[2 * n] * v[2 * n + 1];
  }
  return acc;
}

}  // namespace rabispec

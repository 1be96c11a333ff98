#pragma once
/// @brief Smallest eigenpairs of the linear Robin problem A u = lambda M u
/// with A = a K + beta B and M = b M0 (the p = q = 2 case of the energy).

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "pxrobin/discretization.hpp"
#include "pxrobin/energy.hpp"
#include "pxrobin/error.hpp"
#include "pxrobin/fem.hpp"

namespace pxrobin {

struct EigenPair {
  double value = 0.0;
  NodalVector vector;  // M-orthonormal
};

struct EigenOptions {
  double residual_tol = 1e-12;
  int max_iters = 5000;
  std::uint64_t seed = 0x5eed;
};

/// Block inverse iteration with Rayleigh-Ritz on the pencil (A, M), both
/// symmetric positive definite. Returns the k smallest eigenpairs in
/// increasing order. Converged when every ||A x - lambda M x||_2 is below
/// residual_tol * max(1, lambda).
inline std::vector<EigenPair> generalized_eigs(const SparseMatrix& A, const SparseMatrix& M, int k,
                                               const EigenOptions& opt = {}) {
  const Eigen::Index n = A.rows();
  if (k < 1 || k > n) throw InvalidArgument("eigenpair count must lie in [1, dimension]");
  Eigen::SimplicialLDLT<SparseMatrix> solver(A);
  if (solver.info() != Eigen::Success) throw NumericalError("factorization of the stiffness pencil failed");

  const Eigen::Index m = std::min<Eigen::Index>(n, k + std::max(6, k / 2));
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Eigen::MatrixXd X(n, m);
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index i = 0; i < n; ++i) X(i, j) = unif(rng);

  Eigen::VectorXd vals(m);
  for (int it = 0; it < opt.max_iters; ++it) {
    const Eigen::MatrixXd Y = solver.solve(M * X);
    const Eigen::MatrixXd AY = A * Y;
    const Eigen::MatrixXd MY = M * Y;
    Eigen::MatrixXd Ar = Y.transpose() * AY;
    Eigen::MatrixXd Mr = Y.transpose() * MY;
    Ar = 0.5 * (Ar + Ar.transpose()).eval();
    Mr = 0.5 * (Mr + Mr.transpose()).eval();
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ritz(Ar, Mr);
    if (ritz.info() != Eigen::Success) throw NumericalError("Rayleigh-Ritz step failed");
    X = Y * ritz.eigenvectors();
    vals = ritz.eigenvalues();
    const Eigen::MatrixXd R = AY * ritz.eigenvectors() - MY * ritz.eigenvectors() * vals.asDiagonal();
    bool done = true;
    for (int j = 0; j < k && done; ++j) done = R.col(j).norm() <= opt.residual_tol * std::max(1.0, vals[j]);
    if (done) {
      std::vector<EigenPair> out;
      for (int j = 0; j < k; ++j) {
        NodalVector v = X.col(j);
        v /= std::sqrt(v.dot(M * v));
        Eigen::Index imax;
        v.cwiseAbs().maxCoeff(&imax);
        if (v[imax] < 0.0) v = -v;
        out.push_back({vals[j], std::move(v)});
      }
      return out;
    }
  }
  throw NumericalError("eigen iteration did not converge");
}

/// First k eigenpairs of (a K + beta B) u = lambda b M u with constant coefficients.
inline std::vector<EigenPair> linear_robin_eigs(const Mesh& mesh, double a, double b, double beta, int k,
                                                const EigenOptions& opt = {}) {
  if (!(a > 0.0) || !(b > 0.0) || !(beta > 0.0)) throw InvalidArgument("coefficients must be positive");
  const auto mats = assemble_linear_matrices(mesh);
  const SparseMatrix A = a * mats.K + beta * mats.B;
  const SparseMatrix M = b * mats.M;
  return generalized_eigs(A, M, k, opt);
}

/// b-weighted volume mass matrix with the sampled field b.
inline SparseMatrix weighted_mass(const Discretization& d) { return field_matrix(d, 0.0, 0.0, 1.0); }

/// Eigenpairs of the linearization with the problem's own fields a, b, beta:
/// (a K + beta B) u = lambda (b M) u.
inline std::vector<EigenPair> field_robin_eigs(const Discretization& d, int k, const EigenOptions& opt = {}) {
  return generalized_eigs(field_matrix(d, 1.0, 1.0, 0.0), weighted_mass(d), k, opt);
}

/// Smallest positive root of (k^2 - m^2) sin(m L) + 2 k m cos(m L) = 0, the
/// first Robin frequency of -u'' on an interval of length L with u' = +-k u
/// at the ends. The root lies in (0, pi/L); found by bisection.
inline double robin_interval_frequency(double kappa, double L) {
  if (!(kappa > 0.0) || !(L > 0.0)) throw InvalidArgument("kappa and L must be positive");
  auto F = [&](double m) { return (kappa * kappa - m * m) * std::sin(m * L) + 2.0 * kappa * m * std::cos(m * L); };
  double lo = 0.0, hi = std::numbers::pi / L;
  while (true) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) return mid;
    (F(mid) > 0.0 ? lo : hi) = mid;
  }
}

/// lambda_1 of -a Lap u = lambda b u on a rectangle with a du/dn + beta u = 0,
/// by separation of variables.
inline double separable_robin_eigenvalue(const Rect& r, double a, double b, double beta) {
  const double mx = robin_interval_frequency(beta / a, r.x1 - r.x0);
  const double my = robin_interval_frequency(beta / a, r.y1 - r.y0);
  return a * (mx * mx + my * my) / b;
}

}  // namespace pxrobin

#pragma once
/// @brief Solver results and the small linear-algebra helpers the solvers share.

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "pxrobin/discretization.hpp"
#include "pxrobin/energy.hpp"
#include "pxrobin/fem.hpp"

namespace pxrobin {

enum class Classification { MountainPass, BallMinimizer, LinearEigen, Deflated, LocalMinimizer };

inline const char* to_string(Classification c) {
  switch (c) {
    case Classification::MountainPass: return "MountainPass";
    case Classification::BallMinimizer: return "BallMinimizer";
    case Classification::LinearEigen: return "LinearEigen";
    case Classification::Deflated: return "Deflated";
    case Classification::LocalMinimizer: return "LocalMinimizer";
  }
  return "?";
}

enum class SolveStatus { Converged, IterationCap, Stalled, Diverged, NoNegativeEnergy };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::IterationCap: return "iteration-cap";
    case SolveStatus::Stalled: return "stalled";
    case SolveStatus::Diverged: return "diverged";
    case SolveStatus::NoNegativeEnergy: return "no-negative-energy";
  }
  return "?";
}

struct TraceEntry {
  double J = 0.0;
  double residual = 0.0;
  double beta_norm = 0.0;
};

struct CriticalPoint {
  DiscreteFunction u;
  double J = 0.0;
  double residual = 0.0;
  double beta_norm = 0.0;
  int iterations = 0;
  Classification classification = Classification::LocalMinimizer;
  SolveStatus status = SolveStatus::IterationCap;
  std::vector<TraceEntry> trace;

  bool converged() const noexcept { return status == SolveStatus::Converged; }
};

/// Fills J, residual and beta_norm from the current values of cp.u.
inline void evaluate(const Discretization& d, CriticalPoint& cp) {
  cp.J = J_lambda(d, cp.u.values).J;
  cp.residual = weak_residual(d, cp.u.values);
  cp.beta_norm = beta_norm(d, cp.u.values);
}

inline TraceEntry trace_entry(const Discretization& d, const NodalVector& u, double J, double residual) {
  return {J, residual, beta_norm(d, u)};
}

/// Cached Cholesky factorization of the Sobolev metric S = a K + beta B + b M.
class SobolevPreconditioner {
 public:
  explicit SobolevPreconditioner(const Discretization& d) : S_(sobolev_metric(d)) {
    llt_.compute(S_);
    if (llt_.info() != Eigen::Success) throw NumericalError("Sobolev metric factorization failed");
  }
  NodalVector solve(const NodalVector& g) const { return llt_.solve(g); }
  const SparseMatrix& matrix() const noexcept { return S_; }
  double norm(const NodalVector& v) const { return std::sqrt(v.dot(S_ * v)); }

 private:
  SparseMatrix S_;
  Eigen::SimplicialLLT<SparseMatrix> llt_;
};

/// Solves (H + mu S) x = rhs for the smallest mu in {0, 1e-8, 1e-7, ...}
/// making the shifted matrix positive definite. Empty when none does.
inline std::optional<NodalVector> shifted_newton_solve(const SparseMatrix& H, const SparseMatrix& S,
                                                       const NodalVector& rhs) {
  Eigen::SimplicialLDLT<SparseMatrix> ldlt;
  double mu = 0.0;
  for (int attempt = 0; attempt < 18; ++attempt) {
    const SparseMatrix A = mu > 0.0 ? SparseMatrix(H + mu * S) : H;
    ldlt.compute(A);
    if (ldlt.info() == Eigen::Success && (ldlt.vectorD().array() > 0.0).all()) {
      NodalVector x = ldlt.solve(rhs);
      if (x.allFinite()) return x;
    }
    mu = mu == 0.0 ? 1e-8 : mu * 10.0;
  }
  return std::nullopt;
}

/// Solves the (possibly indefinite) system H x = rhs by sparse LU.
inline std::optional<NodalVector> lu_solve(const SparseMatrix& H, const NodalVector& rhs) {
  Eigen::SparseLU<SparseMatrix> lu;
  SparseMatrix A = H;
  A.makeCompressed();
  lu.compute(A);
  if (lu.info() != Eigen::Success) return std::nullopt;
  NodalVector x = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !x.allFinite()) return std::nullopt;
  return x;
}

}  // namespace pxrobin

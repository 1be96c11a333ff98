#pragma once
/// @brief Energy descent with Armijo backtracking, optionally confined to a
/// closed beta-ball by radial scaling.

#include <cmath>
#include <functional>
#include <limits>

#include "pxrobin/critical_point.hpp"

namespace pxrobin {

struct DescentOptions {
  double tol = 1e-6;
  int max_iters = 500;
  double initial_step = 1.0;
  double backtrack = 0.5;
  double armijo_c = 1e-4;
  /// Use Newton directions (Levenberg-shifted when the Hessian is not
  /// positive definite); otherwise only Sobolev-gradient directions.
  bool newton = true;
  /// The iterate is declared divergent once its beta-norm exceeds this.
  double divergence_norm = 1e8;
  /// Also require a positive definite Hessian before declaring convergence,
  /// so that small-gradient points near a degenerate saddle (such as the
  /// neighbourhood of 0 when q- < 2) are not mistaken for minimizers.
  bool require_positive_hessian = false;
};

namespace descent_detail {

using Projection = std::function<void(NodalVector&)>;

inline bool positive_definite(const SparseMatrix& H) {
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(H);
  return ldlt.info() == Eigen::Success && (ldlt.vectorD().array() > 0.0).all();
}

inline CriticalPoint run(const Discretization& d, NodalVector u, const DescentOptions& opt, const Projection& project,
                         Classification cls) {
  if (opt.tol <= 0.0 || opt.max_iters < 0) throw InvalidArgument("tol must be positive and max_iters nonnegative");
  d.space().check(u);
  if (project) project(u);
  const SobolevPreconditioner pre(d);
  const NodalVector mass = lumped_mass(d);

  CriticalPoint cp;
  cp.classification = cls;
  double J = J_lambda(d, u).J;
  double sobolev_step = opt.initial_step;
  int it = 0;
  for (;; ++it) {
    NodalVector lg, sg;
    assemble_gradient_parts(d, u, lg, sg);
    const NodalVector g = lg - d.lambda() * sg;
    const double res = std::sqrt((g.array().square() / mass.array()).sum());
    cp.trace.push_back(trace_entry(d, u, J, res));
    if (res <= opt.tol && (!opt.require_positive_hessian || positive_definite(J_lambda_hessian(d, u)))) {
      cp.status = SolveStatus::Converged;
      break;
    }
    if (cp.trace.back().beta_norm > opt.divergence_norm || !std::isfinite(J)) {
      cp.status = SolveStatus::Diverged;
      break;
    }
    if (it >= opt.max_iters) {
      cp.status = SolveStatus::IterationCap;
      break;
    }

    NodalVector dir;
    bool newton = false;
    if (opt.newton) {
      if (auto x = shifted_newton_solve(J_lambda_hessian(d, u), pre.matrix(), -g)) {
        dir = std::move(*x);
        newton = g.dot(dir) < 0.0;
      }
    }
    if (!newton) dir = -pre.solve(g);

    double step = newton ? 1.0 : sobolev_step;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt, step *= opt.backtrack) {
      NodalVector trial = u + step * dir;
      if (project) project(trial);
      const double Jt = J_lambda(d, trial).J;
      if (std::isfinite(Jt) && Jt <= J + opt.armijo_c * g.dot(trial - u) && Jt <= J) {
        accepted = true;
        u = std::move(trial);
        J = Jt;
        break;
      }
    }
    if (!accepted) {
      cp.status = SolveStatus::Stalled;
      break;
    }
    if (!newton) sobolev_step = std::min(2.0 * step, 1e6);
  }
  cp.iterations = it;
  cp.u = d.function(std::move(u));
  evaluate(d, cp);
  return cp;
}

}  // namespace descent_detail

/// Unconstrained descent from u0 until the weak residual drops below tol.
/// J is nonincreasing across accepted steps. When J is unbounded below the run
/// ends with status Diverged.
inline CriticalPoint descent_minimize(const Discretization& d, const NodalVector& u0, const DescentOptions& opt = {}) {
  return descent_detail::run(d, u0, opt, nullptr, Classification::LocalMinimizer);
}

/// Scales u back onto the closed beta-ball of radius rho when it lies outside.
inline void project_to_ball(const Discretization& d, NodalVector& u, double rho) {
  const double n = beta_norm(d, u);
  if (n > rho) u *= rho / n;
}

/// Projected descent in the closed beta-ball of radius rho.
inline CriticalPoint ball_descent(const Discretization& d, const NodalVector& u0, double rho,
                                  const DescentOptions& opt = {}) {
  if (!(rho > 0.0)) throw InvalidArgument("ball radius must be positive");
  return descent_detail::run(
      d, u0, opt, [&](NodalVector& v) { project_to_ball(d, v, rho); }, Classification::BallMinimizer);
}

}  // namespace pxrobin

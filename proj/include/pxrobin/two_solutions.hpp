#pragma once
/// @brief A positive-energy mountain-pass solution of one problem and a
/// negative-energy ball minimizer of another.
///
/// The two existence mechanisms need p+ < q- and q- < p- respectively, which
/// no single exponent pair satisfies, so the two solutions come from two
/// separate problems.

#include <cmath>

#include "pxrobin/mountain_pass.hpp"
#include "pxrobin/robin_eigs.hpp"
#include "pxrobin/sublinear.hpp"

namespace pxrobin {

struct TwoSolutionOptions {
  MountainPassOptions mountain;
  int embedding_trials = 4;
  int restarts = 2;
  double lambda_fraction = 0.5;  // lambda of the sublinear problem, relative to lambda*
  std::uint64_t seed = 0;
  int max_iters = 500;
};

struct TwoSolutions {
  CriticalPoint mountain;  // J > 0
  CriticalPoint ball;      // J < 0
  ThresholdEstimate threshold;
  Discretization sub;      // the sublinear problem at the lambda actually used
  double J_abs_mountain = 0.0;  // J(|u|)
  double J_abs_ball = 0.0;
  bool sign_separated() const { return mountain.J > 0.0 && 0.0 > ball.J; }
};

/// Nodal absolute value.
inline NodalVector nodal_abs(const NodalVector& u) { return u.cwiseAbs(); }

inline TwoSolutions two_solutions(const Discretization& super, const Discretization& sub,
                                  const TwoSolutionOptions& opt = {}) {
  require_superlinear(super);
  require_regime(sub, Regime::Sublinear, "q- < p- < q+ < p+");

  const auto first = field_robin_eigs(super, 1).front().vector;
  CriticalPoint mp = mountain_pass(super, first, opt.mountain);

  ThresholdEstimate th = estimate_threshold(sub, opt.embedding_trials, opt.seed);
  Discretization s = sub.with_lambda(opt.lambda_fraction * th.star.lambda_star);
  CriticalPoint ball = ekeland_ball_minimize(s, th.rho, opt.mountain.tol, opt.restarts, opt.seed, opt.max_iters);

  TwoSolutions out{std::move(mp), std::move(ball), th, s, 0.0, 0.0};
  out.J_abs_mountain = J_lambda(super, nodal_abs(out.mountain.u.values)).J;
  out.J_abs_ball = J_lambda(s, nodal_abs(out.ball.u.values)).J;
  return out;
}

}  // namespace pxrobin

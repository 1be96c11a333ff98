#pragma once
/// @brief Small-lambda machinery for q- < p-: the threshold lambda* and the
/// radius gamma, a negative-energy direction near zero, and minimization of J
/// over a closed beta-ball.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "pxrobin/descent.hpp"
#include "pxrobin/sphere.hpp"

namespace pxrobin {

struct LambdaStar {
  double lambda_star = 0.0;
  double gamma = 0.0;
};

/// lambda* = rho^{p+ - q-} / (2 p+) * q- / C2^{q-} and gamma = rho^{p+} / (2 p+).
/// lambda_star() additionally requires 0 < rho < min(1, 1/C2) and 1 < q- < p+;
/// lambda_star_formula() evaluates without checking.
inline LambdaStar lambda_star_formula(double p_plus, double q_minus, double rho, double C2) {
  LambdaStar out;
  out.lambda_star = std::pow(rho, p_plus - q_minus) / (2.0 * p_plus) * q_minus / std::pow(C2, q_minus);
  out.gamma = std::pow(rho, p_plus) / (2.0 * p_plus);
  return out;
}

inline LambdaStar lambda_star(double p_plus, double q_minus, double rho, double C2) {
  if (!(C2 > 0.0)) throw InvalidArgument("C2 must be positive");
  if (!(q_minus > 1.0) || !(q_minus < p_plus)) throw InvalidArgument("lambda* needs 1 < q- < p+");
  if (!(rho > 0.0) || !(rho < std::min(1.0, 1.0 / C2))) throw InvalidArgument("rho must lie in (0, min(1, 1/C2))");
  return lambda_star_formula(p_plus, q_minus, rho, C2);
}

struct ThresholdEstimate {
  EmbeddingEstimate embedding;
  double rho = 0.0;
  LambdaStar star;
};

/// Estimates C2, inflates it, picks rho = min(0.5, 0.9 / C2) and evaluates lambda*.
inline ThresholdEstimate estimate_threshold(const Discretization& d, int trials, std::uint64_t seed = 0) {
  ThresholdEstimate t;
  t.embedding = estimate_embedding_constant(d, trials, seed);
  t.rho = std::min(0.5, 0.9 / t.embedding.inflated);
  t.star = lambda_star(d.regime().p_plus, d.regime().q_minus, t.rho, t.embedding.inflated);
  return t;
}

struct NegativeDirection {
  DiscreteFunction phi;
  double epsilon0 = 0.0;
  std::vector<bool> omega0_mask;
  double delta = 0.0;
  double t_star = 0.0;
  double J_at_t_star = 0.0;
};

inline void require_regime(const Discretization& d, Regime want, const char* hypothesis) {
  if (d.regime().regime != want)
    throw RegimeError(std::string("regime mismatch: requires ") + hypothesis + ", found " + to_string(d.regime().regime));
}

/// Triangles whose volume quadrature points all satisfy q < cut.
inline std::vector<bool> sublevel_triangles(const Discretization& d, double cut) {
  const std::size_t nq = d.space().points_per_triangle();
  std::vector<bool> mask(d.mesh().num_triangles(), false);
  for (std::size_t t = 0; t < mask.size(); ++t) {
    bool inside = true;
    for (std::size_t k = 0; k < nq && inside; ++k) inside = d.q().vol[t * nq + k] < cut;
    mask[t] = inside;
  }
  return mask;
}

/// A beta-normalized bump phi supported near {q < q- + eps0} and a scale t*
/// with J(t* phi) < 0, where eps0 = (p- - q-) / 2.
inline NegativeDirection construct_negative_direction(const Discretization& d) {
  require_regime(d, Regime::Sublinear, "q- < p- < q+ < p+");
  const auto& R = d.regime();
  const FeSpace& space = d.space();
  const Mesh& mesh = d.mesh();
  const auto& vol = space.volume_points();

  NegativeDirection nd;
  nd.epsilon0 = 0.5 * (R.p_minus - R.q_minus);
  const double cut = R.q_minus + nd.epsilon0;
  nd.omega0_mask = sublevel_triangles(d, cut);
  double bx0 = std::numeric_limits<double>::infinity(), by0 = bx0, bx1 = -bx0, by1 = -bx0;
  bool any = false;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    if (!nd.omega0_mask[t]) continue;
    any = true;
    for (std::size_t v : mesh.triangles()[t]) {
      const Point2& P = mesh.vertices()[v];
      bx0 = std::min(bx0, P.x);
      bx1 = std::max(bx1, P.x);
      by0 = std::min(by0, P.y);
      by1 = std::max(by1, P.y);
    }
  }
  if (!any) throw ResolutionError("no triangle lies inside {q < q- + eps0}; refine the mesh");

  NodalVector phi = NodalVector::Zero(d.size());
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    const Point2& P = mesh.vertices()[v];
    if (mesh.is_boundary_vertex(v) || P.x < bx0 || P.x > bx1 || P.y < by0 || P.y > by1) continue;
    const double sx = std::sin(std::numbers::pi * (P.x - bx0) / (bx1 - bx0));
    const double sy = std::sin(std::numbers::pi * (P.y - by0) / (by1 - by0));
    phi[FeSpace::idx(v)] = sx * sx * sy * sy;
  }
  const double n = beta_norm(d, phi);
  if (!(n > 0.0)) throw ResolutionError("bump vanishes at every free vertex; refine the mesh");
  phi /= n;

  double integral = 0.0;
  for (std::size_t i = 0; i < vol.size(); ++i)
    if (nd.omega0_mask[vol[i].triangle])
      integral += vol[i].weight * d.b().vol[i] * abs_pow(space.value_at(phi, vol[i]), d.q().vol[i]);
  nd.delta = 0.9 * std::min(1.0, d.lambda() * R.p_minus / R.q_plus * integral);
  nd.t_star = 0.5 * std::pow(nd.delta, 1.0 / (R.p_minus - R.q_minus - nd.epsilon0));
  nd.J_at_t_star = J_lambda(d, nd.t_star * phi).J;
  if (!(nd.J_at_t_star < 0.0)) throw NumericalError("J(t* phi) is not negative");
  nd.phi = d.function(std::move(phi));
  return nd;
}

/// Minimizes J over the closed beta-ball of radius rho from the negative
/// direction t* phi and `restarts` random starts of the same norm. Returns the
/// lowest-energy converged point with J < 0; otherwise the lowest-energy run
/// with status NoNegativeEnergy.
inline CriticalPoint ekeland_ball_minimize(const Discretization& d, double rho, double tol, int restarts,
                                           std::uint64_t seed = 0, int max_iters = 500) {
  if (!(rho > 0.0)) throw InvalidArgument("rho must be positive");
  if (restarts < 0) throw InvalidArgument("restarts must be nonnegative");
  const NegativeDirection nd = construct_negative_direction(d);
  const SobolevPreconditioner pre(d);
  std::mt19937_64 rng(seed);
  DescentOptions opt;
  opt.tol = tol;
  opt.max_iters = max_iters;
  opt.require_positive_hessian = true;

  std::vector<NodalVector> starts{nd.t_star * nd.phi.values};
  const double r0 = std::min(nd.t_star, 0.5 * rho);
  for (int s = 0; s < restarts; ++s) starts.push_back(retract_to_sphere(d, random_smooth_function(d, pre, rng), r0));

  std::optional<CriticalPoint> best, fallback;
  for (const auto& s : starts) {
    CriticalPoint cp = ball_descent(d, s, rho, opt);
    if (cp.converged() && cp.J < 0.0) {
      if (!best || cp.J < best->J) best = std::move(cp);
    } else if (!fallback || cp.J < fallback->J) {
      fallback = std::move(cp);
    }
  }
  if (best) return *best;
  fallback->status = SolveStatus::NoNegativeEnergy;
  return *fallback;
}

}  // namespace pxrobin

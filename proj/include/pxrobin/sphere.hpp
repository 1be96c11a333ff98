#pragma once
/// @brief Optimization on beta-spheres {u : ||u||_beta = r}, optionally
/// restricted to a linear subspace, and the quantities built on it: the
/// embedding constant estimate and the sphere infimum of J.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "pxrobin/critical_point.hpp"

namespace pxrobin {

struct SphereObjective {
  std::function<double(const NodalVector&)> value;
  std::function<NodalVector(const NodalVector&)> gradient;
};

/// A linear subspace given by a projector P on nodal vectors and its transpose
/// acting on dual vectors. Default: the whole space.
struct Subspace {
  std::function<NodalVector(const NodalVector&)> P;
  std::function<NodalVector(const NodalVector&)> Pt;

  NodalVector project(const NodalVector& x) const { return P ? P(x) : x; }
  NodalVector project_dual(const NodalVector& y) const { return Pt ? Pt(y) : y; }
};

/// M-orthogonal projector onto span(E) (columns M-orthonormal) or onto its
/// M-orthogonal complement.
inline Subspace span_projector(const Eigen::MatrixXd& E, const SparseMatrix& M, bool complement) {
  const Eigen::MatrixXd ME = M * E;
  Subspace s;
  if (complement) {
    s.P = [E, ME](const NodalVector& x) -> NodalVector { return x - E * (ME.transpose() * x); };
    s.Pt = [E, ME](const NodalVector& y) -> NodalVector { return y - ME * (E.transpose() * y); };
  } else {
    s.P = [E, ME](const NodalVector& x) -> NodalVector { return E * (ME.transpose() * x); };
    s.Pt = [E, ME](const NodalVector& y) -> NodalVector { return ME * (E.transpose() * y); };
  }
  return s;
}

struct SphereOptions {
  int max_iters = 400;
  double rel_tol = 1e-13;
  double armijo_c = 1e-4;
};

struct SphereResult {
  NodalVector u;
  double value = 0.0;
  int iterations = 0;
};

/// Scales u onto the beta-sphere of radius r.
inline NodalVector retract_to_sphere(const Discretization& d, const NodalVector& u, double r) {
  const double n = beta_norm(d, u);
  if (!(n > 0.0)) throw InvalidArgument("cannot scale the zero function onto a sphere");
  return u * (r / n);
}

/// Projected preconditioned gradient method on the sphere of radius r,
/// maximizing or minimizing f. The start is scaled onto the sphere but not
/// projected, so a start lying in a nested subspace stays a feasible point.
/// The returned value never falls behind the start value.
inline SphereResult sphere_optimize(const Discretization& d, const SobolevPreconditioner& pre,
                                    const SphereObjective& f, double r, const NodalVector& u0, bool maximize,
                                    const Subspace& sub = {}, const SphereOptions& opt = {}) {
  const double sigma = maximize ? -1.0 : 1.0;
  SphereResult res;
  res.u = retract_to_sphere(d, u0, r);
  double fu = f.value(res.u);
  double step = 1.0;
  int quiet = 0;
  int it = 0;
  for (; it < opt.max_iters; ++it) {
    const NodalVector g = sigma * f.gradient(res.u);
    const double N = beta_norm(d, res.u);
    const NodalVector gN = beta_norm_gradient(d, res.u, N);
    const NodalVector Ttg = g - gN * (res.u.dot(g) / N);
    NodalVector dir = -sub.project(pre.solve(sub.project_dual(Ttg)));
    dir -= res.u * (gN.dot(dir) / N);
    const double slope = g.dot(dir);
    if (!(slope < 0.0)) break;

    bool accepted = false;
    double s = std::min(2.0 * step, 1e8);
    for (int bt = 0; bt < 60; ++bt, s *= 0.5) {
      const NodalVector trial = retract_to_sphere(d, res.u + s * dir, r);
      const double ft = f.value(trial);
      if (std::isfinite(ft) && sigma * ft <= sigma * fu + opt.armijo_c * s * slope) {
        const double gain = sigma * (fu - ft);
        accepted = true;
        step = s;
        res.u = trial;
        quiet = gain <= opt.rel_tol * std::max(1e-300, std::abs(fu)) ? quiet + 1 : 0;
        fu = ft;
        break;
      }
    }
    if (!accepted || quiet >= 3) break;
  }
  res.value = fu;
  res.iterations = it;
  return res;
}

/// Smooth random start: S^{-1} applied to lumped-mass-weighted uniform noise.
inline NodalVector random_smooth_function(const Discretization& d, const SobolevPreconditioner& pre,
                                          std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const NodalVector m = lumped_mass(d);
  NodalVector r(d.size());
  for (Eigen::Index i = 0; i < r.size(); ++i) r[i] = unif(rng) * m[i];
  return pre.solve(r);
}

inline SphereObjective source_norm_objective(const Discretization& d) {
  return {[&d](const NodalVector& u) { return source_norm(d, u); },
          [&d](const NodalVector& u) { return source_norm_gradient(d, u, source_norm(d, u)); }};
}

inline SphereObjective energy_objective(const Discretization& d) {
  return {[&d](const NodalVector& u) { return J_lambda(d, u).J; },
          [&d](const NodalVector& u) { return J_lambda_grad(d, u).g; }};
}

struct EmbeddingEstimate {
  double raw = 0.0;       // best ratio found: a lower bound on the continuum constant
  double inflated = 0.0;  // raw * inflation, the value used downstream
  double inflation = 1.1;
  NodalVector maximizer;
  std::vector<double> trial_ratios;
};

/// Estimates C2 = sup ||u||_{q,b} / ||u||_beta by multi-start projected ascent
/// on the unit beta-sphere.
inline EmbeddingEstimate estimate_embedding_constant(const Discretization& d, int trials, std::uint64_t seed = 0,
                                                     double inflation = 1.1, const SphereOptions& opt = {}) {
  if (trials < 1) throw InvalidArgument("trials must be positive");
  const SobolevPreconditioner pre(d);
  const SphereObjective f = source_norm_objective(d);
  std::mt19937_64 rng(seed);
  EmbeddingEstimate est;
  est.inflation = inflation;
  for (int t = 0; t < trials; ++t) {
    const NodalVector start = random_smooth_function(d, pre, rng);
    SphereResult r = sphere_optimize(d, pre, f, 1.0, start, true, {}, opt);
    est.trial_ratios.push_back(r.value);
    if (r.value > est.raw) {
      est.raw = r.value;
      est.maximizer = std::move(r.u);
    }
  }
  est.inflated = inflation * est.raw;
  return est;
}

struct SphereInfimum {
  double value = 0.0;
  std::vector<NodalVector> points;
  std::vector<double> values;
};

/// Minimum of J over `samples` local minimizations on the beta-sphere of
/// radius rho.
inline SphereInfimum sphere_infimum(const Discretization& d, double rho, int samples, std::uint64_t seed = 0,
                                    const SphereOptions& opt = {}) {
  if (samples < 1) throw InvalidArgument("samples must be positive");
  if (!(rho > 0.0)) throw InvalidArgument("sphere radius must be positive");
  const SobolevPreconditioner pre(d);
  const SphereObjective f = energy_objective(d);
  std::mt19937_64 rng(seed);
  SphereInfimum out;
  out.value = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    SphereResult r = sphere_optimize(d, pre, f, rho, random_smooth_function(d, pre, rng), false, {}, opt);
    out.value = std::min(out.value, r.value);
    out.values.push_back(r.value);
    out.points.push_back(std::move(r.u));
  }
  return out;
}

}  // namespace pxrobin

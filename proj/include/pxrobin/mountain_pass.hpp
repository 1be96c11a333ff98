#pragma once
/// @brief Mountain-pass critical points for p+ < q-.
///
/// The path from 0 to an endpoint e with J(e) < 0 is sampled at n_path
/// images. Its peak is refined by a one-dimensional maximization, then pushed
/// down by a Sobolev-gradient step taken orthogonally to the path; the path is
/// re-laid through the new peak. Once the peak is close to stationary a Newton
/// iteration on J' finishes the job. Previously found solutions can be
/// deflated away, so that the Newton phase is repelled from them and their
/// negatives.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "pxrobin/critical_point.hpp"
#include "pxrobin/sphere.hpp"
#include "pxrobin/sublinear.hpp"

namespace pxrobin {

/// t -> J(t v) and its first two derivatives, from per-quadrature-point data.
class RayProfile {
 public:
  RayProfile(const Discretization& d, const NodalVector& v) : eps_(d.eps()) {
    const FeSpace& space = d.space();
    const auto& vol = space.volume_points();
    const std::size_t nq = space.points_per_triangle();
    for (std::size_t t = 0; t < space.mesh().num_triangles(); ++t) {
      const Vec2 g = space.gradient_on(v, t);
      const double g2 = g.dot(g);
      if (g2 == 0.0) continue;
      for (std::size_t i = t * nq; i < (t + 1) * nq; ++i) grad_.push_back({vol[i].weight * d.a().vol[i], g2, d.p().vol[i]});
    }
    for (std::size_t i = 0; i < vol.size(); ++i) {
      const double m = std::abs(space.value_at(v, vol[i]));
      if (m > 0.0) pow_.push_back({-d.lambda() * vol[i].weight * d.b().vol[i], m, d.q().vol[i]});
    }
    const auto& bnd = space.boundary_points();
    for (std::size_t i = 0; i < bnd.size(); ++i) {
      const double m = std::abs(space.value_at(v, bnd[i]));
      if (m > 0.0) pow_.push_back({bnd[i].weight * d.beta().bnd[i], m, d.p().bnd[i]});
    }
  }

  double value(double t) const {
    double s = 0.0;
    for (const auto& g : grad_) {
      const double r = t * t * g.g2 + eps_ * eps_;
      s += g.w / g.e * (eps_ > 0.0 ? std::pow(r, 0.5 * g.e) - std::pow(eps_, g.e) : std::pow(r, 0.5 * g.e));
    }
    for (const auto& p : pow_) s += p.w / p.e * std::pow(t * p.m, p.e);
    return s;
  }

  /// (phi'(t), phi''(t))
  std::pair<double, double> derivatives(double t) const {
    double d1 = 0.0, d2 = 0.0;
    for (const auto& g : grad_) {
      const double r = t * t * g.g2 + eps_ * eps_;
      const double base = std::pow(r, 0.5 * g.e - 1.0);
      d1 += g.w * t * g.g2 * base;
      d2 += g.w * g.g2 * (base + (g.e - 2.0) * t * t * g.g2 * base / r);
    }
    for (const auto& p : pow_) {
      const double x = t * p.m;
      const double xe2 = std::pow(x, p.e - 2.0);
      d1 += p.w * p.m * xe2 * x;
      d2 += p.w * (p.e - 1.0) * p.m * p.m * xe2;
    }
    return {d1, d2};
  }

  /// The maximizer t* > 0 of t -> J(t v), starting the search at `hint`.
  /// Empty when no sign change of phi' is found (no interior maximum).
  std::optional<double> maximize(double hint = 1.0) const {
    double lo = hint, hi = hint;
    int guard = 0;
    while (derivatives(lo).first <= 0.0) {
      lo *= 0.5;
      if (++guard > 400) return std::nullopt;
    }
    guard = 0;
    while (derivatives(hi).first >= 0.0) {
      hi *= 2.0;
      if (++guard > 400) return std::nullopt;
    }
    double x = 0.5 * (std::log(lo) + std::log(hi));
    double xl = std::log(lo), xh = std::log(hi);
    for (int it = 0; it < 200 && xh - xl > 1e-15 * std::max(1.0, std::abs(x)); ++it) {
      const double t = std::exp(x);
      const auto [d1, d2] = derivatives(t);
      if (d1 > 0.0) xl = x;
      else if (d1 < 0.0) xh = x;
      else return t;
      const double slope = t * d2;  // d/dx phi'(e^x)
      double xn = slope < 0.0 ? x - d1 / slope : 0.5 * (xl + xh);
      if (!(xn > xl && xn < xh)) xn = 0.5 * (xl + xh);
      if (std::abs(xn - x) <= 1e-15 * std::max(1.0, std::abs(x))) return std::exp(xn);
      x = xn;
    }
    return std::exp(0.5 * (xl + xh));
  }

 private:
  struct GradTerm {
    double w, g2, e;
  };
  struct PowTerm {
    double w, m, e;
  };
  double eps_;
  std::vector<GradTerm> grad_;
  std::vector<PowTerm> pow_;
};

/// m(u) = prod_i (||u - u_i||^{-2} + 1)(||u + u_i||^{-2} + 1) in the Sobolev
/// metric; the Newton step is rescaled by 1 / (1 - grad log m . step).
class Deflation {
 public:
  Deflation(const SparseMatrix& S, std::vector<NodalVector> roots) : S_(S), roots_(std::move(roots)) {}

  bool empty() const noexcept { return roots_.empty(); }

  double factor(const NodalVector& u) const {
    double m = 1.0;
    for (const auto& r : roots_)
      for (double s : {-1.0, 1.0}) {
        const NodalVector w = u + s * r;
        m *= 1.0 / w.dot(S_ * w) + 1.0;
      }
    return m;
  }

  NodalVector grad_log(const NodalVector& u) const {
    NodalVector g = NodalVector::Zero(u.size());
    for (const auto& r : roots_)
      for (double s : {-1.0, 1.0}) {
        const NodalVector w = u + s * r;
        const NodalVector Sw = S_ * w;
        const double n2 = w.dot(Sw);
        g += (-2.0 / (n2 * n2)) / (1.0 / n2 + 1.0) * Sw;
      }
    return g;
  }

  /// Smallest Sobolev distance from u to any +-root.
  double distance(const NodalVector& u) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& r : roots_)
      for (double s : {-1.0, 1.0}) {
        const NodalVector w = u + s * r;
        best = std::min(best, std::sqrt(w.dot(S_ * w)));
      }
    return best;
  }

 private:
  SparseMatrix S_;
  std::vector<NodalVector> roots_;
};

struct MountainPassOptions {
  int n_path = 21;
  double tol = 1e-6;
  int max_iters = 500;
  double armijo_c = 1e-4;
  /// Residual below which the Newton phase is attempted; divided by 10 after
  /// each failed attempt.
  double newton_switch = 1e-1;
  /// Previously found solutions to repel.
  std::vector<NodalVector> deflate;
};

namespace mp_detail {

/// Doubles e until J(e) < 0.
inline NodalVector endpoint_beyond(const Discretization& d, NodalVector e) {
  for (int k = 0; k < 200; ++k) {
    if (J_lambda(d, e).J < 0.0) return e;
    e *= 2.0;
  }
  throw GeometryError("no endpoint with negative energy along the ray");
}

/// Samples the segment 0 -> e at n images; returns the interior argmax
/// parameter or throws when the maximum sits at an endpoint.
inline double path_peak(const Discretization& d, const NodalVector& e, int n) {
  double best = 0.0;  // J(0)
  int arg = 0;
  for (int i = 1; i < n; ++i) {
    const double t = static_cast<double>(i) / (n - 1);
    const double J = J_lambda(d, t * e).J;
    if (J > best) {
      best = J;
      arg = i;
    }
  }
  if (arg == 0 || arg == n - 1) throw GeometryError("path maximum collapsed to an endpoint");
  return static_cast<double>(arg) / (n - 1);
}

}  // namespace mp_detail

inline void require_superlinear(const Discretization& d) {
  if (d.regime().regime != Regime::Superlinear)
    throw RegimeError(std::string("regime mismatch: the mountain-pass geometry requires p⁺ < η < q⁻ "
                                  "(some eta with p+ < eta < q-), found ") +
                      to_string(d.regime().regime));
}

/// Mountain-pass critical point from the path 0 -> e. Throws InvalidArgument
/// for n_path < 3, RegimeError outside p+ < q-, GeometryError when the path
/// peak collapses to an endpoint.
inline CriticalPoint mountain_pass(const Discretization& d, const NodalVector& e0,
                                   const MountainPassOptions& opt = {}) {
  if (opt.n_path < 3) throw InvalidArgument("n_path must be at least 3");
  if (opt.tol <= 0.0 || opt.max_iters < 0) throw InvalidArgument("tol must be positive and max_iters nonnegative");
  require_superlinear(d);
  d.space().check(e0);
  if (!(e0.norm() > 0.0)) throw InvalidArgument("path endpoint must be nonzero");

  const SobolevPreconditioner pre(d);
  const SparseMatrix& S = pre.matrix();
  const NodalVector mass = lumped_mass(d);
  const Deflation defl(S, opt.deflate);

  CriticalPoint cp;
  cp.classification = defl.empty() ? Classification::MountainPass : Classification::Deflated;

  NodalVector e = mp_detail::endpoint_beyond(d, e0);
  const double t0 = mp_detail::path_peak(d, e, opt.n_path);
  auto tstar = RayProfile(d, e).maximize(t0);
  if (!tstar) throw GeometryError("no interior maximum along the path");
  NodalVector u = *tstar * e;
  double Ju = J_lambda(d, u).J;
  const double end_scale = 1.0 / *tstar;  // e = end_scale * peak

  auto residual_of = [&](const NodalVector& g) { return std::sqrt((g.array().square() / mass.array()).sum()); };

  double switch_at = opt.newton_switch;
  double step = 1.0;
  int it = 0;
  bool done = false;
  while (!done) {
    NodalVector g = J_lambda_grad(d, u).g;
    double res = residual_of(g);
    cp.trace.push_back(trace_entry(d, u, Ju, res));
    if (res <= opt.tol && (defl.empty() || defl.distance(u) > 10.0 * opt.tol)) {
      cp.status = SolveStatus::Converged;
      break;
    }
    if (it >= opt.max_iters) {
      cp.status = SolveStatus::IterationCap;
      break;
    }

    if (res <= switch_at) {
      // Newton phase on J' with a merit line search on the (deflated) residual.
      NodalVector v = u;
      bool ok = true;
      while (it < opt.max_iters) {
        const NodalVector gv = J_lambda_grad(d, v).g;
        const double rv = residual_of(gv);
        if (rv <= opt.tol) break;
        auto dx = lu_solve(J_lambda_hessian(d, v), -gv);
        if (!dx) {
          ok = false;
          break;
        }
        if (!defl.empty()) {
          const double denom = 1.0 - defl.grad_log(v).dot(*dx);
          if (std::abs(denom) > 1e-12) *dx /= denom;
        }
        const double merit = defl.factor(v) * rv;
        double a = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < 40; ++bt, a *= 0.5) {
          const NodalVector trial = v + a * *dx;
          const double mt = defl.factor(trial) * residual_of(J_lambda_grad(d, trial).g);
          if (std::isfinite(mt) && mt < (1.0 - 1e-4 * a) * merit) {
            v = trial;
            accepted = true;
            break;
          }
        }
        ++it;
        if (!accepted) {
          ok = false;
          break;
        }
        const double Jv = J_lambda(d, v).J;
        cp.trace.push_back(trace_entry(d, v, Jv, residual_of(J_lambda_grad(d, v).g)));
      }
      const double rv = residual_of(J_lambda_grad(d, v).g);
      const bool trivial = beta_norm(d, v) <= 1e-8;
      const bool distinct = defl.empty() || defl.distance(v) > 10.0 * opt.tol;
      if (ok && rv <= opt.tol && !trivial && distinct) {
        u = std::move(v);
        Ju = J_lambda(d, u).J;
        cp.status = SolveStatus::Converged;
        cp.trace.back() = trace_entry(d, u, Ju, rv);
        done = true;
        break;
      }
      switch_at = 0.1 * std::min(switch_at, res);
      if (it >= opt.max_iters) {
        cp.status = SolveStatus::IterationCap;
        break;
      }
      continue;
    }

    // Path-deformation step: descend at the peak orthogonally to the path.
    NodalVector dir = -pre.solve(g);
    dir -= u * (u.dot(S * dir) / u.dot(S * u));
    const double slope = g.dot(dir);
    bool accepted = false;
    double s = std::min(2.0 * step, 1e6);
    for (int bt = 0; bt < 60; ++bt, s *= 0.5) {
      const NodalVector w = u + s * dir;
      const auto tw = RayProfile(d, w).maximize(1.0);
      if (!tw) continue;
      const NodalVector peak = *tw * w;
      const double Jp = J_lambda(d, peak).J;
      if (std::isfinite(Jp) && Jp <= Ju + opt.armijo_c * s * slope) {
        step = s;
        u = peak;
        Ju = Jp;
        accepted = true;
        break;
      }
    }
    ++it;
    if (!accepted) {
      if (switch_at < res) {
        switch_at = 2.0 * res;  // descent is exhausted; let Newton try from here
        continue;
      }
      cp.status = SolveStatus::Stalled;
      break;
    }
    // Re-lay the path through the new peak and confirm its maximum is interior.
    e = mp_detail::endpoint_beyond(d, end_scale * u);
    mp_detail::path_peak(d, e, opt.n_path);
  }

  cp.iterations = it;
  cp.u = d.function(std::move(u));
  evaluate(d, cp);
  return cp;
}

/// Samples J at `samples` random points of the beta-sphere of radius rho.
struct SphereSample {
  double min = 0.0;
  std::vector<double> values;
};

inline SphereSample sphere_barrier(const Discretization& d, double rho, int samples, std::uint64_t seed = 0) {
  if (samples < 1 || !(rho > 0.0)) throw InvalidArgument("sphere sampling needs samples >= 1 and rho > 0");
  const SobolevPreconditioner pre(d);
  std::mt19937_64 rng(seed);
  SphereSample out;
  out.min = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    const double J = J_lambda(d, retract_to_sphere(d, random_smooth_function(d, pre, rng), rho)).J;
    out.values.push_back(J);
    out.min = std::min(out.min, J);
  }
  return out;
}

/// J(t u) for t = 1, 1.5, 2, ..., up to t_max in steps of 0.5; `decreasing`
/// when the sequence is strictly decreasing.
struct RayTrend {
  std::vector<double> t, J;
  bool decreasing = true;
};

inline RayTrend ray_trend(const Discretization& d, const NodalVector& u, double t_max = 4.0) {
  RayTrend r;
  for (double t = 1.0; t <= t_max + 1e-12; t += 0.5) {
    r.t.push_back(t);
    r.J.push_back(J_lambda(d, t * u).J);
    if (r.J.size() > 1 && !(r.J.back() < r.J[r.J.size() - 2])) r.decreasing = false;
  }
  return r;
}

/// A posteriori bound on a (PS)-shaped trace:
/// (1/p+ - 1/eta) ||u_n||^{p-} <= M + ||u_n|| with eta = (p+ + q-)/2 and
/// M = max |J_n|.
struct PsCheck {
  double eta = 0.0;
  double M = 0.0;
  double worst_margin = 0.0;  // min over n of rhs - lhs
  bool holds = true;
};

inline PsCheck ps_bound_check(const Discretization& d, const std::vector<TraceEntry>& trace) {
  require_superlinear(d);
  const auto& R = d.regime();
  PsCheck c;
  c.eta = 0.5 * (R.p_plus + R.q_minus);
  for (const auto& e : trace) c.M = std::max(c.M, std::abs(e.J));
  c.worst_margin = std::numeric_limits<double>::infinity();
  for (const auto& e : trace) {
    const double lhs = (1.0 / R.p_plus - 1.0 / c.eta) * std::pow(e.beta_norm, R.p_minus);
    c.worst_margin = std::min(c.worst_margin, c.M + e.beta_norm - lhs);
  }
  c.holds = c.worst_margin >= 0.0;
  return c;
}

/// Nehari quantity J'(u)(u).
inline double nehari_pairing(const Discretization& d, const NodalVector& u) { return J_lambda_grad(d, u).g.dot(u); }

}  // namespace pxrobin

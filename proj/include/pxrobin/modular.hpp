#pragma once
/// @brief Variable-exponent modulars and their Luxemburg norms.
///
/// A modular is rho(u) = sum_i w_i |u_i|^{e_i} over quadrature points i; the
/// Luxemburg norm is the unique tau > 0 with rho(u / tau) = 1.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "pxrobin/error.hpp"
#include "pxrobin/fem.hpp"

namespace pxrobin {

/// |v|^e computed as exp(e log|v|), with 0 for v = 0.
inline double abs_pow(double v, double e) {
  if (v == 0.0) return 0.0;
  return std::exp(e * std::log(std::abs(v)));
}

/// tau -> rho(u / tau) for one fixed u, stored as (log|u_i|, e_i, w_i) terms.
class ModularClosure {
 public:
  struct Term {
    double log_abs;
    double exponent;
    double weight;
  };

  ModularClosure() = default;

  /// From raw point values: rho = sum w_i |values_i|^{exponents_i}.
  static ModularClosure from_samples(const std::vector<double>& values, const std::vector<double>& exponents,
                                     const std::vector<double>& weights) {
    ModularClosure m;
    for (std::size_t i = 0; i < values.size(); ++i) m.push(values[i], exponents[i], weights[i]);
    return m;
  }

  /// Volume modular: integral of w |u|^p.
  static ModularClosure lebesgue(const FeSpace& space, const NodalVector& u, const SampledField& p,
                                 const SampledField& w) {
    space.check(u);
    ModularClosure m;
    const auto& pts = space.volume_points();
    for (std::size_t i = 0; i < pts.size(); ++i) m.push(space.value_at(u, pts[i]), p.vol[i], pts[i].weight * w.vol[i]);
    return m;
  }

  /// Boundary modular: boundary integral of w |u|^p.
  static ModularClosure boundary(const FeSpace& space, const NodalVector& u, const SampledField& p,
                                 const SampledField& w) {
    space.check(u);
    ModularClosure m;
    const auto& pts = space.boundary_points();
    for (std::size_t i = 0; i < pts.size(); ++i) m.push(space.value_at(u, pts[i]), p.bnd[i], pts[i].weight * w.bnd[i]);
    return m;
  }

  /// Gradient modular: integral of a |grad u|^p.
  static ModularClosure gradient(const FeSpace& space, const NodalVector& u, const SampledField& p,
                                 const SampledField& a) {
    space.check(u);
    ModularClosure m;
    const auto& pts = space.volume_points();
    const std::size_t nq = space.points_per_triangle();
    for (std::size_t t = 0; t < space.mesh().num_triangles(); ++t) {
      const double g = space.gradient_on(u, t).norm();
      for (std::size_t k = 0; k < nq; ++k) {
        const std::size_t i = t * nq + k;
        m.push(g, p.vol[i], pts[i].weight * a.vol[i]);
      }
    }
    return m;
  }

  ModularClosure& operator+=(const ModularClosure& o) {
    terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
    return *this;
  }
  friend ModularClosure operator+(ModularClosure l, const ModularClosure& r) { return l += r; }

  /// rho(u / tau).
  double operator()(double tau) const { return at_log_scale(std::log(tau)); }

  /// rho(e^{-s} u).
  double at_log_scale(double s) const {
    double sum = 0.0;
    for (const Term& t : terms_) sum += t.weight * std::exp(t.exponent * (t.log_abs - s));
    return sum;
  }

  /// True when u vanishes at every point of the closure.
  bool vanishes() const noexcept { return terms_.empty(); }
  const std::vector<Term>& terms() const noexcept { return terms_; }

  /// The common exponent when all terms share one.
  std::optional<double> constant_exponent() const {
    if (terms_.empty()) return std::nullopt;
    const double e = terms_.front().exponent;
    for (const Term& t : terms_)
      if (t.exponent != e) return std::nullopt;
    return e;
  }

  double min_exponent() const {
    double e = std::numeric_limits<double>::infinity();
    for (const Term& t : terms_) e = std::min(e, t.exponent);
    return e;
  }
  double max_exponent() const {
    double e = -std::numeric_limits<double>::infinity();
    for (const Term& t : terms_) e = std::max(e, t.exponent);
    return e;
  }

 private:
  void push(double value, double exponent, double weight) {
    if (value == 0.0 || weight == 0.0) return;
    terms_.push_back({std::log(std::abs(value)), exponent, weight});
  }

  std::vector<Term> terms_;
};

enum class LuxemburgMethod {
  Auto,       ///< closed form for a constant exponent, root finding otherwise
  Bracketing  ///< always root finding
};

/// inf{tau > 0 : rho(u / tau) <= 1}.
///
/// Root finding runs in s = log tau: bracket by doubling tau, then shrink the
/// bracket with Newton steps on log rho(e^{-s} u) (convex and decreasing in s),
/// falling back to bisection whenever a Newton step leaves the bracket.
inline double luxemburg_norm(const ModularClosure& m, LuxemburgMethod method = LuxemburgMethod::Auto) {
  if (m.vanishes()) return 0.0;
  if (method == LuxemburgMethod::Auto) {
    if (auto c = m.constant_exponent()) return std::pow(m(1.0), 1.0 / *c);
  }

  const auto& terms = m.terms();
  std::vector<double> logw(terms.size());
  for (std::size_t i = 0; i < terms.size(); ++i) logw[i] = std::log(terms[i].weight);

  // log rho(e^{-s} u) and its derivative, via a shifted log-sum-exp.
  auto eval = [&](double s, double& deriv) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < terms.size(); ++i)
      mx = std::max(mx, logw[i] + terms[i].exponent * (terms[i].log_abs - s));
    double sum = 0.0, dsum = 0.0;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const double w = std::exp(logw[i] + terms[i].exponent * (terms[i].log_abs - s) - mx);
      sum += w;
      dsum += terms[i].exponent * w;
    }
    deriv = -dsum / sum;
    return mx + std::log(sum);
  };

  constexpr double ln2 = 0.69314718055994530942;
  double d = 0.0;
  double s = 0.0;
  double g = eval(s, d);
  double lo, hi;  // g(lo) > 0 > g(hi)
  if (g == 0.0) return 1.0;
  if (g > 0.0) {
    lo = s;
    for (int k = 0;; ++k) {
      s += ln2;
      g = eval(s, d);
      if (g <= 0.0) break;
      lo = s;
      if (k > 2100) throw NumericalError("luxemburg_norm: no upper bracket");
    }
    hi = s;
  } else {
    hi = s;
    for (int k = 0;; ++k) {
      s -= ln2;
      g = eval(s, d);
      if (g >= 0.0) break;
      hi = s;
      if (k > 2100) throw NumericalError("luxemburg_norm: no lower bracket");
    }
    lo = s;
  }
  if (g == 0.0) return std::exp(s);

  s = lo;
  g = eval(s, d);
  bool converged = false;
  for (int it = 0; it < 200; ++it) {
    double next = (d < 0.0) ? s - g / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - s);
    s = next;
    g = eval(s, d);
    if (g > 0.0) lo = s;
    else if (g < 0.0) hi = s;
    if (g == 0.0 || step <= 1e-15 * std::max(1.0, std::abs(s)) || hi - lo <= 1e-15 * std::max(1.0, std::abs(s))) {
      converged = true;
      break;
    }
  }
  if (!converged) throw NumericalError("luxemburg_norm: root finding did not converge in 200 steps");
  const double tau = std::exp(s);
  const double r = m(tau);
  if (!(std::abs(r - 1.0) <= 1e-10)) throw NumericalError("luxemburg_norm: unit-modular check failed");
  return tau;
}

inline double modular_lebesgue(const FeSpace& space, const NodalVector& u, const SampledField& p,
                               const SampledField& w) {
  return ModularClosure::lebesgue(space, u, p, w)(1.0);
}

inline double modular_boundary(const FeSpace& space, const NodalVector& u, const SampledField& p,
                               const SampledField& w) {
  return ModularClosure::boundary(space, u, p, w)(1.0);
}

inline double modular_gradient(const FeSpace& space, const NodalVector& u, const SampledField& p,
                               const SampledField& a) {
  return ModularClosure::gradient(space, u, p, a)(1.0);
}

inline double modular_lebesgue(const FeSpace& space, const DiscreteFunction& u, const FieldExpr& p,
                               const FieldExpr& w) {
  return modular_lebesgue(space, u.values, space.sample(p), space.sample(w));
}
inline double modular_boundary(const FeSpace& space, const DiscreteFunction& u, const FieldExpr& p,
                               const FieldExpr& w) {
  return modular_boundary(space, u.values, space.sample(p), space.sample(w));
}
inline double modular_gradient(const FeSpace& space, const DiscreteFunction& u, const FieldExpr& p,
                               const FieldExpr& a) {
  return modular_gradient(space, u.values, space.sample(p), space.sample(a));
}

/// Luxemburg norm of u in the weighted volume space L_w^{p}.
inline double lebesgue_norm(const FeSpace& space, const NodalVector& u, const SampledField& p,
                            const SampledField& w) {
  return luxemburg_norm(ModularClosure::lebesgue(space, u, p, w));
}

/// Nodal gradient of u -> integral of w |u|^p.
inline NodalVector modular_lebesgue_gradient(const FeSpace& space, const NodalVector& u, const SampledField& p,
                                             const SampledField& w) {
  NodalVector g = NodalVector::Zero(space.size());
  const auto& pts = space.volume_points();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double v = space.value_at(u, pts[i]);
    if (v == 0.0) continue;
    const double c = pts[i].weight * w.vol[i] * p.vol[i] * abs_pow(v, p.vol[i] - 1.0) * (v > 0 ? 1.0 : -1.0);
    const auto& tri = space.mesh().triangles()[pts[i].triangle];
    for (int k = 0; k < 3; ++k) g[FeSpace::idx(tri[k])] += c * pts[i].shape[k];
  }
  return g;
}

/// Gradient of a Luxemburg norm N(u) from the gradient of its modular at
/// v = u / N: grad N = N rho'(v) / (rho'(v) . v).
inline NodalVector luxemburg_gradient(double norm, const NodalVector& modular_grad_at_v, const NodalVector& v) {
  const double denom = modular_grad_at_v.dot(v);
  if (!(denom > 0.0)) return NodalVector::Zero(v.size());
  return (norm / denom) * modular_grad_at_v;
}

struct RelationVerdict {
  std::string name;
  bool applicable = true;
  bool holds = true;
  std::string detail;
};

/// Checks the norm/modular relations of a weighted variable-exponent
/// Lebesgue space for one function:
///  (i)   ||u|| <,=,> 1  iff  rho(u) <,=,> 1
///  (ii)  ||u|| > 1:  ||u||^{p-} <= rho(u) <= ||u||^{p+}
///  (iii) ||u|| < 1:  ||u||^{p+} <= rho(u) <= ||u||^{p-}
///  (iv)  min(||u||^{p-}, ||u||^{p+}) <= rho(u) <= max(...)
///  (v)   min(rho^{1/p-}, rho^{1/p+}) <= ||u|| <= max(...)
/// Inequalities are tested with relative slack `slack`.
inline std::vector<RelationVerdict> check_modular_norm_relations(const ModularClosure& m, double slack = 1e-9) {
  std::vector<RelationVerdict> out;
  const double rho = m(1.0);
  const double N = luxemburg_norm(m);
  const double pm = m.vanishes() ? 1.0 : m.min_exponent();
  const double pp = m.vanishes() ? 1.0 : m.max_exponent();
  auto le = [slack](double a, double b) { return a <= b + slack * std::max(std::abs(a), std::abs(b)); };
  auto fmt = [](const char* what, double a, double b) {
    return std::string(what) + " " + std::to_string(a) + " vs " + std::to_string(b);
  };

  {
    RelationVerdict v;
    v.name = "(i) trichotomy";
    if (std::abs(N - 1.0) <= 1e-10) v.holds = std::abs(rho - 1.0) <= 1e-9;
    else if (N > 1.0) v.holds = rho > 1.0 - slack;
    else v.holds = rho < 1.0 + slack;
    v.detail = fmt("norm/modular", N, rho);
    out.push_back(v);
  }
  {
    RelationVerdict v;
    v.name = "(ii) norm > 1 bounds";
    v.applicable = N > 1.0;
    if (v.applicable) v.holds = le(std::pow(N, pm), rho) && le(rho, std::pow(N, pp));
    v.detail = fmt("norm/modular", N, rho);
    out.push_back(v);
  }
  {
    RelationVerdict v;
    v.name = "(iii) norm < 1 bounds";
    v.applicable = N < 1.0;
    if (v.applicable) v.holds = le(std::pow(N, pp), rho) && le(rho, std::pow(N, pm));
    v.detail = fmt("norm/modular", N, rho);
    out.push_back(v);
  }
  {
    RelationVerdict v;
    v.name = "(iv) min/max sandwich";
    const double a = std::pow(N, pm), b = std::pow(N, pp);
    v.holds = le(std::min(a, b), rho) && le(rho, std::max(a, b));
    v.detail = fmt("norm/modular", N, rho);
    out.push_back(v);
  }
  {
    RelationVerdict v;
    v.name = "(v) root sandwich";
    const double a = std::pow(rho, 1.0 / pm), b = std::pow(rho, 1.0 / pp);
    v.holds = le(std::min(a, b), N) && le(N, std::max(a, b));
    v.detail = fmt("norm/modular", N, rho);
    out.push_back(v);
  }
  return out;
}

inline std::vector<RelationVerdict> check_modular_norm_relations(const FeSpace& space, const NodalVector& u,
                                                                 const SampledField& p, const SampledField& w,
                                                                 double slack = 1e-9) {
  return check_modular_norm_relations(ModularClosure::lebesgue(space, u, p, w), slack);
}

struct HolderBound {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds() const noexcept { return lhs <= rhs; }
};

/// Hölder estimate for the source pairing:
///   |int b |u|^{q-2} u v| <= 2 || |u|^{q-1} b^{1/r} ||_{r} || v b^{1/q} ||_{q},
/// 1/q + 1/r = 1, both norms unweighted Luxemburg norms over the volume
/// quadrature points.
inline HolderBound holder_pairing_bound(const FeSpace& space, const NodalVector& u, const NodalVector& v,
                                        const SampledField& q, const SampledField& b) {
  space.check(u);
  space.check(v);
  const auto& pts = space.volume_points();
  const std::size_t n = pts.size();
  std::vector<double> f(n), g(n), qexp(n), rexp(n), w(n);
  double lhs = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double uq = space.value_at(u, pts[i]);
    const double vq = space.value_at(v, pts[i]);
    const double qi = q.vol[i];
    const double ri = qi / (qi - 1.0);
    const double sgn = uq > 0 ? 1.0 : (uq < 0 ? -1.0 : 0.0);
    lhs += pts[i].weight * b.vol[i] * abs_pow(uq, qi - 1.0) * sgn * vq;
    f[i] = abs_pow(uq, qi - 1.0) * std::pow(b.vol[i], 1.0 / ri);
    g[i] = vq * std::pow(b.vol[i], 1.0 / qi);
    qexp[i] = qi;
    rexp[i] = ri;
    w[i] = pts[i].weight;
  }
  HolderBound out;
  out.lhs = std::abs(lhs);
  out.rhs = 2.0 * luxemburg_norm(ModularClosure::from_samples(f, rexp, w)) *
            luxemburg_norm(ModularClosure::from_samples(g, qexp, w));
  return out;
}

}  // namespace pxrobin

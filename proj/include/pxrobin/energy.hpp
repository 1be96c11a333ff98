#pragma once
/// @brief The Robin modular I_beta, the beta-norm, the energy J_lambda with its
/// exact discrete gradient and Hessian, the operator L_beta and the weak
/// residual.
///
///   J(u) = int a/p |grad u|^p + int_bd beta/p |u|^p - lambda int b/q |u|^q
///
/// When eps > 0 the gradient integrand is smoothed to
/// a/p ((|grad u|^2 + eps^2)^{p/2} - eps^p); energy, gradient and Hessian all
/// use the same eps.

#include <Eigen/SparseCore>
#include <cmath>
#include <vector>

#include "pxrobin/discretization.hpp"
#include "pxrobin/fem.hpp"
#include "pxrobin/modular.hpp"

namespace pxrobin {

struct EnergyBreakdown {
  double grad_term = 0.0;
  double boundary_term = 0.0;
  double source_term = 0.0;
  double J = 0.0;
};

/// Nodal dual vector of J'(u), with the lumped (b-volume + beta-boundary)
/// mass diagonal used to measure it.
struct GradientVector {
  NodalVector g;
  NodalVector lumped_mass;

  double pair(const NodalVector& v) const { return g.dot(v); }
  /// (g^T M^{-1} g)^{1/2}
  double dual_norm() const { return std::sqrt((g.array().square() / lumped_mass.array()).sum()); }
};

namespace energy_detail {

inline double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

/// |v|^{e-2} v
inline double signed_pow(double v, double e) { return sgn(v) * abs_pow(v, e - 1.0); }

template <class F>
void for_each_triangle(const Discretization& d, const NodalVector& u, F&& f) {
  const FeSpace& space = d.space();
  const std::size_t nq = space.points_per_triangle();
  for (std::size_t t = 0; t < space.mesh().num_triangles(); ++t) f(t, space.gradient_on(u, t), t * nq, nq);
}

inline void scatter_triangle(const FeSpace& space, std::size_t t, const std::array<double, 3>& c, NodalVector& g) {
  const auto& tri = space.mesh().triangles()[t];
  for (int k = 0; k < 3; ++k) g[FeSpace::idx(tri[k])] += c[k];
}

}  // namespace energy_detail

inline ModularClosure beta_closure(const Discretization& d, const NodalVector& u) {
  return ModularClosure::gradient(d.space(), u, d.p(), d.a()) + ModularClosure::boundary(d.space(), u, d.p(), d.beta());
}

/// I_beta(u) = int a |grad u|^p + int_bd beta |u|^p.
inline double I_beta(const Discretization& d, const NodalVector& u) { return beta_closure(d, u)(1.0); }

/// Luxemburg norm of the I_beta modular.
inline double beta_norm(const Discretization& d, const NodalVector& u) { return luxemburg_norm(beta_closure(d, u)); }

/// ||grad u||_{p,a} + ||u||_{p,b}.
inline double sobolev_norm_ab(const Discretization& d, const NodalVector& u) {
  return luxemburg_norm(ModularClosure::gradient(d.space(), u, d.p(), d.a())) +
         luxemburg_norm(ModularClosure::lebesgue(d.space(), u, d.p(), d.b()));
}

inline EnergyBreakdown J_lambda(const Discretization& d, const NodalVector& u) {
  d.space().check(u);
  const FeSpace& space = d.space();
  const auto& vol = space.volume_points();
  const double eps = d.eps();
  EnergyBreakdown e;
  energy_detail::for_each_triangle(d, u, [&](std::size_t, const Vec2& g, std::size_t first, std::size_t nq) {
    const double g2 = g.dot(g);
    for (std::size_t i = first; i < first + nq; ++i) {
      const double p = d.p().vol[i];
      // eps^p ((1 + |g|^2/eps^2)^{p/2} - 1), exactly 0 at g = 0.
      const double val = eps > 0.0 ? std::pow(eps, p) * std::expm1(0.5 * p * std::log1p(g2 / (eps * eps)))
                                   : abs_pow(std::sqrt(g2), p);
      e.grad_term += vol[i].weight * d.a().vol[i] / p * val;
      e.source_term += vol[i].weight * d.b().vol[i] / d.q().vol[i] * abs_pow(space.value_at(u, vol[i]), d.q().vol[i]);
    }
  });
  const auto& bnd = space.boundary_points();
  for (std::size_t i = 0; i < bnd.size(); ++i) {
    const double p = d.p().bnd[i];
    e.boundary_term += bnd[i].weight * d.beta().bnd[i] / p * abs_pow(space.value_at(u, bnd[i]), p);
  }
  e.J = e.grad_term + e.boundary_term - d.lambda() * e.source_term;
  return e;
}

/// L_beta(u) = int a/p |grad u|^p + int_bd beta/p |u|^p.
inline double L_beta(const Discretization& d, const NodalVector& u) {
  const auto e = J_lambda(d, u);
  return e.grad_term + e.boundary_term;
}

/// Row sums of the b-weighted volume mass plus the beta-weighted boundary mass.
inline NodalVector lumped_mass(const Discretization& d) {
  const FeSpace& space = d.space();
  NodalVector m = NodalVector::Zero(space.size());
  const auto& vol = space.volume_points();
  for (std::size_t i = 0; i < vol.size(); ++i) {
    const auto& tri = space.mesh().triangles()[vol[i].triangle];
    for (int k = 0; k < 3; ++k) m[FeSpace::idx(tri[k])] += vol[i].weight * d.b().vol[i] * vol[i].shape[k];
  }
  const auto& bnd = space.boundary_points();
  for (std::size_t i = 0; i < bnd.size(); ++i)
    for (int k = 0; k < 2; ++k) m[FeSpace::idx(bnd[i].v[k])] += bnd[i].weight * d.beta().bnd[i] * bnd[i].shape[k];
  return m;
}

/// Nodal gradient of the (L_beta part, source part) separately:
/// J' = lg - lambda * sg.
inline void assemble_gradient_parts(const Discretization& d, const NodalVector& u, NodalVector& lg, NodalVector& sg) {
  d.space().check(u);
  const FeSpace& space = d.space();
  const auto& vol = space.volume_points();
  const double eps = d.eps();
  lg = NodalVector::Zero(space.size());
  sg = NodalVector::Zero(space.size());
  energy_detail::for_each_triangle(d, u, [&](std::size_t t, const Vec2& g, std::size_t first, std::size_t nq) {
    const auto& grads = space.gradients()[t];
    const double s = std::sqrt(g.dot(g) + eps * eps);
    double coef = 0.0;
    std::array<double, 3> src{0, 0, 0};
    for (std::size_t i = first; i < first + nq; ++i) {
      const double p = d.p().vol[i];
      if (s > 0.0) coef += vol[i].weight * d.a().vol[i] * abs_pow(s, p - 2.0);
      const double c = vol[i].weight * d.b().vol[i] * energy_detail::signed_pow(space.value_at(u, vol[i]), d.q().vol[i]);
      for (int k = 0; k < 3; ++k) src[k] += c * vol[i].shape[k];
    }
    std::array<double, 3> lc{};
    for (int k = 0; k < 3; ++k) lc[k] = coef * g.dot(grads[k]);
    energy_detail::scatter_triangle(space, t, lc, lg);
    energy_detail::scatter_triangle(space, t, src, sg);
  });
  const auto& bnd = space.boundary_points();
  for (std::size_t i = 0; i < bnd.size(); ++i) {
    const double c = bnd[i].weight * d.beta().bnd[i] * energy_detail::signed_pow(space.value_at(u, bnd[i]), d.p().bnd[i]);
    for (int k = 0; k < 2; ++k) lg[FeSpace::idx(bnd[i].v[k])] += c * bnd[i].shape[k];
  }
}

/// Exact gradient of the discrete J_lambda: g . v = J'(u)(v).
inline GradientVector J_lambda_grad(const Discretization& d, const NodalVector& u) {
  NodalVector lg, sg;
  assemble_gradient_parts(d, u, lg, sg);
  return {lg - d.lambda() * sg, lumped_mass(d)};
}

/// <L'_beta(u), v> evaluated directly from its integral form.
inline double L_beta_pairing(const Discretization& d, const NodalVector& u, const NodalVector& v) {
  d.space().check(u);
  d.space().check(v);
  const FeSpace& space = d.space();
  const auto& vol = space.volume_points();
  const double eps = d.eps();
  double sum = 0.0;
  energy_detail::for_each_triangle(d, u, [&](std::size_t t, const Vec2& gu, std::size_t first, std::size_t nq) {
    const Vec2 gv = space.gradient_on(v, t);
    const double s = std::sqrt(gu.dot(gu) + eps * eps);
    if (s == 0.0) return;
    for (std::size_t i = first; i < first + nq; ++i)
      sum += vol[i].weight * d.a().vol[i] * abs_pow(s, d.p().vol[i] - 2.0) * gu.dot(gv);
  });
  const auto& bnd = space.boundary_points();
  for (std::size_t i = 0; i < bnd.size(); ++i)
    sum += bnd[i].weight * d.beta().bnd[i] * energy_detail::signed_pow(space.value_at(u, bnd[i]), d.p().bnd[i]) *
           space.value_at(v, bnd[i]);
  return sum;
}

/// int b |u|^{q-2} u v.
inline double source_pairing(const Discretization& d, const NodalVector& u, const NodalVector& v) {
  const FeSpace& space = d.space();
  const auto& vol = space.volume_points();
  double sum = 0.0;
  for (std::size_t i = 0; i < vol.size(); ++i)
    sum += vol[i].weight * d.b().vol[i] * energy_detail::signed_pow(space.value_at(u, vol[i]), d.q().vol[i]) *
           space.value_at(v, vol[i]);
  return sum;
}

/// <L'(u) - L'(v), u - v>; nonnegative, positive for u != v.
inline double monotonicity_gap(const Discretization& d, const NodalVector& u, const NodalVector& v) {
  const NodalVector w = u - v;
  return L_beta_pairing(d, u, w) - L_beta_pairing(d, v, w);
}

/// Lumped-mass dual norm of J'(u); zero exactly at discrete weak solutions.
inline double weak_residual(const Discretization& d, const NodalVector& u) { return J_lambda_grad(d, u).dual_norm(); }

/// Hessian of the discrete J_lambda. Where a power p < 2 (or q < 2) meets a
/// zero value, the singular coefficient is evaluated at |v| = 1e-12.
inline SparseMatrix J_lambda_hessian(const Discretization& d, const NodalVector& u) {
  using Triplet = Eigen::Triplet<double>;
  const FeSpace& space = d.space();
  const auto& vol = space.volume_points();
  const double eps = d.eps();
  std::vector<Triplet> trips;
  trips.reserve(space.mesh().num_triangles() * 18 + space.boundary_points().size() * 4);
  auto curv = [](double v, double e) {  // (e-1)|v|^{e-2}
    double a = std::abs(v);
    if (a == 0.0) {
      if (e > 2.0) return 0.0;
      if (e == 2.0) return 1.0;
      a = 1e-12;
    }
    return (e - 1.0) * std::exp((e - 2.0) * std::log(a));
  };
  energy_detail::for_each_triangle(d, u, [&](std::size_t t, const Vec2& g, std::size_t first, std::size_t nq) {
    const auto& tri = space.mesh().triangles()[t];
    const auto& grads = space.gradients()[t];
    const double s2 = g.dot(g) + eps * eps;
    double c1 = 0.0, c2 = 0.0;  // a s^{p-2} and a (p-2) s^{p-4}
    std::array<std::array<double, 3>, 3> mass{};
    for (std::size_t i = first; i < first + nq; ++i) {
      const double p = d.p().vol[i];
      const double w = vol[i].weight * d.a().vol[i];
      if (s2 > 0.0) {
        c1 += w * std::pow(s2, 0.5 * (p - 2.0));
        c2 += w * (p - 2.0) * std::pow(s2, 0.5 * (p - 4.0));
      } else if (p == 2.0) {
        c1 += w;
      }
      const double m = -d.lambda() * vol[i].weight * d.b().vol[i] * curv(space.value_at(u, vol[i]), d.q().vol[i]);
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) mass[j][k] += m * vol[i].shape[j] * vol[i].shape[k];
    }
    for (int j = 0; j < 3; ++j) {
      for (int k = 0; k < 3; ++k) {
        const double val = c1 * grads[j].dot(grads[k]) + c2 * g.dot(grads[j]) * g.dot(grads[k]) + mass[j][k];
        trips.emplace_back(FeSpace::idx(tri[j]), FeSpace::idx(tri[k]), val);
      }
    }
  });
  const auto& bnd = space.boundary_points();
  for (std::size_t i = 0; i < bnd.size(); ++i) {
    const double c = bnd[i].weight * d.beta().bnd[i] * curv(space.value_at(u, bnd[i]), d.p().bnd[i]);
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        trips.emplace_back(FeSpace::idx(bnd[i].v[j]), FeSpace::idx(bnd[i].v[k]), c * bnd[i].shape[j] * bnd[i].shape[k]);
  }
  SparseMatrix H(space.size(), space.size());
  H.setFromTriplets(trips.begin(), trips.end());
  return H;
}

/// Linear metric cs a K + cb beta B + cm b M with the sampled fields.
inline SparseMatrix field_matrix(const Discretization& d, double cs, double cb, double cm) {
  using Triplet = Eigen::Triplet<double>;
  const FeSpace& space = d.space();
  const auto& vol = space.volume_points();
  const std::size_t nq = space.points_per_triangle();
  std::vector<Triplet> trips;
  for (std::size_t t = 0; t < space.mesh().num_triangles(); ++t) {
    const auto& tri = space.mesh().triangles()[t];
    const auto& grads = space.gradients()[t];
    for (std::size_t i = t * nq; i < (t + 1) * nq; ++i) {
      const double wa = cs * vol[i].weight * d.a().vol[i];
      const double wb = cm * vol[i].weight * d.b().vol[i];
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          trips.emplace_back(FeSpace::idx(tri[j]), FeSpace::idx(tri[k]),
                             wa * grads[j].dot(grads[k]) + wb * vol[i].shape[j] * vol[i].shape[k]);
    }
  }
  const auto& bnd = space.boundary_points();
  for (std::size_t i = 0; i < bnd.size(); ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        trips.emplace_back(FeSpace::idx(bnd[i].v[j]), FeSpace::idx(bnd[i].v[k]),
                           cb * bnd[i].weight * d.beta().bnd[i] * bnd[i].shape[j] * bnd[i].shape[k]);
  SparseMatrix S(space.size(), space.size());
  S.setFromTriplets(trips.begin(), trips.end());
  return S;
}

/// The Sobolev metric a K + beta B + b M.
inline SparseMatrix sobolev_metric(const Discretization& d) { return field_matrix(d, 1.0, 1.0, 1.0); }

/// Nodal gradient of u -> I_beta(u) (the modular, not the norm).
inline NodalVector I_beta_gradient(const Discretization& d, const NodalVector& u) {
  const FeSpace& space = d.space();
  const auto& vol = space.volume_points();
  NodalVector out = NodalVector::Zero(space.size());
  energy_detail::for_each_triangle(d, u, [&](std::size_t t, const Vec2& g, std::size_t first, std::size_t nq) {
    const double s = g.norm();
    if (s == 0.0) return;
    double coef = 0.0;
    for (std::size_t i = first; i < first + nq; ++i)
      coef += vol[i].weight * d.a().vol[i] * d.p().vol[i] * abs_pow(s, d.p().vol[i] - 2.0);
    const auto& grads = space.gradients()[t];
    energy_detail::scatter_triangle(space, t, {coef * g.dot(grads[0]), coef * g.dot(grads[1]), coef * g.dot(grads[2])},
                                    out);
  });
  const auto& bnd = space.boundary_points();
  for (std::size_t i = 0; i < bnd.size(); ++i) {
    const double c = bnd[i].weight * d.beta().bnd[i] * d.p().bnd[i] *
                     energy_detail::signed_pow(space.value_at(u, bnd[i]), d.p().bnd[i]);
    for (int k = 0; k < 2; ++k) out[FeSpace::idx(bnd[i].v[k])] += c * bnd[i].shape[k];
  }
  return out;
}

/// Gradient of the beta-norm at u != 0.
inline NodalVector beta_norm_gradient(const Discretization& d, const NodalVector& u, double norm) {
  const NodalVector v = u / norm;
  return luxemburg_gradient(norm, I_beta_gradient(d, v), v);
}

/// Gradient of ||u||_{q,b} at u != 0.
inline NodalVector source_norm_gradient(const Discretization& d, const NodalVector& u, double norm) {
  const NodalVector v = u / norm;
  return luxemburg_gradient(norm, modular_lebesgue_gradient(d.space(), v, d.q(), d.b()), v);
}

/// ||u||_{q,b}
inline double source_norm(const Discretization& d, const NodalVector& u) {
  return lebesgue_norm(d.space(), u, d.q(), d.b());
}

}  // namespace pxrobin

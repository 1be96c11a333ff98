#pragma once
// Reference values computed without the library's assembly or solvers.

#include <Eigen/Sparse>
#include <cmath>
#include <numbers>
#include <vector>

#include "pxrobin/geometry.hpp"

namespace oracle {

// First Robin frequency of -u'' = mu^2 u on (0, L) with u' = kappa u at 0 and
// u' = -kappa u at L. Written in phase form mu L + 2 atan(mu / kappa) = pi
// (strictly increasing in mu) and solved with Newton from mu = pi / (2 L).
inline double robin_frequency(double kappa, double L) {
  double mu = std::numbers::pi / (2.0 * L);
  for (int it = 0; it < 100; ++it) {
    const double f = mu * L + 2.0 * std::atan(mu / kappa) - std::numbers::pi;
    const double df = L + 2.0 * kappa / (kappa * kappa + mu * mu);
    const double step = f / df;
    mu -= step;
    if (std::abs(step) <= 1e-16 * mu) break;
  }
  return mu;
}

// lambda_1 of -a Lap u = lambda b u on [0,Lx] x [0,Ly] with a du/dn + beta u = 0.
inline double rect_robin_lambda1(double Lx, double Ly, double a, double b, double beta) {
  const double mx = robin_frequency(beta / a, Lx), my = robin_frequency(beta / a, Ly);
  return a * (mx * mx + my * my) / b;
}

// Scalar bisection on a bracketing interval.
template <class F>
double bisect(F f, double lo, double hi) {
  double flo = f(lo);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    const double fm = f(mid);
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// P1 stiffness, boundary mass and volume mass from the closed-form element
// matrices (no quadrature).
struct P1Matrices {
  Eigen::SparseMatrix<double> K, B, M;
};

inline P1Matrices p1_matrices(const pxrobin::Mesh& mesh) {
  using T = Eigen::Triplet<double>;
  std::vector<T> k, b, m;
  const auto& V = mesh.vertices();
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    double ex[3], ey[3];
    for (int i = 0; i < 3; ++i) {
      const auto& p1 = V[tri[(i + 1) % 3]];
      const auto& p2 = V[tri[(i + 2) % 3]];
      ex[i] = p2.x - p1.x;  // edge opposite vertex i
      ey[i] = p2.y - p1.y;
    }
    const double area = 0.5 * std::abs(ex[2] * ey[0] - ey[2] * ex[0]);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const auto I = static_cast<int>(tri[i]), J = static_cast<int>(tri[j]);
        k.emplace_back(I, J, (ex[i] * ex[j] + ey[i] * ey[j]) / (4.0 * area));
        m.emplace_back(I, J, area / 12.0 * (i == j ? 2.0 : 1.0));
      }
  }
  for (const auto& e : mesh.boundary_edges()) {
    const double len = mesh.edge_length(e);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        b.emplace_back(static_cast<int>(e.v[i]), static_cast<int>(e.v[j]), len / 6.0 * (i == j ? 2.0 : 1.0));
  }
  const auto n = static_cast<int>(mesh.num_vertices());
  P1Matrices out;
  out.K.resize(n, n);
  out.B.resize(n, n);
  out.M.resize(n, n);
  out.K.setFromTriplets(k.begin(), k.end());
  out.B.setFromTriplets(b.begin(), b.end());
  out.M.setFromTriplets(m.begin(), m.end());
  return out;
}

}  // namespace oracle

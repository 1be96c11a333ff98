#pragma once
/// @brief Finite-depth diagnostics for the symmetric minimax over nested
/// subspaces, and a deflated multi-solution search.
///
/// Y_k is spanned by the first k eigenfunctions of the linearized operator
/// (a K + beta B, b M) and Z_k is its M-orthogonal complement. For each k:
///   alpha_k = max { ||u||_{q,b} : u in Z_k, ||u||_beta = 1 }
///   gamma_k = (lambda q+ alpha_k^{q+})^{1/(p- - q+)},  eta_k = 2 gamma_k
///   b_k     = min { J(u) : u in Z_k, ||u||_beta = gamma_k }
///   a_k     = max { J(u) : u in Y_k, ||u||_beta = eta_k }
/// alpha is computed from k = k_max down to 1, each run warm-started at the
/// previous maximizer, which lies in Z_{k+1} and hence in Z_k; alpha is
/// therefore nonincreasing in k by construction.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "pxrobin/mountain_pass.hpp"
#include "pxrobin/robin_eigs.hpp"
#include "pxrobin/sphere.hpp"

namespace pxrobin {

struct FountainOptions {
  int random_starts = 1;
  std::uint64_t seed = 0;
  SphereOptions sphere{200, 1e-10, 1e-4};
};

struct FountainDiagnostics {
  int k_max = 0;
  std::vector<double> eigenvalues;
  std::vector<double> alpha;
  std::vector<double> gamma;
  std::vector<double> eta;
  std::vector<double> b_lower;  // computed b_k (an upper estimate of the infimum)
  std::vector<double> b_bound;  // (1/p+ - 1/q+)(lambda q+ alpha_k^{q+})^{p-/(p- - q+)}
  std::vector<double> a_upper;  // computed a_k
  /// Smallest radius s * gamma_k, s in {2, 4, 8, ..., 256}, at which the
  /// computed maximum of J over the Y_k sphere is <= 0; -1 when none is.
  std::vector<double> eta_sufficient;

  bool alpha_nonincreasing() const {
    for (std::size_t k = 1; k < alpha.size(); ++k)
      if (alpha[k] > alpha[k - 1]) return false;
    return true;
  }
  bool a_nonpositive() const {
    return std::all_of(a_upper.begin(), a_upper.end(), [](double a) { return a <= 0.0; });
  }
};

inline FountainDiagnostics fountain_diagnostics(const Discretization& d, int k_max, const FountainOptions& opt = {}) {
  require_superlinear(d);
  if (k_max < 1 || k_max + 1 >= d.size()) throw InvalidArgument("k_max must lie in [1, dimension - 2]");
  const auto& R = d.regime();
  const SobolevPreconditioner pre(d);
  const SparseMatrix M = weighted_mass(d);
  const auto pairs = field_robin_eigs(d, k_max + 1);
  Eigen::MatrixXd E(d.size(), k_max + 1);
  for (int j = 0; j <= k_max; ++j) E.col(j) = pairs[j].vector;

  std::mt19937_64 rng(opt.seed);
  FountainDiagnostics fd;
  fd.k_max = k_max;
  for (int j = 0; j < k_max; ++j) fd.eigenvalues.push_back(pairs[j].value);
  fd.alpha.assign(k_max, 0.0);
  fd.gamma.assign(k_max, 0.0);
  fd.eta.assign(k_max, 0.0);
  fd.b_lower.assign(k_max, 0.0);
  fd.b_bound.assign(k_max, 0.0);
  fd.a_upper.assign(k_max, 0.0);
  fd.eta_sufficient.assign(k_max, -1.0);

  const SphereObjective ratio = source_norm_objective(d);
  const SphereObjective energy = energy_objective(d);
  std::vector<NodalVector> alpha_argmax(k_max);
  NodalVector warm;
  for (int k = k_max; k >= 1; --k) {
    const Subspace Z = span_projector(E.leftCols(k), M, true);
    std::vector<NodalVector> starts;
    if (warm.size()) starts.push_back(warm);
    starts.push_back(E.col(k));
    for (int r = 0; r < opt.random_starts; ++r) starts.push_back(Z.project(random_smooth_function(d, pre, rng)));
    SphereResult best;
    best.value = -1.0;
    for (const auto& s : starts) {
      SphereResult r = sphere_optimize(d, pre, ratio, 1.0, s, true, Z, opt.sphere);
      if (r.value > best.value) best = std::move(r);
    }
    fd.alpha[k - 1] = best.value;
    alpha_argmax[k - 1] = best.u;
    warm = std::move(best.u);
  }

  for (int k = 1; k <= k_max; ++k) {
    const double a = fd.alpha[k - 1];
    const double base = d.lambda() * R.q_plus * std::pow(a, R.q_plus);
    fd.gamma[k - 1] = std::pow(base, 1.0 / (R.p_minus - R.q_plus));
    fd.eta[k - 1] = 2.0 * fd.gamma[k - 1];
    fd.b_bound[k - 1] = (1.0 / R.p_plus - 1.0 / R.q_plus) * std::pow(base, R.p_minus / (R.p_minus - R.q_plus));

    const Subspace Z = span_projector(E.leftCols(k), M, true);
    double bk = std::numeric_limits<double>::infinity();
    for (const NodalVector& s : {alpha_argmax[k - 1], NodalVector(E.col(k))})
      bk = std::min(bk, sphere_optimize(d, pre, energy, fd.gamma[k - 1], s, false, Z, opt.sphere).value);
    fd.b_lower[k - 1] = bk;

    const Subspace Y = span_projector(E.leftCols(k), M, false);
    std::vector<NodalVector> starts{E.col(0), E.col(k - 1)};
    if (k > 1) starts.push_back(E.leftCols(k).rowwise().sum());
    for (int r = 0; r < opt.random_starts; ++r) starts.push_back(Y.project(random_smooth_function(d, pre, rng)));
    auto max_on_sphere = [&](double r) {
      double best = -std::numeric_limits<double>::infinity();
      for (const auto& s : starts) best = std::max(best, sphere_optimize(d, pre, energy, r, s, true, Y, opt.sphere).value);
      return best;
    };
    fd.a_upper[k - 1] = max_on_sphere(fd.eta[k - 1]);
    if (fd.a_upper[k - 1] <= 0.0) {
      fd.eta_sufficient[k - 1] = fd.eta[k - 1];
    } else {
      for (double f = 4.0; f <= 256.0; f *= 2.0) {
        if (max_on_sphere(f * fd.gamma[k - 1]) <= 0.0) {
          fd.eta_sufficient[k - 1] = f * fd.gamma[k - 1];
          break;
        }
      }
    }
  }
  return fd;
}

struct MultiplicityResult {
  std::vector<CriticalPoint> points;  // increasing J
  bool complete = false;
};

/// Up to `count` distinct critical points from mountain-pass runs with
/// endpoints along successive eigenfunctions, each run deflating the
/// solutions already found. Distinct means ||u_i - u_j||_beta and
/// ||u_i + u_j||_beta both exceed 10 tol.
inline MultiplicityResult multiplicity_search(const Discretization& d, int count, const MountainPassOptions& base = {},
                                              int max_directions = 0) {
  if (count < 0) throw InvalidArgument("count must be nonnegative");
  MultiplicityResult out;
  if (count == 0) {
    out.complete = true;
    return out;
  }
  require_superlinear(d);
  const int dirs = std::min<Eigen::Index>(max_directions > 0 ? max_directions : count + 6, d.size() - 1);
  const auto pairs = field_robin_eigs(d, dirs);
  auto distinct = [&](const NodalVector& u) {
    for (const auto& cp : out.points) {
      if (beta_norm(d, u - cp.u.values) <= 10.0 * base.tol) return false;
      if (beta_norm(d, u + cp.u.values) <= 10.0 * base.tol) return false;
    }
    return true;
  };
  for (int k = 0; k < dirs && static_cast<int>(out.points.size()) < count; ++k) {
    MountainPassOptions opt = base;
    for (const auto& cp : out.points) opt.deflate.push_back(cp.u.values);
    // The peak-descent phase does not see the deflation and slides back to
    // the solutions already found, so deflated runs go to Newton directly.
    if (!opt.deflate.empty()) opt.newton_switch = std::numeric_limits<double>::infinity();
    CriticalPoint cp;
    try {
      cp = mountain_pass(d, pairs[k].vector, opt);
    } catch (const GeometryError&) {
      continue;
    }
    if (cp.converged() && cp.J > 0.0 && distinct(cp.u.values)) out.points.push_back(std::move(cp));
  }
  std::stable_sort(out.points.begin(), out.points.end(),
                   [](const CriticalPoint& a, const CriticalPoint& b) { return a.J < b.J; });
  out.complete = static_cast<int>(out.points.size()) == count;
  return out;
}

}  // namespace pxrobin

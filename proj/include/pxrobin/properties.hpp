#pragma once
/// @brief Randomized property checks of the modular, norm and energy layers.
/// Each check reports pass/fail with its worst observed discrepancy.

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "pxrobin/discretization.hpp"
#include "pxrobin/energy.hpp"
#include "pxrobin/modular.hpp"

namespace pxrobin {

struct CheckResult {
  CheckResult() = default;
  explicit CheckResult(std::string n) : name(std::move(n)) {}

  std::string name;
  bool pass = true;
  int trials = 0;
  double worst = 0.0;  // largest violation measure seen (0 when none)
  std::string detail;
};

/// Uniform(-1, 1) nodal values times 10^{Uniform(-log_span, log_span)}.
inline NodalVector random_nodal(Eigen::Index n, std::mt19937_64& rng, double log_span = 2.0) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const double scale = std::pow(10.0, log_span * unif(rng));
  NodalVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = scale * unif(rng);
  return v;
}

namespace property_detail {

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

inline void note(CheckResult& c, double violation, double limit) {
  ++c.trials;
  c.worst = std::max(c.worst, violation);
  if (!(violation <= limit)) c.pass = false;
}

}  // namespace property_detail

/// Variable-exponent Lebesgue-space checks for one (p, w) pair on a space:
/// norm/modular relations (i)-(v), absolute homogeneity of all modular kinds
/// and their sum, and the unit-modular identity.
inline std::vector<CheckResult> modular_suite(const FeSpace& space, const FieldExpr& p, const FieldExpr& w,
                                              int functions, std::mt19937_64& rng, const std::string& label) {
  using property_detail::note;
  using property_detail::rel;
  const SampledField ps = space.sample(p), ws = space.sample(w);
  CheckResult relations{label + ": norm-modular relations (i)-(v)"};
  CheckResult homogeneity{label + ": absolute homogeneity |t| for t in {-3,-1,0.5,2}"};
  CheckResult unit{label + ": unit modular rho(u/||u||) = 1"};
  for (int f = 0; f < functions; ++f) {
    const NodalVector u = random_nodal(space.size(), rng);
    const ModularClosure vol = ModularClosure::lebesgue(space, u, ps, ws);
    for (const auto& v : check_modular_norm_relations(vol)) {
      ++relations.trials;
      if (v.applicable && !v.holds) {
        relations.pass = false;
        relations.detail = v.name + ": " + v.detail;
      }
    }
    const ModularClosure kinds[] = {vol, ModularClosure::boundary(space, u, ps, ws),
                                    ModularClosure::gradient(space, u, ps, ws),
                                    vol + ModularClosure::boundary(space, u, ps, ws) +
                                        ModularClosure::gradient(space, u, ps, ws)};
    for (const auto& m : kinds) {
      const double N = luxemburg_norm(m);
      note(unit, std::abs(m(N) - 1.0), 1e-10);
    }
    for (double t : {-3.0, -1.0, 0.5, 2.0}) {
      const NodalVector tu = t * u;
      const double pairs[4][2] = {
          {lebesgue_norm(space, tu, ps, ws), lebesgue_norm(space, u, ps, ws)},
          {luxemburg_norm(ModularClosure::boundary(space, tu, ps, ws)),
           luxemburg_norm(ModularClosure::boundary(space, u, ps, ws))},
          {luxemburg_norm(ModularClosure::gradient(space, tu, ps, ws)),
           luxemburg_norm(ModularClosure::gradient(space, u, ps, ws))},
          {luxemburg_norm(ModularClosure::lebesgue(space, tu, ps, ws) + ModularClosure::boundary(space, tu, ps, ws) +
                          ModularClosure::gradient(space, tu, ps, ws)),
           luxemburg_norm(kinds[3])}};
      for (const auto& pr : pairs) note(homogeneity, rel(pr[0], std::abs(t) * pr[1]), 1e-9);
    }
  }
  return {relations, homogeneity, unit};
}

/// For a constant exponent c: ||u|| = rho(u)^{1/c}.
inline CheckResult constant_exponent_collapse(const FeSpace& space, double c, int functions, std::mt19937_64& rng) {
  CheckResult r{"constant-exponent collapse ||u|| = rho^{1/p}"};
  const SampledField ps = space.sample(FieldExpr::constant(c));
  const SampledField ws = space.sample(FieldExpr::parse("1 + x*y"));
  for (int f = 0; f < functions; ++f) {
    const NodalVector u = random_nodal(space.size(), rng);
    const ModularClosure m = ModularClosure::lebesgue(space, u, ps, ws);
    property_detail::note(r, property_detail::rel(luxemburg_norm(m), std::pow(m(1.0), 1.0 / c)), 1e-10);
  }
  return r;
}

/// Relations between I_beta and the beta-norm on random functions, and the
/// trend checks along u/k and k u for k = 1..12.
inline std::vector<CheckResult> ibeta_suite(const Discretization& d, int functions, std::mt19937_64& rng,
                                            double slack = 1e-9) {
  const double pm = d.regime().p_minus, pp = d.regime().p_plus;
  auto le = [slack](double a, double b) { return a <= b + slack * std::max(std::abs(a), std::abs(b)); };
  CheckResult rel{"I_beta relations: norm >= 1, norm <= 1 and min/max sandwich"};
  CheckResult to_zero{"I_beta(u - u_k) -> 0 iff ||u - u_k||_beta -> 0 along u_k = (1 - 1/k) u"};
  CheckResult to_inf{"I_beta(k u) -> infinity iff ||k u||_beta -> infinity"};
  for (int f = 0; f < functions; ++f) {
    const NodalVector u = random_nodal(d.size(), rng);
    const double N = beta_norm(d, u), I = I_beta(d, u);
    bool ok = true;
    if (N >= 1.0) ok = ok && le(std::pow(N, pm), I) && le(I, std::pow(N, pp));
    if (N <= 1.0) ok = ok && le(std::pow(N, pp), I) && le(I, std::pow(N, pm));
    ok = ok && le(std::min(std::pow(N, pm), std::pow(N, pp)), I) && le(I, std::max(std::pow(N, pm), std::pow(N, pp)));
    ++rel.trials;
    if (!ok) {
      rel.pass = false;
      rel.detail = "norm " + std::to_string(N) + ", I_beta " + std::to_string(I);
    }
  }
  for (int f = 0; f < 3; ++f) {
    const NodalVector u = random_nodal(d.size(), rng, 1.0);
    double pI = std::numeric_limits<double>::infinity(), pN = pI, qI = -pI, qN = -pI;
    for (int k = 1; k <= 12; ++k) {
      const NodalVector diff = u / static_cast<double>(k);
      const double I = I_beta(d, diff), N = beta_norm(d, diff);
      ++to_zero.trials;
      if (!(I < pI && N < pN)) to_zero.pass = false;
      pI = I;
      pN = N;
      const NodalVector big = static_cast<double>(k) * u;
      const double Ib = I_beta(d, big), Nb = beta_norm(d, big);
      ++to_inf.trials;
      if (!(Ib > qI && Nb > qN)) to_inf.pass = false;
      qI = Ib;
      qN = Nb;
    }
    // Decay and growth must be of power type: I ~ N^{p} between p- and p+.
    const NodalVector last = u / 12.0, first = u;
    const double ratioN = beta_norm(d, last) / beta_norm(d, first);
    if (!(std::abs(ratioN - 1.0 / 12.0) <= 1e-9)) to_zero.pass = false;
    if (!(I_beta(d, last) <= std::pow(1.0 / 12.0, pm) * I_beta(d, first) * (1 + slack))) to_zero.pass = false;
    if (!(I_beta(d, 12.0 * u) >= std::pow(12.0, pm) * I_beta(d, u) * (1 - slack))) to_inf.pass = false;
  }
  return {rel, to_zero, to_inf};
}

/// Central differences (J(u + h v) - J(u - h v)) / 2h against g . v.
inline CheckResult gradient_exactness(const Discretization& d, int trials, std::mt19937_64& rng, double h = 1e-6,
                                      double limit = 1e-5) {
  CheckResult r{"central differences match J' (h = 1e-6, relative error <= 1e-5)"};
  for (int t = 0; t < trials; ++t) {
    const NodalVector u = random_nodal(d.size(), rng, 0.0);
    const NodalVector v = random_nodal(d.size(), rng, 0.0);
    const double fd = (J_lambda(d, u + h * v).J - J_lambda(d, u - h * v).J) / (2.0 * h);
    const double an = J_lambda_grad(d, u).g.dot(v);
    property_detail::note(r, std::abs(fd - an) / std::max(std::abs(an), 1e-12), limit);
  }
  return r;
}

/// J'(u)(v) = <L'(u), v> - lambda int b |u|^{q-2} u v; strict monotonicity of
/// L'; evenness of J and J(0) = 0.
inline std::vector<CheckResult> energy_identity_suite(const Discretization& d, int trials, std::mt19937_64& rng) {
  CheckResult dec{"J' = L' - lambda * source pairing"};
  CheckResult mono{"<L'(u) - L'(v), u - v> > 0 for u != v"};
  CheckResult even{"J(-u) = J(u) and J(0) = 0"};
  for (int t = 0; t < trials; ++t) {
    const NodalVector u = random_nodal(d.size(), rng, 0.5);
    const NodalVector v = random_nodal(d.size(), rng, 0.5);
    const double lhs = J_lambda_grad(d, u).g.dot(v);
    const double rhs = L_beta_pairing(d, u, v) - d.lambda() * source_pairing(d, u, v);
    const double scale = std::abs(L_beta_pairing(d, u, v)) + d.lambda() * std::abs(source_pairing(d, u, v));
    property_detail::note(dec, std::abs(lhs - rhs) / std::max(scale, 1e-300), 1e-13);
    const double gap = monotonicity_gap(d, u, v);
    ++mono.trials;
    if (!(gap > 0.0)) mono.pass = false;
    property_detail::note(even, std::abs(J_lambda(d, -u).J - J_lambda(d, u).J), 0.0);
  }
  property_detail::note(even, std::abs(J_lambda(d, NodalVector::Zero(d.size())).J), 0.0);
  return {dec, mono, even};
}

}  // namespace pxrobin

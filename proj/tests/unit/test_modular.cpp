#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "pxrobin/modular.hpp"
#include "pxrobin/properties.hpp"
#include "support/oracles.hpp"

using namespace pxrobin;

namespace {

struct Grid {
  std::shared_ptr<const Mesh> mesh;
  FeSpace space;
  explicit Grid(std::size_t n, double x1 = 1, double y1 = 1)
      : mesh(std::make_shared<const Mesh>(build_rect_mesh(0, 0, x1, y1, n, n))), space(mesh) {}
  DiscreteFunction f(const std::string& expr) const { return DiscreteFunction::interpolate(mesh, parse_field(expr)); }
  SampledField s(const std::string& expr) const { return space.sample(parse_field(expr)); }
};

}  // namespace

TEST(ModularLebesgue, ConstantFunctions) {
  Grid S(8);
  EXPECT_NEAR(modular_lebesgue(S.space, S.f("1"), parse_field("2"), parse_field("1")), 1.0, 1e-14);
  EXPECT_NEAR(modular_lebesgue(S.space, S.f("2"), parse_field("3"), parse_field("1")), 8.0, 1e-13);
}

TEST(ModularLebesgue, VariableExponentClosedForm) {
  Grid S(32);
  const double v = modular_lebesgue(S.space, S.f("2"), parse_field("2 + x"), parse_field("1"));
  EXPECT_NEAR(v, 4.0 / std::log(2.0), 1e-4);
}

TEST(ModularBoundary, Examples) {
  Grid S(8);
  EXPECT_NEAR(modular_boundary(S.space, S.f("1"), parse_field("2"), parse_field("1")), 4.0, 1e-14);
  EXPECT_NEAR(modular_boundary(S.space, S.f("x"), parse_field("2"), parse_field("1")), 5.0 / 3.0, 1e-14);
  EXPECT_EQ(modular_boundary(S.space, S.f("0"), parse_field("2"), parse_field("1")), 0.0);
}

TEST(ModularGradient, Examples) {
  Grid S(8);
  EXPECT_EQ(modular_gradient(S.space, S.f("3.5"), parse_field("2"), parse_field("1")), 0.0);
  EXPECT_NEAR(modular_gradient(S.space, S.f("x"), parse_field("2"), parse_field("1")), 1.0, 1e-13);
  EXPECT_NEAR(modular_gradient(S.space, S.f("x + y"), parse_field("3"), parse_field("1")), 2.0 * std::sqrt(2.0), 1e-12);
}

TEST(Luxemburg, ConstantExponentExamples) {
  Grid S(8);
  const auto one = S.s("1");
  EXPECT_NEAR(luxemburg_norm(ModularClosure::lebesgue(S.space, S.f("1").values, S.s("2"), one)), 1.0, 1e-14);
  EXPECT_NEAR(luxemburg_norm(ModularClosure::lebesgue(S.space, S.f("2").values, S.s("4"), one)), 2.0, 1e-14);
  // The root finder, not the closed form.
  EXPECT_NEAR(luxemburg_norm(ModularClosure::lebesgue(S.space, S.f("2").values, S.s("4"), one),
                             LuxemburgMethod::Bracketing),
              2.0, 1e-12);
  EXPECT_EQ(luxemburg_norm(ModularClosure::lebesgue(S.space, S.f("0").values, S.s("2 + x"), one)), 0.0);
}

// rho(2 / tau) = ((2/tau)^3 - (2/tau)^2) / ln(2/tau) on the unit square.
TEST(Luxemburg, VariableExponentAgainstScalarRoot) {
  Grid S(32);
  auto rho = [](double tau) {
    const double c = 2.0 / tau;
    if (std::abs(c - 1.0) < 1e-9) return 1.0 + 2.5 * (c - 1.0);  // series of c^2 (c - 1) / ln c at c = 1
    return (c * c * c - c * c) / std::log(c);
  };
  const double tau_ref = oracle::bisect([&](double t) { return rho(t) - 1.0; }, 0.3, 7.0);
  const double tau = luxemburg_norm(ModularClosure::lebesgue(S.space, S.f("2").values, S.s("2 + x"), S.s("1")));
  EXPECT_NEAR(tau, tau_ref, 1e-6);
}

TEST(Luxemburg, ClosureIsStrictlyDecreasing) {
  Grid S(8);
  const auto m = ModularClosure::lebesgue(S.space, S.f("x - 0.3*y").values, S.s("1.5 + 3*x"), S.s("1 + y"));
  double prev = std::numeric_limits<double>::infinity();
  for (double t = 1e-3; t < 1e3; t *= 1.7) {
    const double v = m(t);
    EXPECT_LT(v, prev);
    prev = v;
  }
  EXPECT_GT(m(1e-6), 1e6);
  EXPECT_LT(m(1e6), 1e-6);
}

TEST(Relations, BranchesForLargeSmallAndUnitFunctions) {
  Grid S(16);
  const auto p = S.s("2 + x"), w = S.s("1");
  auto find = [](const std::vector<RelationVerdict>& vs, const std::string& prefix) {
    for (const auto& v : vs)
      if (v.name.rfind(prefix, 0) == 0) return v;
    return RelationVerdict{};
  };
  const auto big = check_modular_norm_relations(S.space, S.f("2").values, p, w);
  EXPECT_TRUE(find(big, "(ii)").applicable);
  EXPECT_TRUE(find(big, "(ii)").holds);
  EXPECT_FALSE(find(big, "(iii)").applicable);

  const auto small = check_modular_norm_relations(S.space, S.f("0.1").values, p, w);
  EXPECT_TRUE(find(small, "(iii)").applicable);
  EXPECT_TRUE(find(small, "(iii)").holds);
  EXPECT_FALSE(find(small, "(ii)").applicable);

  // Scale u so that rho(u) = 1: the norm is then 1.
  const NodalVector u = S.f("1 + x*y").values;
  const double N = luxemburg_norm(ModularClosure::lebesgue(S.space, u, p, w));
  const NodalVector unit = u / N;
  EXPECT_NEAR(modular_lebesgue(S.space, unit, p, w), 1.0, 1e-10);
  EXPECT_NEAR(luxemburg_norm(ModularClosure::lebesgue(S.space, unit, p, w)), 1.0, 1e-10);
  for (const auto& v : check_modular_norm_relations(S.space, unit, p, w)) EXPECT_TRUE(v.holds) << v.name;
}

TEST(Relations, RandomFunctionsAcrossThreeSpecs) {
  Grid S(8);
  std::mt19937_64 rng(21);
  const std::pair<const char*, const char*> specs[] = {
      {"1.5 + 3.5*x*y", "1 + x"}, {"3 + 1.5*sin(3*x)*cos(2*y)", "exp(y)"}, {"5 - 3.5*x^2", "2 + cos(x + y)"}};
  for (const auto& [p, w] : specs) {
    for (const auto& c : modular_suite(S.space, parse_field(p), parse_field(w), 200, rng, p)) {
      EXPECT_TRUE(c.pass) << c.name << " " << c.detail << " worst " << c.worst;
      EXPECT_GT(c.trials, 0);
    }
  }
  const CheckResult c = constant_exponent_collapse(S.space, 3.0, 50, rng);
  EXPECT_TRUE(c.pass) << c.worst;
}

// rho(u - u_k) and ||u - u_k|| both decrease to zero along u_k = u + (u0 - u) 2^{-k}.
TEST(Relations, ModularAndNormVanishTogether) {
  Grid S(8);
  const auto p = S.s("1.5 + x"), w = S.s("1 + y");
  const NodalVector u = S.f("sin(3*x) + y").values, u0 = S.f("x*y - 2").values;
  double prev_r = std::numeric_limits<double>::infinity(), prev_n = prev_r;
  for (int k = 0; k < 40; ++k) {
    const NodalVector uk = u + std::ldexp(1.0, -k) * (u0 - u);
    const NodalVector diff = u - uk;
    const double r = modular_lebesgue(S.space, diff, p, w);
    const double n = lebesgue_norm(S.space, diff, p, w);
    EXPECT_LT(r, prev_r);
    EXPECT_LT(n, prev_n);
    prev_r = r;
    prev_n = n;
  }
  EXPECT_LT(prev_r, 1e-15);
  EXPECT_LT(prev_n, 1e-10);
}

TEST(Holder, Examples) {
  Grid S(16);
  const NodalVector u = S.f("1 + x - y^2").values;
  const auto zero = holder_pairing_bound(S.space, u, NodalVector::Zero(S.space.size()), S.s("2 + x"), S.s("1"));
  EXPECT_EQ(zero.lhs, 0.0);
  EXPECT_EQ(zero.rhs, 0.0);
  EXPECT_TRUE(zero.holds());

  const auto cs = holder_pairing_bound(S.space, u, u, S.s("2"), S.s("1"));
  const double l2sq = modular_lebesgue(S.space, u, S.s("2"), S.s("1"));
  EXPECT_NEAR(cs.lhs, l2sq, 1e-13);
  EXPECT_NEAR(cs.rhs, 2.0 * l2sq, 1e-12);

  std::mt19937_64 rng(2);
  for (int t = 0; t < 100; ++t) {
    const NodalVector a = random_nodal(S.space.size(), rng), b = random_nodal(S.space.size(), rng);
    const auto h = holder_pairing_bound(S.space, a, b, S.s("2 + x"), S.s("1 + y"));
    EXPECT_LE(h.lhs, h.rhs);
  }
}

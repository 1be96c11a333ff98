#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "pxrobin/energy.hpp"
#include "pxrobin/properties.hpp"
#include "pxrobin/robin_eigs.hpp"
#include "support/oracles.hpp"
#include "support/specs.hpp"

using namespace pxrobin;

namespace {

NodalVector nodal(const Discretization& d, const std::string& expr) {
  return DiscreteFunction::interpolate(d.mesh_ptr(), parse_field(expr)).values;
}

}  // namespace

TEST(IBeta, ClosedFormValues) {
  const Discretization d(testspec::make(8, "2", "4"));
  EXPECT_NEAR(I_beta(d, nodal(d, "1")), 4.0, 1e-14);
  EXPECT_NEAR(I_beta(d, nodal(d, "x")), 8.0 / 3.0, 1e-13);
  EXPECT_NEAR(beta_norm(d, nodal(d, "x")), std::sqrt(8.0 / 3.0), 1e-12);
  EXPECT_NEAR(sobolev_norm_ab(d, nodal(d, "1")), 1.0, 1e-14);
  EXPECT_NEAR(sobolev_norm_ab(d, nodal(d, "x")), 1.0 + std::sqrt(1.0 / 3.0), 1e-12);
}

TEST(Energy, ConstantFunctionValue) {
  const Discretization d(testspec::superlinear(8));
  const auto e = J_lambda(d, nodal(d, "1"));
  EXPECT_NEAR(e.J, 1.75, 1e-14);
  EXPECT_EQ(J_lambda(d, NodalVector::Zero(d.size())).J, 0.0);
  EXPECT_NEAR(L_beta(d, nodal(d, "1")), 2.0, 1e-14);
}

TEST(Energy, EvenFunctional) {
  const Discretization d(testspec::make(8, "2 + x", "3 + y", 0.7, "1 + x*y", "2 - x", "1 + y"));
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    const NodalVector u = random_nodal(d.size(), rng);
    EXPECT_EQ(J_lambda(d, u).J, J_lambda(d, -u).J);
  }
}

// With p = q = 2 the derivative is the linear operator (K + B - lambda M) u.
TEST(EnergyGradient, MatchesClosedFormLinearOperator) {
  const Discretization d(testspec::make(12, "2", "2", 3.0));
  const auto mats = oracle::p1_matrices(d.mesh());
  const SparseMatrix A = mats.K + mats.B - 3.0 * mats.M;
  std::mt19937_64 rng(4);
  for (int t = 0; t < 10; ++t) {
    const NodalVector u = random_nodal(d.size(), rng);
    const NodalVector g = J_lambda_grad(d, u).g;
    const NodalVector ref = A * u;
    EXPECT_LE((g - ref).norm(), 1e-12 * std::max(1.0, ref.norm()));
    EXPECT_NEAR(J_lambda(d, u).J, 0.5 * u.dot(ref), 1e-12 * std::max(1.0, std::abs(u.dot(ref))));
  }
}

TEST(EnergyGradient, CentralDifferences) {
  std::mt19937_64 rng(5);
  for (const auto& spec : {testspec::superlinear(8), testspec::make(8, "2 + x", "3 + y", 0.5, "1 + x", "1", "1 + y")}) {
    const Discretization d(spec);
    const CheckResult c = gradient_exactness(d, 20, rng);
    EXPECT_TRUE(c.pass) << c.worst;
  }
}

TEST(EnergyGradient, VanishesAtZeroWhenSourceIsSuperquadratic) {
  const Discretization d(testspec::superlinear(8));
  EXPECT_EQ(J_lambda_grad(d, NodalVector::Zero(d.size())).g.norm(), 0.0);
}

TEST(EnergyGradient, LinearEigenfunctionIsCritical) {
  const Discretization d0(testspec::make(16, "2", "2"));
  const auto pairs = field_robin_eigs(d0, 1);
  const Discretization d = d0.with_lambda(pairs[0].value);
  EXPECT_LE(weak_residual(d, pairs[0].vector), 1e-10);
}

TEST(LBeta, PairingIdentities) {
  const Discretization d(testspec::make(8, "2.5 + x", "3", 1.0, "1 + y", "1", "2 - x"));
  std::mt19937_64 rng(6);
  for (int t = 0; t < 20; ++t) {
    const NodalVector u = random_nodal(d.size(), rng, 1.0);
    EXPECT_NEAR(L_beta_pairing(d, u, u), I_beta(d, u), 1e-12 * I_beta(d, u));
  }
}

TEST(LBeta, StrictMonotonicity) {
  const Discretization d(testspec::make(8, "3 + x", "4.5"));
  std::mt19937_64 rng(7);
  for (int t = 0; t < 100; ++t) {
    const NodalVector u = random_nodal(d.size(), rng), v = random_nodal(d.size(), rng);
    EXPECT_GT(monotonicity_gap(d, u, v), 0.0);
  }
}

TEST(Energy, IdentitySuite) {
  std::mt19937_64 rng(8);
  const Discretization d(testspec::make(8, "1.5 + x", "3 + y", 0.8, "1 + x*y", "1 + 0.5*sin(3*x)", "1 + y"));
  for (const auto& c : energy_identity_suite(d, 50, rng)) EXPECT_TRUE(c.pass) << c.name << " " << c.worst;
  for (const auto& c : ibeta_suite(d, 100, rng)) EXPECT_TRUE(c.pass) << c.name << " " << c.detail;
}

// The beta-norm and ||grad u||_{p,a} + ||u||_{p,b} are equivalent: their ratio
// stays inside a fixed band over random functions of very different sizes.
TEST(Norms, BetaNormEquivalentToSobolevNorm) {
  const Discretization d(testspec::make(8, "2 + x", "4", 1.0, "1 + x", "1 + y", "1 + x*y"));
  std::mt19937_64 rng(9);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (int t = 0; t < 200; ++t) {
    const NodalVector u = random_nodal(d.size(), rng, 3.0);
    const double r = beta_norm(d, u) / sobolev_norm_ab(d, u);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  EXPECT_GT(lo, 0.1);
  EXPECT_LT(hi, 10.0);
}

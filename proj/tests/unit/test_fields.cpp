#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "pxrobin/discretization.hpp"
#include "pxrobin/problem.hpp"
#include "support/specs.hpp"

using namespace pxrobin;

TEST(FieldParse, Arithmetic) {
  EXPECT_DOUBLE_EQ(parse_field("2 + x")(0.5, 0), 2.5);
  EXPECT_DOUBLE_EQ(parse_field("2*x + y^2")(1, 2), 6.0);
  EXPECT_DOUBLE_EQ(eval_field(parse_field("exp(0)"), {0.3, -4}), 1.0);
  EXPECT_DOUBLE_EQ(eval_field(parse_field("min(x, y)"), {0.3, 0.7}), 0.3);
}

TEST(FieldParse, PrecedenceAndAssociativity) {
  EXPECT_DOUBLE_EQ(parse_field("2^3^2")(0, 0), 512.0);
  EXPECT_DOUBLE_EQ(parse_field("-2^2")(0, 0), -4.0);
  EXPECT_DOUBLE_EQ(parse_field("1 - 2 - 3")(0, 0), -4.0);
  EXPECT_DOUBLE_EQ(parse_field("8 / 4 / 2")(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(parse_field("  1+2 *3 ")(0, 0), 7.0);
  EXPECT_DOUBLE_EQ(parse_field("max(abs(-3), sqrt(4))")(0, 0), 3.0);
  EXPECT_NEAR(parse_field("sin(pi/2) + cos(0) + log(exp(2))")(0, 0), 4.0, 1e-15);
}

TEST(FieldParse, UnknownIdentifierIsNamed) {
  try {
    parse_field("3 + zz");
    FAIL() << "expected an error";
  } catch (const UnknownIdentifier& e) {
    EXPECT_EQ(e.name(), "zz");
    EXPECT_NE(std::string(e.what()).find("zz"), std::string::npos);
  }
}

TEST(FieldParse, SyntaxErrorCarriesColumn) {
  try {
    parse_field("2 + * x");
    FAIL() << "expected an error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.column(), 5u);
  }
  EXPECT_THROW(parse_field("(1 + x"), ParseError);
  EXPECT_THROW(parse_field(""), ParseError);
  EXPECT_THROW(parse_field("1 2"), ParseError);
  EXPECT_THROW(parse_field("min(1)"), ParseError);
}

TEST(FieldEval, DomainErrorsCarryPoint) {
  try {
    eval_field(parse_field("log(x - 1)"), {0.5, 0});
    FAIL() << "expected an error";
  } catch (const DomainError& e) {
    EXPECT_EQ(e.x(), 0.5);
    EXPECT_EQ(e.y(), 0.0);
  }
  EXPECT_THROW(parse_field("sqrt(x - 1)")(0, 0), DomainError);
  EXPECT_THROW(parse_field("1 / x")(0, 0), DomainError);
  EXPECT_THROW(parse_field("1 / (x - y)")(0.25, 0.25), DomainError);
}

TEST(FieldParse, PrintedFormReparsesToSameValues) {
  const char* sources[] = {"2 + x", "-x^2*y + 3", "max(x, 1 - y) / (2 + sin(3*x))", "exp(-(x-0.5)^2) - abs(y)",
                           "2^-x", "--x + +y", "1.5e-1*x - 2E+0"};
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-1, 1);
  for (const char* s : sources) {
    const FieldExpr f = parse_field(s);
    const FieldExpr g = parse_field(f.to_string());
    for (int i = 0; i < 100; ++i) {
      const double x = U(rng), y = U(rng);
      const double a = f(x, y), b = g(x, y);
      EXPECT_LE(std::abs(a - b), 1e-15 * std::abs(a)) << s << " -> " << f.to_string();
    }
  }
}

TEST(ExponentBounds, ConstantAndAffine) {
  auto mesh = std::make_shared<const Mesh>(build_rect_mesh(0, 0, 1, 1, 8, 8));
  const Bounds c = exponent_bounds(parse_field("3"), mesh);
  EXPECT_EQ(c.min, 3.0);
  EXPECT_EQ(c.max, 3.0);
  for (std::size_t n : {2u, 8u, 32u}) {
    const Bounds b = exponent_bounds(parse_field("2 + x"), std::make_shared<const Mesh>(build_rect_mesh(0, 0, 1, 1, n, n)));
    EXPECT_EQ(b.min, 2.0);
    EXPECT_EQ(b.max, 3.0);
  }
}

TEST(ExponentBounds, SmoothMaximumAgainstDenseScan) {
  const double L = std::numbers::pi;
  auto mesh = std::make_shared<const Mesh>(build_rect_mesh(0, 0, L, L, 32, 32));
  const FieldExpr f = parse_field("2 + sin(x)*sin(y)");
  const Bounds b = exponent_bounds(f, mesh);
  double scan = -1;
  for (int i = 0; i <= 320; ++i)
    for (int j = 0; j <= 320; ++j) scan = std::max(scan, f(L * i / 320, L * j / 320));
  EXPECT_NEAR(b.max, scan, 1e-2);
  EXPECT_NEAR(b.max, 3.0, 1e-2);
}

TEST(ValidateSpec, RegimeClassification) {
  const auto sup = validate_spec(testspec::superlinear(8));
  ASSERT_TRUE(sup.ok());
  EXPECT_EQ(sup.report->regime, Regime::Superlinear);
  ASSERT_TRUE(sup.report->eta_interval.has_value());
  EXPECT_EQ(sup.report->eta_interval->first, 2.0);
  EXPECT_EQ(sup.report->eta_interval->second, 4.0);

  const auto sub = validate_spec(testspec::sublinear(8));
  ASSERT_TRUE(sub.ok());
  EXPECT_EQ(sub.report->regime, Regime::Sublinear);
  EXPECT_EQ(sub.report->q_minus, 2.0);
  EXPECT_EQ(sub.report->p_minus, 3.0);
  EXPECT_EQ(sub.report->q_plus, 3.5);
  EXPECT_EQ(sub.report->p_plus, 4.0);
  EXPECT_FALSE(sub.report->eta_interval.has_value());
  EXPECT_FALSE(sub.report->unchecked.empty());

  const auto other = validate_spec(testspec::make(8, "3", "2.5"));
  ASSERT_TRUE(other.ok());
  EXPECT_EQ(other.report->regime, Regime::Other);
}

TEST(ValidateSpec, ExponentNotAboveOneIsReported) {
  const auto r = validate_spec(testspec::make(4, "1", "4"));
  ASSERT_FALSE(r.ok());
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_EQ(r.violations[0].hypothesis, "C+ membership: inf p(x) > 1 fails");
}

// Each spec breaks exactly one hypothesis family; only the base spec passes.
TEST(ValidateSpec, AcceptsIffEveryHypothesisHolds) {
  EXPECT_TRUE(validate_spec(testspec::make(6, "2 + x", "4", 1, "1 + x", "1 + y", "1 + x*y")).ok());
  struct Case {
    ProblemSpec spec;
    std::string hypothesis;
  };
  const std::vector<Case> cases = {
      {testspec::make(6, "0.5 + x", "4"), "C+ membership: inf p(x) > 1 fails"},
      {testspec::make(6, "2", "1 + x"), "C+ membership: inf q(x) > 1 fails"},
      {testspec::make(6, "2", "4", 1, "x - 0.5"), "weight a(x) > 0 fails"},
      {testspec::make(6, "2", "4", 1, "1", "y - 0.5"), "weight b(x) > 0 fails"},
      {testspec::make(6, "2", "4", 1, "1", "1", "x"), "beta- = inf beta(x) > 0 on the boundary fails"},
      {testspec::make(6, "2", "4", 1, "1", "1", "1 / (1 - x)"), "field beta evaluable"},
  };
  for (const auto& c : cases) {
    const auto r = validate_spec(c.spec);
    EXPECT_FALSE(r.ok()) << c.hypothesis;
    ASSERT_EQ(r.violations.size(), 1u) << c.hypothesis;
    EXPECT_EQ(r.violations[0].hypothesis, c.hypothesis);
  }
  ProblemSpec bad_lambda = testspec::superlinear(4);
  bad_lambda.lambda = -1;
  EXPECT_FALSE(validate_spec(bad_lambda).ok());
}

TEST(ValidateSpec, DiscretizationRejectsInvalidSpec) {
  EXPECT_THROW(Discretization(testspec::make(4, "1", "4")), ValidationError);
  const Discretization d(testspec::make(4, "1.5", "4"));
  EXPECT_EQ(d.eps(), 1e-10);
  EXPECT_EQ(Discretization(testspec::superlinear(4)).eps(), 0.0);
}

#pragma once
/// @brief Problem data (domain, weights a, b, exponents p, q, Robin
/// coefficient beta, parameter lambda), exponent bounds and the standing
/// hypothesis checks.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pxrobin/error.hpp"
#include "pxrobin/expr.hpp"
#include "pxrobin/fem.hpp"
#include "pxrobin/geometry.hpp"

namespace pxrobin {

struct DomainSpec {
  Rect rect;
  std::size_t nx = 16;
  std::size_t ny = 16;
};

struct ProblemSpec {
  DomainSpec domain;
  FieldExpr a = FieldExpr::parse("1");
  FieldExpr b = FieldExpr::parse("1");
  FieldExpr p = FieldExpr::parse("2");
  FieldExpr q = FieldExpr::parse("4");
  FieldExpr beta = FieldExpr::parse("1");
  double lambda = 1.0;

  std::shared_ptr<const Mesh> build_mesh() const {
    const Rect& r = domain.rect;
    return std::make_shared<const Mesh>(build_rect_mesh(r.x0, r.y0, r.x1, r.y1, domain.nx, domain.ny));
  }
};

enum class Regime { Superlinear, Sublinear, Other };

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::Superlinear: return "Superlinear";
    case Regime::Sublinear: return "Sublinear";
    case Regime::Other: return "Other";
  }
  return "?";
}

struct Bounds {
  double min = 0.0;
  double max = 0.0;
  Point2 argmin, argmax;
};

struct RegimeReport {
  double p_minus = 0, p_plus = 0, q_minus = 0, q_plus = 0;
  Regime regime = Regime::Other;
  /// The open interval (p+, q-) of admissible eta, when nonempty.
  std::optional<std::pair<double, double>> eta_interval;
  /// Analytic embedding hypotheses the discrete checks cannot see.
  std::vector<std::string> unchecked;
};

inline Regime classify(double p_minus, double p_plus, double q_minus, double q_plus) {
  if (p_plus < q_minus) return Regime::Superlinear;
  if (1.0 < q_minus && q_minus < p_minus && p_minus < q_plus && q_plus < p_plus) return Regime::Sublinear;
  return Regime::Other;
}

inline RegimeReport make_regime_report(double p_minus, double p_plus, double q_minus, double q_plus) {
  RegimeReport r;
  r.p_minus = p_minus;
  r.p_plus = p_plus;
  r.q_minus = q_minus;
  r.q_plus = q_plus;
  r.regime = classify(p_minus, p_plus, q_minus, q_plus);
  if (p_plus < q_minus) r.eta_interval = std::make_pair(p_plus, q_minus);
  r.unchecked = {"compact embedding W_{a,b}^{1,p} -> L_b^q (weight exponent conditions): not checked (out of scope)",
                 "compact trace embedding into L_a^p(boundary): not checked (out of scope)"};
  return r;
}

/// Extrema of f over all quadrature points (volume and boundary) and all
/// mesh vertices: the finite stand-in for inf/sup over the closed domain.
inline Bounds exponent_bounds(const FieldExpr& f, const FeSpace& space) {
  Bounds b;
  b.min = std::numeric_limits<double>::infinity();
  b.max = -std::numeric_limits<double>::infinity();
  auto visit = [&](const Point2& p) {
    const double v = f(p);
    if (v < b.min) {
      b.min = v;
      b.argmin = p;
    }
    if (v > b.max) {
      b.max = v;
      b.argmax = p;
    }
  };
  for (const auto& q : space.volume_points()) visit(q.pos);
  for (const auto& q : space.boundary_points()) visit(q.pos);
  for (const auto& v : space.mesh().vertices()) visit(v);
  return b;
}

inline Bounds exponent_bounds(const FieldExpr& f, std::shared_ptr<const Mesh> mesh) {
  return exponent_bounds(f, FeSpace(std::move(mesh)));
}

struct Violation {
  std::string hypothesis;
  Point2 witness;
  std::string detail;
};

struct ValidationResult {
  std::optional<RegimeReport> report;
  std::vector<Violation> violations;
  bool ok() const noexcept { return report.has_value(); }
};

namespace detail {

inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace detail

/// Checks C+ membership of p and q, beta > 0 and finite on the boundary, and
/// a, b > 0 in the volume, all on the quadrature set of the spec's mesh.
inline ValidationResult validate_spec(const ProblemSpec& spec, const FeSpace& space) {
  ValidationResult out;
  auto& viol = out.violations;

  if (!(spec.lambda > 0.0) || !std::isfinite(spec.lambda))
    viol.push_back({"lambda > 0", {}, "lambda = " + detail::num(spec.lambda)});

  struct Sweep {
    bool ok = true;
    double min = std::numeric_limits<double>::infinity();
    double max = -std::numeric_limits<double>::infinity();
  };

  // Evaluates f on a point set, recording evaluation failures as violations.
  auto scan = [&](const FieldExpr& f, const char* name, auto&& points, auto&& pred, const std::string& hypothesis) {
    Sweep s;
    bool reported = false;
    for (const Point2& p : points) {
      double v;
      try {
        v = f(p);
      } catch (const DomainError& e) {
        if (!reported) viol.push_back({std::string("field ") + name + " evaluable", p, e.what()});
        reported = true;
        s.ok = false;
        continue;
      }
      s.min = std::min(s.min, v);
      s.max = std::max(s.max, v);
      if (!pred(v) && !reported) {
        viol.push_back({hypothesis, p, std::string(name) + " = " + detail::num(v)});
        reported = true;
        s.ok = false;
      }
    }
    return s;
  };

  std::vector<Point2> closure, volume, boundary;
  for (const auto& q : space.volume_points()) {
    volume.push_back(q.pos);
    closure.push_back(q.pos);
  }
  for (const auto& q : space.boundary_points()) {
    boundary.push_back(q.pos);
    closure.push_back(q.pos);
  }
  for (const auto& v : space.mesh().vertices()) closure.push_back(v);

  auto gt1 = [](double v) { return v > 1.0; };
  auto pos = [](double v) { return v > 0.0; };
  const Sweep sp = scan(spec.p, "p", closure, gt1, "C+ membership: inf p(x) > 1 fails");
  const Sweep sq = scan(spec.q, "q", closure, gt1, "C+ membership: inf q(x) > 1 fails");
  scan(spec.beta, "beta", boundary, pos, "beta- = inf beta(x) > 0 on the boundary fails");
  scan(spec.a, "a", volume, pos, "weight a(x) > 0 fails");
  scan(spec.b, "b", volume, pos, "weight b(x) > 0 fails");

  if (viol.empty() && sp.ok && sq.ok) out.report = make_regime_report(sp.min, sp.max, sq.min, sq.max);
  return out;
}

inline ValidationResult validate_spec(const ProblemSpec& spec) {
  return validate_spec(spec, FeSpace(spec.build_mesh()));
}

}  // namespace pxrobin

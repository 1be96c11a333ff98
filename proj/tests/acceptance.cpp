// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits nonzero when any criterion fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pxrobin/pxrobin.hpp"
#include "support/oracles.hpp"
#include "support/specs.hpp"

using namespace pxrobin;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  double limit_seconds = 0.0;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [not met]");
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

int failures = 0;

void criterion(int id, const std::string& title, double limit_seconds, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail += std::string(o.detail.empty() ? "" : "; ") + "exception: " + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit_seconds > 0.0) o.require(secs < limit_seconds, "runtime " + num(secs) + " s < " + num(limit_seconds) + " s");
  if (!o.pass) ++failures;
  std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL") << "  " << title << "  (" << o.detail << ")"
            << std::endl;
}

bool all_pass(const std::vector<CheckResult>& cs, std::string* which) {
  bool ok = true;
  for (const auto& c : cs)
    if (!c.pass) {
      ok = false;
      *which += (which->empty() ? "" : ", ") + c.name;
    }
  return ok;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Shared between criteria 6, 7 and 8.
std::optional<double> c_bar, c_under;

}  // namespace

int main() {
  std::cout << "pxrobin acceptance run" << std::endl;

  criterion(1, "modular and Luxemburg-norm suite, 200 functions x 3 specs", 30, [](Outcome& o) {
    auto mesh = std::make_shared<const Mesh>(build_rect_mesh(0, 0, 1, 1, 16, 16));
    const FeSpace space(mesh);
    std::mt19937_64 rng(1);
    const std::pair<const char*, const char*> specs[] = {
        {"2 + x", "1 + x*y"}, {"1.5 + 3*x*y", "1 + 0.5*sin(3*x)"}, {"3 + sin(2*x)*cos(3*y)", "exp(y)"}};
    for (const auto& [p, w] : specs) {
      std::string bad;
      const auto checks = modular_suite(space, parse_field(p), parse_field(w), 200, rng, p);
      o.require(all_pass(checks, &bad), std::string("p = ") + p + ": relations (i)-(v), homogeneity 1e-9, unit 1e-10" +
                                            (bad.empty() ? "" : " failing " + bad));
    }
    const CheckResult c = constant_exponent_collapse(space, 2.5, 200, rng);
    o.require(c.pass, "constant-exponent collapse worst " + num(c.worst) + " <= 1e-10");
  });

  criterion(2, "I_beta / beta-norm suite, 200 functions", 30, [](Outcome& o) {
    const Discretization d(testspec::make(16, "2 + x", "3 + y", 1.0, "1 + x*y", "1", "1 + y"));
    std::mt19937_64 rng(2);
    const auto checks = ibeta_suite(d, 200, rng, 1e-9);
    o.require(checks[0].pass, "relations (i)-(iii) on " + std::to_string(checks[0].trials) + " functions");
    o.require(checks[1].pass && checks[2].pass, "trend checks over 12-term sequences");
  });

  criterion(3, "central differences match J' (h = 1e-6, 16x16, p- >= 2)", 10, [](Outcome& o) {
    const Discretization d(testspec::make(16, "2 + x", "3 + y", 1.0, "1 + x*y", "1", "1 + y"));
    std::mt19937_64 rng(3);
    const CheckResult c = gradient_exactness(d, 10, rng, 1e-6, 1e-5);
    o.require(c.pass && c.trials == 10, "worst relative error " + num(c.worst) + " <= 1e-5");
  });

  criterion(4, "linear oracle lambda_1 within 2% at 64x64, order >= 1.8", 60, [](Outcome& o) {
    const double exact = oracle::rect_robin_lambda1(1, 1, 1, 1, 1);
    std::vector<double> err;
    for (std::size_t n : {16u, 32u, 64u}) {
      const double l = linear_robin_eigs(build_rect_mesh(0, 0, 1, 1, n, n), 1, 1, 1, 1)[0].value;
      err.push_back(std::abs(l - exact) / exact);
    }
    o.require(err[2] <= 0.02, "relative error " + num(err[2]) + " at 64x64");
    const double r1 = std::log2(err[0] / err[1]), r2 = std::log2(err[1] / err[2]);
    o.require(r1 >= 1.8 && r2 >= 1.8, "orders " + num(r1) + ", " + num(r2));
  });

  criterion(5, "embedding constant vs lambda_1^{-1/2} in the linear case", 60, [](Outcome& o) {
    const Discretization d(testspec::make(32, "2", "2"));
    const double l1 = field_robin_eigs(d, 1)[0].value;
    const EmbeddingEstimate e = estimate_embedding_constant(d, 4);
    const double rel = std::abs(e.raw * std::sqrt(l1) - 1.0);
    o.require(rel <= 0.05, "C2 = " + num(e.raw) + ", lambda_1^{-1/2} = " + num(1 / std::sqrt(l1)) + ", gap " + num(rel));
  });

  criterion(6, "mountain-pass solution of the superlinear demo at 32x32", 120, [](Outcome& o) {
    const Discretization d(testspec::superlinear(32));
    const CriticalPoint cp = mountain_pass(d, field_robin_eigs(d, 1)[0].vector);
    o.require(cp.converged() && cp.residual <= 1e-6, "residual " + num(cp.residual));
    o.require(cp.J > 0.0, "J(u) = " + num(cp.J) + " > 0");
    const double nehari = std::abs(nehari_pairing(d, cp.u.values));
    o.require(nehari <= 1e-6 * (1.0 + cp.beta_norm), "|J'(u)(u)| = " + num(nehari));
    const SphereSample s = sphere_barrier(d, 0.1 * std::min(1.0, cp.beta_norm), 50);
    o.require(s.min > 0.0, "small-sphere minimum " + num(s.min) + " > 0");
    if (cp.converged()) c_bar = cp.J;
  });

  criterion(7, "Ekeland solution of the sublinear demo at lambda = 0.5 lambda*", 120, [](Outcome& o) {
    const Discretization base(testspec::sublinear(32));
    const ThresholdEstimate th = estimate_threshold(base, 4);
    const Discretization d = base.with_lambda(0.5 * th.star.lambda_star);
    const NegativeDirection nd = construct_negative_direction(d);
    o.require(nd.J_at_t_star < 0.0, "J(t* phi) = " + num(nd.J_at_t_star) + " < 0");
    const SphereInfimum inf = sphere_infimum(d, th.rho, 20);
    o.require(inf.value >= 0.5 * th.star.gamma, "sphere infimum " + num(inf.value) + " >= gamma/2 = " +
                                                    num(0.5 * th.star.gamma));
    const CriticalPoint w = ekeland_ball_minimize(d, th.rho, 1e-6, 2);
    o.require(w.J < 0.0, "J(w) = " + num(w.J) + " < 0");
    o.require(w.converged() && w.residual <= 1e-6, "residual " + num(w.residual));
    o.require(w.beta_norm < th.rho, "||w||_beta = " + num(w.beta_norm) + " < rho = " + num(th.rho));
    if (w.converged()) c_under = w.J;
  });

  criterion(8, "two-solution sign separation and documented regime note", 0, [](Outcome& o) {
    o.require(c_bar && c_under && *c_bar > 0.0 && 0.0 > *c_under,
              "c_bar = " + (c_bar ? num(*c_bar) : std::string("missing")) +
                  ", c_under = " + (c_under ? num(*c_under) : std::string("missing")));
    // The report of the two-solutions experiment must carry the regime note.
    nlohmann::json doc = nlohmann::json::parse(slurp(std::filesystem::path(PXROBIN_CONFIG_DIR) / "two_solutions.json"));
    ConfigOverrides ov;
    ov.mesh_n = 8;
    const ExperimentConfig cfg = load_config(apply_overrides(doc, ov));
    ExperimentOutput out = execute(cfg);
    const auto report = build_report(cfg, out);
    const auto& res = report["results"];
    o.require(res.contains("regime_note") && !res["regime_note"].get<std::string>().empty() &&
                  res["companion_regime"]["regime"] != report["regime"]["regime"],
              "report documents the incompatible regimes");
  });

  criterion(9, "fountain diagnostics at 32x32, k <= 20, and multiplicity search", 300, [](Outcome& o) {
    const Discretization d(testspec::superlinear(32));
    const FountainDiagnostics fd = fountain_diagnostics(d, 20);
    o.require(fd.alpha_nonincreasing(), "alpha_k nonincreasing");
    const double ratio = fd.alpha.back() / fd.alpha.front();
    o.require(ratio <= 0.6, "alpha_20 / alpha_1 = " + num(ratio));
    int positive = 0;
    for (double a : fd.a_upper) positive += a > 0.0;
    o.require(fd.a_nonpositive(), "a_k <= 0 at eta_k = 2 gamma_k: " + std::to_string(positive) + " of " +
                                      std::to_string(fd.a_upper.size()) + " positive, max " +
                                      num(*std::max_element(fd.a_upper.begin(), fd.a_upper.end())));
    const MultiplicityResult mr = multiplicity_search(d, 2);
    bool ok = mr.complete && mr.points.size() == 2;
    if (ok) ok = mr.points[0].J < mr.points[1].J && mr.points[0].residual <= 1e-6 && mr.points[1].residual <= 1e-6;
    o.require(ok, mr.points.size() == 2 ? "J_1 = " + num(mr.points[0].J) + " < J_2 = " + num(mr.points[1].J) +
                                              ", residuals " + num(mr.points[0].residual) + ", " +
                                              num(mr.points[1].residual)
                                        : "found " + std::to_string(mr.points.size()) + " points");
  });

  criterion(10, "repeated runs give byte-identical report.json", 0, [](Outcome& o) {
    const auto dir = std::filesystem::temp_directory_path() / "pxrobin_acceptance_determinism";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    const auto cfg = dir / "config.json";
    std::ofstream(cfg) << R"({"experiment": "solve-mp", "domain": {"x0": 0, "y0": 0, "x1": 1, "y1": 1, "nx": 16,
      "ny": 16}, "fields": {"p": "2", "q": "4"}, "lambda": 1, "seed": 17, "samples": 10})";
    std::ostringstream sink;
    std::string reports[2];
    for (int r = 0; r < 2; ++r) {
      RunArgs args{cfg.string(), dir / ("run" + std::to_string(r)), {}};
      o.require(run(args, sink) == 0, "run " + std::to_string(r + 1) + " exit 0");
      reports[r] = slurp(args.out_dir / "report.json");
    }
    o.require(!reports[0].empty() && reports[0] == reports[1], std::to_string(reports[0].size()) + " bytes identical");
    std::filesystem::remove_all(dir);
  });

  std::cout << (failures == 0 ? "all criteria PASS" : std::to_string(failures) + " criterion(s) FAIL") << std::endl;
  return failures == 0 ? 0 : 1;
}

#pragma once
/// @brief Experiment dispatch and report assembly behind the command-line tool.
///
/// Exit codes: 0 when the experiment ran and every applicable verdict holds,
/// 1 on solver failure or a failed verdict, 2 on configuration, validation or
/// regime errors. A report.json is written in every case where the output
/// directory is usable; wall-clock time goes to timing.json so that report.json
/// is a pure function of (config, seed).

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pxrobin/config.hpp"
#include "pxrobin/fountain.hpp"
#include "pxrobin/io.hpp"
#include "pxrobin/properties.hpp"
#include "pxrobin/two_solutions.hpp"

namespace pxrobin {

using json = nlohmann::json;

struct Verdict {
  std::string relation;
  bool pass = false;
  bool applicable = true;
  std::optional<double> value;
  std::optional<double> bound;
  std::string detail;
};

inline json to_json(const Verdict& v) {
  json j{{"relation", v.relation}, {"pass", v.pass}, {"applicable", v.applicable}};
  if (v.value) j["value"] = *v.value;
  if (v.bound) j["bound"] = *v.bound;
  if (!v.detail.empty()) j["detail"] = v.detail;
  return j;
}

inline json to_json(const RegimeReport& r) {
  json j{{"regime", to_string(r.regime)}, {"p_minus", r.p_minus}, {"p_plus", r.p_plus},
         {"q_minus", r.q_minus},         {"q_plus", r.q_plus},   {"unchecked_hypotheses", r.unchecked}};
  j["eta_interval"] = r.eta_interval ? json::array({r.eta_interval->first, r.eta_interval->second}) : json(nullptr);
  return j;
}

inline json to_json(const CriticalPoint& cp) {
  return {{"J", cp.J},
          {"residual", cp.residual},
          {"beta_norm", cp.beta_norm},
          {"iterations", cp.iterations},
          {"classification", to_string(cp.classification)},
          {"status", to_string(cp.status)}};
}

inline json to_json(const LambdaStar& s) { return {{"lambda_star", s.lambda_star}, {"gamma", s.gamma}}; }

/// Report section for a direct lambda* evaluation.
inline json lambda_star_section(double p_plus, double q_minus, double rho, double C2) {
  json j = to_json(lambda_star(p_plus, q_minus, rho, C2));
  j["inputs"] = {{"p_plus", p_plus}, {"q_minus", q_minus}, {"rho", rho}, {"C2", C2}};
  return j;
}

/// Everything an experiment produces besides its report body.
struct ExperimentOutput {
  json results = json::object();
  std::vector<Verdict> verdicts;
  std::optional<RegimeReport> regime;
  std::vector<std::pair<std::string, std::function<void(const std::filesystem::path&)>>> files;

  void check(std::string relation, bool pass, std::optional<double> value = {}, std::optional<double> bound = {},
             std::string detail = {}) {
    verdicts.push_back({std::move(relation), pass, true, value, bound, std::move(detail)});
  }
  void not_applicable(std::string relation, std::string why) {
    verdicts.push_back({std::move(relation), true, false, {}, {}, std::move(why)});
  }
  void add_function(std::string name, DiscreteFunction u) {
    files.emplace_back(std::move(name), [u = std::move(u)](const std::filesystem::path& p) { export_solution_csv(u, p); });
  }
  void add_trace(std::string name, std::vector<TraceEntry> t) {
    files.emplace_back(std::move(name), [t = std::move(t)](const std::filesystem::path& p) { export_trace_csv(t, p); });
  }
  void add_mesh(std::shared_ptr<const Mesh> m) {
    files.emplace_back("mesh.csv", [m = std::move(m)](const std::filesystem::path& p) { export_mesh_csv(*m, p); });
  }
};

namespace cli_detail {

inline void add_checks(ExperimentOutput& out, const std::vector<CheckResult>& checks) {
  for (const auto& c : checks) out.check(c.name, c.pass, c.worst, {}, c.detail);
}

inline json check_json(const std::vector<CheckResult>& checks) {
  json arr = json::array();
  for (const auto& c : checks)
    arr.push_back({{"name", c.name}, {"pass", c.pass}, {"trials", c.trials}, {"worst", c.worst}});
  return arr;
}

inline bool constant_on(const Discretization& d, const FieldExpr& f, double* value) {
  const Bounds b = exponent_bounds(f, d.space());
  if (value) *value = b.min;
  return b.min == b.max;
}

inline MountainPassOptions mountain_options(const ExperimentConfig& cfg) {
  MountainPassOptions o;
  o.n_path = cfg.n_path;
  o.tol = cfg.tol;
  o.max_iters = cfg.max_iters;
  return o;
}

inline void report_solution(ExperimentOutput& out, const Discretization& d, const CriticalPoint& cp,
                            const ExperimentConfig& cfg) {
  out.check("stationarity: residual <= tol", cp.converged() && cp.residual <= cfg.tol, cp.residual, cfg.tol);
  const double even = std::abs(J_lambda(d, -cp.u.values).J - cp.J);
  out.check("evenness: J(-u) = J(u)", even == 0.0, even, 0.0);
}

// ---------------------------------------------------------------------------

inline void run_validate(const ExperimentConfig& cfg, ExperimentOutput& out) {
  const Discretization d(cfg.spec);
  out.regime = d.regime();
  out.results["mesh"] = {{"vertices", d.mesh().num_vertices()}, {"triangles", d.mesh().num_triangles()},
                         {"nx", cfg.spec.domain.nx}, {"ny", cfg.spec.domain.ny}};
  out.results["lambda"] = d.lambda();
  out.results["regularization_eps"] = d.eps();
  out.check("standing hypotheses: p, q in C+, a, b > 0, beta- > 0", true);
  out.add_mesh(d.mesh_ptr());
}

inline void run_prop_suite(const ExperimentConfig& cfg, ExperimentOutput& out) {
  const Discretization d(cfg.spec);
  out.regime = d.regime();
  std::mt19937_64 rng(cfg.seed);
  constexpr int kFunctions = 200;
  std::vector<CheckResult> checks;
  for (auto&& c : modular_suite(d.space(), cfg.spec.p, cfg.spec.a, kFunctions, rng, "(p, a)")) checks.push_back(c);
  for (auto&& c : modular_suite(d.space(), cfg.spec.q, cfg.spec.b, kFunctions, rng, "(q, b)")) checks.push_back(c);
  for (auto&& c : modular_suite(d.space(), cfg.spec.p, cfg.spec.beta, kFunctions, rng, "(p, beta)"))
    checks.push_back(c);
  checks.push_back(constant_exponent_collapse(d.space(), 2.5, kFunctions, rng));
  for (auto&& c : ibeta_suite(d, kFunctions, rng)) checks.push_back(c);
  for (auto&& c : energy_identity_suite(d, 20, rng)) checks.push_back(c);
  add_checks(out, checks);
  if (d.regime().p_minus >= 2.0) {
    const CheckResult g = gradient_exactness(d, 10, rng);
    checks.push_back(g);
    out.check(g.name, g.pass, g.worst, 1e-5);
  } else {
    out.not_applicable("central differences match J'", "p- < 2: the energy is regularized and only C^1");
  }
  out.results["checks"] = check_json(checks);
  out.results["functions_per_suite"] = kFunctions;
}

inline void run_solve_mp(const ExperimentConfig& cfg, ExperimentOutput& out) {
  const Discretization d(cfg.spec);
  out.regime = d.regime();
  require_superlinear(d);
  const auto eig = field_robin_eigs(d, 1).front();
  const CriticalPoint cp = mountain_pass(d, eig.vector, mountain_options(cfg));
  out.results["solution"] = to_json(cp);
  out.results["endpoint_direction_eigenvalue"] = eig.value;
  report_solution(out, d, cp, cfg);
  out.check("mountain-pass level J(u) > 0", cp.J > 0.0, cp.J, 0.0);

  const double nehari = nehari_pairing(d, cp.u.values);
  const double nehari_bound = cfg.tol * (1.0 + cp.beta_norm);
  out.results["nehari_pairing"] = nehari;
  out.check("Nehari consistency |J'(u)(u)| <= tol (1 + ||u||_beta)", std::abs(nehari) <= nehari_bound,
            std::abs(nehari), nehari_bound);

  const double rho = 0.1 * std::min(1.0, cp.beta_norm);
  const SphereSample s = sphere_barrier(d, rho, cfg.samples, cfg.seed);
  out.results["sphere_barrier"] = {{"rho", rho}, {"samples", cfg.samples}, {"min_J", s.min}};
  out.check("barrier: min J on the small beta-sphere > max(J(0), J(e)) = 0", s.min > 0.0, s.min, 0.0);

  const RayTrend ray = ray_trend(d, cp.u.values);
  out.results["ray_trend"] = {{"t", ray.t}, {"J", ray.J}};
  out.check("J(t u) decreasing for t >= 1 along the ray", ray.decreasing);

  const PsCheck ps = ps_bound_check(d, cp.trace);
  out.results["ps_bound"] = {{"eta", ps.eta}, {"M", ps.M}, {"worst_margin", ps.worst_margin}};
  out.check("(PS) a posteriori bound (1/p+ - 1/eta)||u_n||^{p-} <= M + ||u_n||", ps.holds, ps.worst_margin, 0.0);

  out.add_function("solution.csv", cp.u);
  out.add_trace("trace.csv", cp.trace);
  out.add_mesh(d.mesh_ptr());
}

inline void run_solve_ekeland(const ExperimentConfig& cfg, ExperimentOutput& out) {
  const Discretization base(cfg.spec);
  out.regime = base.regime();
  require_regime(base, Regime::Sublinear, "q- < p- < q+ < p+");
  const ThresholdEstimate th = estimate_threshold(base, cfg.trials, cfg.seed);
  const double lambda = cfg.lambda_fraction ? *cfg.lambda_fraction * th.star.lambda_star : base.lambda();
  const Discretization d = base.with_lambda(lambda);
  out.results["threshold"] = {{"C2_raw", th.embedding.raw},
                              {"C2_inflated", th.embedding.inflated},
                              {"C2_is_lower_bound", true},
                              {"rho", th.rho},
                              {"lambda_star", th.star.lambda_star},
                              {"gamma", th.star.gamma}};
  out.results["lambda"] = lambda;
  out.check("lambda < lambda*", lambda < th.star.lambda_star, lambda, th.star.lambda_star);

  const NegativeDirection nd = construct_negative_direction(d);
  out.results["negative_direction"] = {{"epsilon0", nd.epsilon0}, {"delta", nd.delta}, {"t_star", nd.t_star},
                                       {"J_at_t_star", nd.J_at_t_star}};
  out.check("initializer J(t* phi) < 0", nd.J_at_t_star < 0.0, nd.J_at_t_star, 0.0);

  const SphereInfimum inf = sphere_infimum(d, th.rho, cfg.samples, cfg.seed);
  double worst_radius = 0.0;
  for (const auto& p : inf.points) worst_radius = std::max(worst_radius, std::abs(beta_norm(d, p) - th.rho));
  out.results["sphere_infimum"] = {{"value", inf.value}, {"samples", cfg.samples}, {"radius_error", worst_radius}};
  out.check("sphere infimum >= gamma / 2", inf.value >= 0.5 * th.star.gamma, inf.value, 0.5 * th.star.gamma);
  out.check("sphere candidates satisfy ||u||_beta = rho within 1e-9", worst_radius <= 1e-9 * std::max(1.0, th.rho),
            worst_radius, 1e-9);

  const CriticalPoint w = ekeland_ball_minimize(d, th.rho, cfg.tol, cfg.restarts, cfg.seed, cfg.max_iters);
  out.results["solution"] = to_json(w);
  report_solution(out, d, w, cfg);
  out.check("negative level J(w) < 0", w.J < 0.0, w.J, 0.0);
  out.check("interiority ||w||_beta < rho", w.beta_norm < th.rho, w.beta_norm, th.rho);

  out.add_function("solution.csv", w.u);
  out.add_trace("trace.csv", w.trace);
  out.add_mesh(d.mesh_ptr());
}

inline constexpr const char* kRegimeNote =
    "The two-solution statement combines the mountain-pass hypothesis p+ < q- with the small-lambda hypothesis "
    "q- < p- < q+ < p+. The two cannot hold for the same exponents, so the positive level is computed on the "
    "primary (superlinear) spec and the negative level on the companion (sublinear) spec.";

inline void run_two_solutions(const ExperimentConfig& cfg, ExperimentOutput& out) {
  const Discretization super(cfg.spec);
  out.regime = super.regime();
  // Without a companion the primary spec is reused, which fails the regime check.
  const Discretization sub(cfg.companion ? *cfg.companion : cfg.spec);
  TwoSolutionOptions opt;
  opt.mountain = mountain_options(cfg);
  opt.embedding_trials = cfg.trials;
  opt.restarts = cfg.restarts;
  opt.lambda_fraction = cfg.lambda_fraction.value_or(0.5);
  opt.seed = cfg.seed;
  opt.max_iters = cfg.max_iters;
  const TwoSolutions two = two_solutions(super, sub, opt);

  out.results["regime_note"] = kRegimeNote;
  out.results["companion_regime"] = to_json(sub.regime());
  out.results["mountain_pass"] = to_json(two.mountain);
  out.results["ball_minimizer"] = to_json(two.ball);
  out.results["c_bar"] = two.mountain.J;
  out.results["c_under"] = two.ball.J;
  out.results["threshold"] = {{"C2_raw", two.threshold.embedding.raw},
                              {"C2_inflated", two.threshold.embedding.inflated},
                              {"C2_is_lower_bound", true},
                              {"rho", two.threshold.rho},
                              {"lambda_star", two.threshold.star.lambda_star},
                              {"gamma", two.threshold.star.gamma}};
  out.results["companion_lambda"] = two.sub.lambda();
  out.results["J_abs"] = {{"mountain_pass", two.J_abs_mountain}, {"ball_minimizer", two.J_abs_ball}};

  out.check("sign separation c_bar > 0 > c_under", two.sign_separated());
  out.check("mountain-pass residual <= tol", two.mountain.converged() && two.mountain.residual <= cfg.tol,
            two.mountain.residual, cfg.tol);
  out.check("ball-minimizer residual <= tol", two.ball.converged() && two.ball.residual <= cfg.tol, two.ball.residual,
            cfg.tol);
  out.check("interiority ||w||_beta < rho", two.ball.beta_norm < two.threshold.rho, two.ball.beta_norm,
            two.threshold.rho);
  const double dm = std::abs(two.J_abs_mountain - two.mountain.J), db = std::abs(two.J_abs_ball - two.ball.J);
  out.check("J(|u|) = J(u) within 1e-12 (mountain pass)", dm <= 1e-12, dm, 1e-12);
  out.check("J(|w|) = J(w) within 1e-12 (ball minimizer)", db <= 1e-12, db, 1e-12);

  out.add_function("solution.csv", two.mountain.u);
  out.add_trace("trace.csv", two.mountain.trace);
  out.add_function("solution_ball.csv", two.ball.u);
  out.add_trace("trace_ball.csv", two.ball.trace);
  out.add_mesh(super.mesh_ptr());
}

inline void run_fountain(const ExperimentConfig& cfg, ExperimentOutput& out) {
  const Discretization d(cfg.spec);
  out.regime = d.regime();
  require_superlinear(d);
  FountainOptions fo;
  fo.seed = cfg.seed;
  const FountainDiagnostics fd = fountain_diagnostics(d, cfg.k_max, fo);
  out.results["fountain"] = {{"k_max", fd.k_max},     {"eigenvalues", fd.eigenvalues}, {"alpha", fd.alpha},
                             {"gamma", fd.gamma},     {"eta", fd.eta},                 {"b", fd.b_lower},
                             {"b_bound", fd.b_bound}, {"a", fd.a_upper}};
  out.check("alpha_k nonincreasing in k", fd.alpha_nonincreasing());
  const double ratio = fd.alpha.back() / fd.alpha.front();
  out.check("alpha_kmax <= 0.6 alpha_1", ratio <= 0.6, ratio, 0.6);
  double worst_b = std::numeric_limits<double>::infinity();
  for (int k = 0; k < fd.k_max; ++k)
    worst_b = std::min(worst_b, fd.b_lower[k] - fd.b_bound[k] + 1e-9 * std::max(1.0, std::abs(fd.b_bound[k])));
  out.check("b_k >= (1/p+ - 1/q+)(lambda q+ alpha_k^{q+})^{p-/(p- - q+)}", worst_b >= 0.0, worst_b, 0.0);
  const double a_max = *std::max_element(fd.a_upper.begin(), fd.a_upper.end());
  out.check("a_k <= 0 at eta_k = 2 gamma_k for all k", fd.a_nonpositive(), a_max, 0.0);
  out.results["fountain"]["eta_sufficient"] = fd.eta_sufficient;
  const bool escalated = std::all_of(fd.eta_sufficient.begin(), fd.eta_sufficient.end(), [](double e) { return e > 0.0; });
  out.check("a_k <= 0 on some larger sphere eta_k in {2, 4, ..., 256} gamma_k (diagnostic)", escalated);

  const MultiplicityResult mr = multiplicity_search(d, cfg.count, mountain_options(cfg));
  json pts = json::array();
  for (const auto& cp : mr.points) pts.push_back(to_json(cp));
  out.results["multiplicity"] = {{"requested", cfg.count}, {"found", mr.points.size()}, {"complete", mr.complete},
                                 {"points", pts}};
  out.check("multiplicity search found the requested number of distinct points", mr.complete,
            static_cast<double>(mr.points.size()), static_cast<double>(cfg.count));
  bool increasing = true, stationary = true;
  for (std::size_t i = 0; i < mr.points.size(); ++i) {
    stationary = stationary && mr.points[i].residual <= cfg.tol;
    if (i > 0) increasing = increasing && mr.points[i - 1].J < mr.points[i].J;
  }
  out.check("critical levels strictly increasing J_1 < J_2 < ...", increasing);
  out.check("all multiplicity residuals <= tol", stationary);
  for (std::size_t i = 0; i < mr.points.size(); ++i) {
    out.add_function(i == 0 ? "solution.csv" : "solution_" + std::to_string(i + 1) + ".csv", mr.points[i].u);
    if (i == 0) out.add_trace("trace.csv", mr.points[i].trace);
  }
  out.add_mesh(d.mesh_ptr());
}

inline void run_oracle(const ExperimentConfig& cfg, ExperimentOutput& out) {
  const Discretization d(cfg.spec);
  out.regime = d.regime();
  double p, q, a, b, beta;
  if (!constant_on(d, cfg.spec.p, &p) || !constant_on(d, cfg.spec.q, &q) || p != 2.0 || q != 2.0)
    throw RegimeError("regime mismatch: the linear oracle requires p = q = 2");
  if (!constant_on(d, cfg.spec.a, &a) || !constant_on(d, cfg.spec.b, &b) || !constant_on(d, cfg.spec.beta, &beta))
    throw RegimeError("regime mismatch: the linear oracle requires constant a, b and beta");
  const Rect& r = cfg.spec.domain.rect;
  const double exact = separable_robin_eigenvalue(r, a, b, beta);

  const std::size_t nx = cfg.spec.domain.nx, ny = cfg.spec.domain.ny;
  std::vector<std::size_t> levels{1};
  if (nx % 4 == 0 && ny % 4 == 0 && nx >= 8 && ny >= 8) levels = {4, 2, 1};
  json rows = json::array();
  std::vector<double> errors;
  double last_residual = 0.0;
  for (std::size_t div : levels) {
    const Mesh mesh = build_rect_mesh(r.x0, r.y0, r.x1, r.y1, nx / div, ny / div);
    const auto pair = linear_robin_eigs(mesh, a, b, beta, 1).front();
    const auto mats = assemble_linear_matrices(mesh);
    const SparseMatrix A = a * mats.K + beta * mats.B, M = b * mats.M;
    last_residual = (A * pair.vector - pair.value * (M * pair.vector)).norm();
    const double err = std::abs(pair.value - exact) / exact;
    errors.push_back(err);
    rows.push_back({{"nx", nx / div}, {"ny", ny / div}, {"lambda_1", pair.value}, {"relative_error", err}});
  }
  std::vector<double> orders;
  for (std::size_t i = 1; i < errors.size(); ++i) orders.push_back(std::log2(errors[i - 1] / errors[i]));
  out.results["exact_lambda_1"] = exact;
  out.results["levels"] = rows;
  out.results["observed_orders"] = orders;
  out.results["eigen_residual"] = last_residual;
  out.check("lambda_1 within 2% of the separable value", errors.back() <= 0.02, errors.back(), 0.02);
  if (orders.empty()) {
    out.not_applicable("observed convergence order >= 1.8", "mesh size not divisible by 4");
  } else {
    const double min_order = *std::min_element(orders.begin(), orders.end());
    out.check("observed convergence order >= 1.8", min_order >= 1.8, min_order, 1.8);
  }
  out.check("eigen residual ||(aK + beta B - lambda b M) u|| <= 1e-10", last_residual <= 1e-10, last_residual, 1e-10);
  out.add_mesh(d.mesh_ptr());
}

inline void run_embed_const(const ExperimentConfig& cfg, ExperimentOutput& out) {
  const Discretization d(cfg.spec);
  out.regime = d.regime();
  const EmbeddingEstimate est = estimate_embedding_constant(d, cfg.trials, cfg.seed);
  out.results["C2_raw"] = est.raw;
  out.results["C2_inflated"] = est.inflated;
  out.results["inflation"] = est.inflation;
  out.results["C2_is_lower_bound"] = true;
  out.results["trial_ratios"] = est.trial_ratios;
  const double rho = std::min(0.5, 0.9 / est.inflated);
  out.results["rho"] = rho;
  const auto& R = d.regime();
  if (R.q_minus < R.p_plus) {
    out.results["lambda_star"] = lambda_star_section(R.p_plus, R.q_minus, rho, est.inflated);
  }
  double p, q;
  if (constant_on(d, cfg.spec.p, &p) && constant_on(d, cfg.spec.q, &q) && p == 2.0 && q == 2.0) {
    const double l1 = field_robin_eigs(d, 1).front().value;
    const double ref = 1.0 / std::sqrt(l1);
    out.results["rayleigh_reference"] = ref;
    const double rel = std::abs(est.raw - ref) / ref;
    out.check("C2 within 5% of lambda_1^{-1/2} (p = q = 2)", rel <= 0.05, rel, 0.05);
  } else {
    out.not_applicable("C2 within 5% of lambda_1^{-1/2} (p = q = 2)", "exponents are not both 2");
  }
  out.check("C2 estimate positive and finite", est.raw > 0.0 && std::isfinite(est.raw), est.raw);
  if (est.maximizer.size()) out.add_function("solution.csv", d.function(est.maximizer));
  out.add_mesh(d.mesh_ptr());
}

/// Replaces non-finite numbers by null and reports whether any were found.
inline bool scrub_nonfinite(json& j) {
  bool clean = true;
  if (j.is_number_float()) {
    if (!std::isfinite(j.get<double>())) {
      j = nullptr;
      clean = false;
    }
  } else if (j.is_structured()) {
    for (auto& x : j) clean = scrub_nonfinite(x) && clean;
  }
  return clean;
}

}  // namespace cli_detail

/// Runs a parsed configuration. Exceptions propagate to the caller.
inline ExperimentOutput execute(const ExperimentConfig& cfg) {
  using namespace cli_detail;
  ExperimentOutput out;
  const std::string& e = cfg.experiment;
  if (e == "validate") run_validate(cfg, out);
  else if (e == "prop-suite") run_prop_suite(cfg, out);
  else if (e == "solve-mp") run_solve_mp(cfg, out);
  else if (e == "solve-ekeland") run_solve_ekeland(cfg, out);
  else if (e == "two-solutions") run_two_solutions(cfg, out);
  else if (e == "fountain") run_fountain(cfg, out);
  else if (e == "oracle") run_oracle(cfg, out);
  else if (e == "embed-const") run_embed_const(cfg, out);
  else throw ConfigError("unknown experiment '" + e + "'");
  return out;
}

struct RunArgs {
  std::string config_path;
  std::filesystem::path out_dir = "out";
  ConfigOverrides overrides;
};

/// Assembles the report document from an experiment's output.
inline json build_report(const ExperimentConfig& cfg, ExperimentOutput& out) {
  json verdicts = json::array();
  bool all = true;
  for (const auto& v : out.verdicts) {
    verdicts.push_back(to_json(v));
    all = all && (!v.applicable || v.pass);
  }
  json report{{"experiment", cfg.experiment}, {"config", cfg.document}, {"seed", cfg.seed}, {"results", out.results}};
  report["regime"] = out.regime ? to_json(*out.regime) : json(nullptr);
  const bool finite = cli_detail::scrub_nonfinite(report);
  verdicts.push_back(to_json(Verdict{"every reported scalar is finite", finite, true, {}, {}, {}}));
  all = all && finite;
  report["verdicts"] = verdicts;
  report["all_verdicts_pass"] = all;
  json files = json::array({"report.json"});
  for (const auto& f : out.files) files.push_back(f.first);
  report["outputs"] = files;
  return report;
}

/// Loads, runs and exports one experiment; returns the process exit code.
/// Diagnostics go to `log`.
inline int run(const RunArgs& args, std::ostream& log = std::cerr) {
  const auto t0 = std::chrono::steady_clock::now();
  std::optional<ExperimentConfig> cfg;
  int code = 0;
  json report;
  auto fail = [&](int c, const char* kind, const std::string& what) {
    code = c;
    log << "error (" << kind << "): " << what << "\n";
    report = {{"error", {{"kind", kind}, {"message", what}}}, {"exit_code", c}};
    if (cfg) {
      report["experiment"] = cfg->experiment;
      report["config"] = cfg->document;
    }
  };
  try {
    cfg = load_config_file(args.config_path, args.overrides);
    ExperimentOutput out = execute(*cfg);
    report = build_report(*cfg, out);
    for (const auto& [name, write] : out.files) write(args.out_dir / name);
    code = report["all_verdicts_pass"].get<bool>() ? 0 : 1;
    if (code != 0) {
      for (const auto& v : report["verdicts"])
        if (v["applicable"].get<bool>() && !v["pass"].get<bool>())
          log << "verdict failed: " << v["relation"].get<std::string>() << "\n";
    }
  } catch (const ConfigError& e) {
    fail(2, "config", e.what());
  } catch (const ValidationError& e) {
    fail(2, "validation", e.what());
  } catch (const RegimeError& e) {
    fail(2, "regime", e.what());
  } catch (const InvalidArgument& e) {
    fail(2, "invalid-argument", e.what());
  } catch (const IoError& e) {
    log << "error (io): " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    fail(1, "solver", e.what());
  } catch (const std::exception& e) {
    fail(1, "internal", e.what());
  }
  try {
    export_report_json(report, args.out_dir / "report.json");
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    export_report_json({{"wall_seconds", secs}, {"experiment", cfg ? json(cfg->experiment) : json(nullptr)}},
                       args.out_dir / "timing.json");
  } catch (const IoError& e) {
    log << "error (io): " << e.what() << "\n";
    return code == 0 ? 1 : code;
  }
  return code;
}

}  // namespace pxrobin

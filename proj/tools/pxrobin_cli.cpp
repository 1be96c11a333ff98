#include <CLI11.hpp>

#include "pxrobin/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Weighted p(x)-Laplacian Robin problem: discretization, critical points and diagnostics"};
  pxrobin::RunArgs args;
  std::string out_dir = "./out";
  std::uint64_t seed = 0;
  double tol = 0.0;
  int max_iters = 0, mesh_n = 0;
  app.add_option("--config", args.config_path, "experiment configuration (JSON)")->required();
  app.add_option("--out", out_dir, "output directory")->capture_default_str();
  auto* o_seed = app.add_option("--seed", seed, "random seed (overrides the config)");
  auto* o_tol = app.add_option("--tol", tol, "residual tolerance")->check(CLI::PositiveNumber);
  auto* o_iters = app.add_option("--max-iters", max_iters, "iteration cap")->check(CLI::PositiveNumber);
  auto* o_mesh = app.add_option("--mesh-n", mesh_n, "cells per side (sets nx = ny)")->check(CLI::PositiveNumber);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  args.out_dir = out_dir;
  if (*o_seed) args.overrides.seed = seed;
  if (*o_tol) args.overrides.tol = tol;
  if (*o_iters) args.overrides.max_iters = max_iters;
  if (*o_mesh) args.overrides.mesh_n = mesh_n;
  return pxrobin::run(args);
}

#include <iostream>

#include <CLI11.hpp>

#include "proxima/cli_driver.hpp"

int main(int argc, char** argv) {
  CLI::App app{"best proximity points and variational inequalities"};
  app.require_subcommand(1);

  proxima::cli::Options opts;
  std::uint64_t seed_value = 0;
  double epsilon_value = 0.0;
  int max_iter_value = 0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", opts.config_path, "problem description (JSON)")->required();
    cmd->add_option("--out", opts.out_dir, "output directory for trace/certificate/report");
    cmd->add_option("--seed", seed_value, "override solver.seed");
    cmd->add_option("--epsilon", epsilon_value, "override solver.epsilon");
    cmd->add_option("--max-iter", max_iter_value, "override solver.max_iterations");
    cmd->add_flag("--json", opts.json, "machine-readable output");
  };

  CLI::App* solve_bpp = app.add_subcommand("solve-bpp", "run the proximal iteration");
  add_common(solve_bpp);
  CLI::App* solve_vi = app.add_subcommand("solve-vi", "solve a variational inequality");
  add_common(solve_vi);
  CLI::App* dist = app.add_subcommand("dist", "print the pair separation d(A,B)");
  add_common(dist);
  CLI::App* check_pair = app.add_subcommand("check-pair", "separation plus A0/B0 verdicts");
  add_common(check_pair);
  check_pair->add_option("--point", opts.points, "query point, e.g. \"1.5,0\" (repeatable)");
  CLI::App* project = app.add_subcommand("project", "project points onto a configured set");
  add_common(project);
  project->add_option("--point", opts.points, "point to project (repeatable)");
  project->add_option("--set", opts.set_name, "target set: A, B or K (default A)");
  CLI::App* check_contraction =
      app.add_subcommand("check-contraction", "sampled contraction constant of the map");
  add_common(check_contraction);
  check_contraction->add_option("--samples", opts.samples, "sample budget (default 200)");

  CLI11_PARSE(app, argc, argv);

  auto apply_overrides = [&](CLI::App* cmd) {
    if (cmd->count("--seed")) opts.seed = seed_value;
    if (cmd->count("--epsilon")) opts.epsilon = epsilon_value;
    if (cmd->count("--max-iter")) opts.max_iter = max_iter_value;
  };

  using namespace proxima::cli;
  for (CLI::App* cmd : {solve_bpp, solve_vi, dist, check_pair, project, check_contraction})
    if (cmd->parsed()) apply_overrides(cmd);

  if (solve_bpp->parsed()) return cmd_solve_bpp(opts, std::cout, std::cerr);
  if (solve_vi->parsed()) return cmd_solve_vi(opts, std::cout, std::cerr);
  if (dist->parsed()) return cmd_dist(opts, std::cout, std::cerr);
  if (check_pair->parsed()) return cmd_check_pair(opts, std::cout, std::cerr);
  if (project->parsed()) return cmd_project(opts, std::cout, std::cerr);
  if (check_contraction->parsed()) return cmd_check_contraction(opts, std::cout, std::cerr);
  return kConfigError;
}

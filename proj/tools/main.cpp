#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "commands.hpp"
#include "metastate/errors.hpp"

namespace {

// Exit-status contract: validation 2, non-degeneracy 3, budget 4, solver 5.
constexpr int kValidationExit = 2;
constexpr int kNonDegeneracyExit = 3;
constexpr int kBudgetExit = 4;
constexpr int kSolverExit = 5;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"metastates of disordered mean-field models"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  int workers = 0;
  long long seed_override = -1;
  bool dump = false;
  app.add_option("--config", config_path, "run configuration file")->required();
  app.add_option("--out", out_dir, "output directory (default: current)");
  app.add_option("--workers", workers, "worker threads (default: hardware)");
  app.add_option("--seed", seed_override, "override every seed in the config");
  app.add_flag("--dump-config", dump, "print the effective configuration and exit");

  auto* solve = app.add_subcommand("solve", "find all free-energy minimizers");
  auto* metastate_cmd =
      app.add_subcommand("metastate", "stability vectors, visibility and weights");
  auto* scan = app.add_subcommand("scan", "locate coexistence parameters by bisection");
  auto* simulate =
      app.add_subcommand("simulate", "exact finite-volume empirical weight estimates");
  auto* plotdata = app.add_subcommand("plotdata", "order-parameter free-energy curve");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kValidationExit;
  }

  try {
    metastate::cli::CommandContext ctx;
    ctx.config = metastate::cli::load_config(config_path);
    ctx.out_dir = out_dir;
    ctx.workers = workers;
    if (seed_override >= 0) {
      ctx.config.solver.seed = static_cast<std::uint64_t>(seed_override);
      ctx.config.weights.seed = static_cast<std::uint64_t>(seed_override);
      ctx.config.simulate.seed = static_cast<std::uint64_t>(seed_override);
    }
    if (dump) {
      std::cout << metastate::cli::dump_config(ctx.config);
      return 0;
    }
    if (solve->parsed()) metastate::cli::cmd_solve(ctx);
    if (metastate_cmd->parsed()) metastate::cli::cmd_metastate(ctx);
    if (scan->parsed()) metastate::cli::cmd_scan(ctx);
    if (simulate->parsed()) metastate::cli::cmd_simulate(ctx);
    if (plotdata->parsed()) metastate::cli::cmd_plotdata(ctx);
    return 0;
  } catch (const metastate::NonDegeneracy1Violation& e) {
    std::fprintf(stderr, "non-degeneracy 1 violated: %s (phi=%.12g, min eigenvalue=%.3g)\n",
                 e.what(), e.phi_value, e.min_eigenvalue);
    return kNonDegeneracyExit;
  } catch (const metastate::NonDegeneracy2Violation& e) {
    std::fprintf(stderr,
                 "non-degeneracy 2 violated: %s (states %zu and %zu, distance %.3g)\n",
                 e.what(), e.first, e.second, e.distance);
    return kNonDegeneracyExit;
  } catch (const metastate::BudgetExceeded& e) {
    std::fprintf(stderr, "enumeration budget exceeded: %s\n", e.what());
    return kBudgetExit;
  } catch (const metastate::SolverDidNotConverge& e) {
    std::fprintf(stderr, "solver did not converge: %s\n", e.what());
    return kSolverExit;
  } catch (const metastate::NoBracket& e) {
    std::fprintf(stderr, "scan failed: %s\n", e.what());
    return kValidationExit;
  } catch (const metastate::ValidationError& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return kValidationExit;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

#include <CLI11.hpp>

#include "commands.hpp"

using crowdscreen::cli::CommonOptions;

namespace {

void add_common(CLI::App* cmd, CommonOptions& options, bool with_mode_both = false) {
  cmd->add_option("--config", options.config_path, "Run configuration file (key = value)")
      ->required();
  cmd->add_option("--out", options.out_dir, "Directory for CSV outputs (default: .)");
  auto* mode = cmd->add_option("--mode", options.mode, "Formula variant override");
  if (with_mode_both) {
    mode->check(CLI::IsMember({"exact", "paper", "both"}));
  } else {
    mode->check(CLI::IsMember({"exact", "paper"}));
  }
  cmd->add_option("--seed", options.seed, "Seed override for randomized commands");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"crowdscreen: model, simulate and optimize crowdsourced screening runs"};
  app.require_subcommand(1);

  CommonOptions options;

  CLI::App* analyze = app.add_subcommand(
      "analyze", "Closed-form survival, error and price figures for the configured task");
  add_common(analyze, options, /*with_mode_both=*/true);

  CLI::App* curve =
      app.add_subcommand("curve", "Budget-vs-loss tradeoff curve (one optimized run per budget)");
  add_common(curve, options);
  curve->add_option("--budgets", options.budgets, "Comma-separated budget list override");

  CLI::App* simulate =
      app.add_subcommand("simulate", "Monte-Carlo replications of the configured task run");
  add_common(simulate, options);

  CLI::App* optimize =
      app.add_subcommand("optimize", "Search task parameters under the configured budget");
  add_common(optimize, options);
  optimize
      ->add_option("--strategy", options.strategy,
                   "single (fixed theta 0.5), iterative, or horizontal")
      ->check(CLI::IsMember({"single", "iterative", "horizontal"}));

  CLI::App* validate =
      app.add_subcommand("validate", "Agreement suite: closed forms vs simulation");
  add_common(validate, options);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return crowdscreen::cli::kExitUsage;
  }

  if (analyze->parsed()) return crowdscreen::cli::run_analyze(options);
  if (curve->parsed()) return crowdscreen::cli::run_curve(options);
  if (simulate->parsed()) return crowdscreen::cli::run_simulate(options);
  if (optimize->parsed()) return crowdscreen::cli::run_optimize(options);
  if (validate->parsed()) return crowdscreen::cli::run_validate(options);
  return crowdscreen::cli::kExitUsage;
}

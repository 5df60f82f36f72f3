#pragma once

#include <optional>
#include <string>

#include "crowdscreen/run_config.hpp"

namespace crowdscreen::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;       // usage, config or validation errors
inline constexpr int kExitInfeasible = 2;  // no parameter choice fits the budget
inline constexpr int kExitStarved = 3;     // simulation ran out of workers

struct CommonOptions {
  std::string config_path;
  std::string out_dir = ".";
  std::string mode;     // "", "exact", "paper" or (analyze only) "both"
  std::optional<std::uint64_t> seed;
  std::string budgets;  // comma-separated override
  std::string strategy = "single";
};

int run_analyze(const CommonOptions& options);
int run_curve(const CommonOptions& options);
int run_simulate(const CommonOptions& options);
int run_optimize(const CommonOptions& options);
int run_validate(const CommonOptions& options);

}  // namespace crowdscreen::cli

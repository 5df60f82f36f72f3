#pragma once

// Flat "key = value" run configuration. Keys follow the simulation notation
// (z, n_t, trsh, p_page, tests_p, price_p, judg_n, papers_n, in_prop,
// fp_cost, fn_cost, ...) so a config file doubles as a parameter sheet.
// '#' starts a comment; blank lines are ignored; unknown or duplicate keys
// are errors.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "crowdscreen/analytic.hpp"
#include "crowdscreen/model.hpp"
#include "crowdscreen/optimizer.hpp"
#include "crowdscreen/simulator.hpp"

namespace crowdscreen {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  // population
  double z = 0.0;
  double smart_share = 0.0;
  double smart_acc = 0.6;
  double acc_low = 0.5;
  double acc_high = 1.0;
  double easy_delta = 0.1;

  // review problem
  std::int64_t papers_n = 1;
  double in_prop = 0.5;  // doubles as the theta_i prior
  double price_p = 0.01;
  double fp_cost = 1.0;  // false inclusion cost
  double fn_cost = 1.0;  // false exclusion cost; cost_ratio = fn_cost / fp_cost

  // task knobs
  int n_t = 0;
  int judg_n = 1;
  int j_t = 1;
  int n_l = 10;
  int p_page = 5;
  int tests_p = 0;
  double trsh = 0.75;

  // execution
  Mode mode = Mode::exact;
  QuizRegime quiz_regime = QuizRegime::all_correct;
  std::optional<std::uint64_t> seed;  // randomized commands require it
  std::int64_t replications = 1;
  std::uint64_t max_workers = 1'000'000;
  std::optional<double> budget;
  std::vector<double> budgets;
  double baseline_fraction = 0.1;
  int rounds = 2;
  double easy_fraction = 0.5;
  std::string dataset;  // optional CSV path; empty -> synthesize

  // search space
  int n_t_min = 0;
  int n_t_max = 10;
  int j_min = 1;
  int j_max = 9;

  WorkerPopulation population() const;
  ScreeningProblem problem() const;
  TaskParameters task_parameters() const;
  SearchSpace search_space() const;
  SimulationConfig simulation_config(std::vector<PaperItem> papers) const;
};

RunConfig parse_config_text(std::string_view text);          // throws ConfigError
RunConfig load_config(const std::filesystem::path& path);    // throws ConfigError
std::string serialize_config(const RunConfig& config);       // parse-able round trip

std::string_view to_string(Mode mode);
Mode mode_from_string(std::string_view s);
std::string_view to_string(QuizRegime regime);
QuizRegime quiz_regime_from_string(std::string_view s);

}  // namespace crowdscreen

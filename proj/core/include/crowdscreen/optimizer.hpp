#pragma once

// Parameter search over (n_tests, judgments, exclusion_threshold) plus the
// multi-run strategies built on top of it:
//
//  - optimize_single_run: exhaustive grid search at a fixed theta prior,
//    constrained by total budget. The grid is tiny (<= 10 x 9 x 9), so the
//    search is exact and the chosen triple can be verified by independent
//    enumeration.
//  - optimize_iterative: rerun the task, re-estimating theta from decisions
//    after each round and re-tuning the exclusion threshold (the only knob
//    still free once votes are collected).
//  - run_horizontal: classify a small baseline slice at theta = 0.5, estimate
//    theta from the outcome, then reoptimize all knobs for the rest.
//  - tradeoff_curve: one optimize_single_run per budget.
//
// Expected losses always use the decision-consistent error probabilities;
// Mode only selects which expected-accuracy formula feeds them.

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "crowdscreen/analytic.hpp"
#include "crowdscreen/model.hpp"
#include "crowdscreen/simulator.hpp"

namespace crowdscreen {

struct SearchSpace {
  int n_tests_min = 0;
  int n_tests_max = 10;
  int judgments_min = 1;
  int judgments_max = 9;  // exclusion threshold ranges over [1, judgments]
  Mode mode = Mode::exact;

  void validate() const;
};

struct OptimizationResult {
  TaskParameters best_params;
  double expected_loss_per_paper = 0.0;
  double expected_price_per_paper = 0.0;
  double theta_i = 0.5;  // prior the loss was evaluated at
  bool feasible = false;
};

struct TradeoffPoint {
  double budget = 0.0;
  TaskParameters params;
  double loss = 0.0;   // per paper
  double price = 0.0;  // per paper
  bool feasible = false;
};

// Exhaustive search over the space; keeps triples with
// price_per_paper * papers_n <= budget and minimizes expected loss per paper.
// Ties break toward lower price, then lower judgments, then lower n_tests,
// then lower exclusion_threshold. Fields of base other than the three
// searched knobs are carried into the result. feasible=false when no triple
// fits the budget.
OptimizationResult optimize_single_run(const WorkerPopulation& population,
                                       const ScreeningProblem& problem, const SearchSpace& space,
                                       double budget, double theta_i, const TaskParameters& base);

// Loss-minimizing exclusion threshold for fixed accuracy and judgments.
int best_exclusion_threshold(double a_bar, int judgments, double theta_i, double cost_ratio);

// Raised by estimate_theta when the decision probabilities are too flat to
// invert (1 - p_ei - p_ie <= 0.05).
class EstimateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bias-corrected prior estimate from observed decisions: with q the include
// fraction, p_ei = P(exclude | include), p_ie = P(include | exclude),
//   theta = (q - p_ie) / (1 - p_ei - p_ie),  clamped to [0.01, 0.99].
double estimate_theta(const std::map<std::string, Label>& decisions, double a_bar, int judgments,
                      int exclusion_threshold);

// Same estimator before clamping; exposed for consistency checks.
double estimate_theta_raw(double include_fraction, double a_bar, int judgments,
                          int exclusion_threshold);

// Where the votes come from: a simulated run, or pre-collected live data.
class VoteSource {
 public:
  virtual ~VoteSource() = default;
  virtual RunOutcome collect(std::span<const PaperItem> papers, const TaskParameters& params) = 0;
};

// Backs a VoteSource with simulate_task_run; every collect() call consumes a
// fresh replication substream of the given seed.
class SimulatorVoteSource final : public VoteSource {
 public:
  SimulatorVoteSource(WorkerPopulation population, ScreeningProblem problem,
                      QuizRegime quiz_regime, std::uint64_t seed,
                      std::uint64_t max_workers = 1'000'000);

  RunOutcome collect(std::span<const PaperItem> papers, const TaskParameters& params) override;

 private:
  WorkerPopulation population_;
  ScreeningProblem problem_;
  QuizRegime quiz_regime_;
  std::uint64_t seed_;
  std::uint64_t max_workers_;
  std::int64_t calls_ = 0;
};

struct IterativeResult {
  OptimizationResult result;        // final round, exclusion threshold re-tuned
  std::vector<double> theta_trace;  // starts at the 0.5 prior
  std::vector<std::string> warnings;
  RunOutcome last_outcome;
};

// Each round: optimize the full grid at the current theta, collect votes on
// the papers, re-estimate theta from the decisions, then re-tune the
// exclusion threshold and reclassify. An unreliable estimate keeps the prior
// theta and records a warning.
IterativeResult optimize_iterative(const WorkerPopulation& population,
                                   const ScreeningProblem& problem, const SearchSpace& space,
                                   double budget, int rounds, std::span<const PaperItem> papers,
                                   VoteSource& source, const TaskParameters& base);

struct HorizontalResult {
  RunOutcome combined;  // merged decisions, votes and pay ledger of both phases
  OptimizationResult phase1;
  OptimizationResult phase2;
  std::int64_t phase1_papers = 0;
  std::int64_t phase2_papers = 0;
  double theta_estimate = 0.5;
  bool feasible = false;
  std::vector<std::string> warnings;
};

// Phase 1 classifies ceil(baseline_fraction * papers) papers at theta = 0.5
// under a proportional budget share; phase 2 reoptimizes for the remainder
// under the budget left after phase 1's committed spend.
HorizontalResult run_horizontal(const WorkerPopulation& population,
                                const ScreeningProblem& problem, const SearchSpace& space,
                                double budget, double baseline_fraction,
                                std::span<const PaperItem> papers, VoteSource& source,
                                const TaskParameters& base);

// One optimize_single_run per budget, ascending. Infeasible budgets yield
// flagged points; along the feasible suffix the loss is non-increasing.
std::vector<TradeoffPoint> tradeoff_curve(const WorkerPopulation& population,
                                          const ScreeningProblem& problem,
                                          const SearchSpace& space, std::vector<double> budgets,
                                          const TaskParameters& base);

}  // namespace crowdscreen

#pragma once

// Monte-Carlo side of the model. Two pieces:
//
//  1. Quiz filtering: an infinite i.i.d. stream of workers takes an initial
//     quiz of n_tests gold questions; survivors form the task population.
//  2. Task execution: survivors label pages of papers_per_page papers plus
//     tests_per_page injected gold questions. After every page the worker's
//     trust (fraction of all test questions answered correctly, quiz
//     included) is refreshed; dropping below trust_threshold voids all of
//     the worker's votes, though they keep their pay. The run loops until
//     every paper holds judgments_per_paper trusted votes.
//
// Everything is deterministic given SimulationConfig.seed: each replication
// and each arriving worker draws from its own substream, so replications are
// order-independent and safe to run in parallel.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "crowdscreen/model.hpp"
#include "crowdscreen/rng.hpp"

namespace crowdscreen {

// Quiz pass rule. all_correct (every answer right) is what the closed-form
// survival posterior assumes; threshold admits anyone whose fraction of
// correct answers reaches trust_threshold.
enum class QuizRegime : std::uint8_t { all_correct, threshold };

struct SimWorker {
  std::uint64_t id = 0;
  WorkerKind kind = WorkerKind::trustworthy;
  double base_accuracy = 0.5;
  int test_correct = 0;
  int test_seen = 0;

  double trust() const {
    return test_seen > 0 ? static_cast<double>(test_correct) / test_seen : 1.0;
  }
};

struct SimulationConfig {
  WorkerPopulation population;
  ScreeningProblem problem;  // unit cost for the pay ledger, cost ratio for metrics
  TaskParameters params;
  std::vector<PaperItem> papers;
  QuizRegime quiz_regime = QuizRegime::all_correct;
  std::int64_t replications = 1;
  std::uint64_t seed = 0;
  std::uint64_t max_workers = 1'000'000;  // arrival cap; exceeded -> incomplete run

  void validate() const;
};

inline constexpr int kAccuracyHistogramBins = 20;

struct QuizReport {
  std::int64_t sampled_n = 0;
  std::array<std::int64_t, 3> sampled_by_kind{};  // indexed by WorkerKind
  std::array<std::int64_t, 3> passed_by_kind{};
  double pass_rate_overall = 0.0;
  double surviving_cheater_fraction = 0.0;  // empirical, random + smart cheaters
  double surviving_accuracy_mean = 0.0;     // mean base accuracy of survivors
  // base accuracy of survivors, binned uniformly over [0.5, 1]
  std::array<std::int64_t, kAccuracyHistogramBins> accuracy_histogram{};

  double pass_rate(WorkerKind kind) const;
};

// Population whose quiz survivors follow the closed-form posterior exactly:
// no smart cheaters, honest accuracy uniform on (0.5, 1), no easy bonus.
WorkerPopulation analytic_matching_population(double z);

// Draws a worker: cheater with probability z (smart with smart_cheater_share
// among those), otherwise trustworthy with uniform accuracy. id is left 0.
SimWorker sample_worker(const WorkerPopulation& population, Pcg32& rng);

// Probability the worker answers an item of this difficulty correctly.
// Random cheaters stay at 0.5 whatever the difficulty; everyone else gets
// base accuracy plus easy_delta (capped at 1) on easy items.
double effective_accuracy(const SimWorker& worker, Difficulty difficulty, double easy_delta);

// Synthetic gold questions, each equally likely easy or average.
std::vector<PaperItem> make_gold_pool(std::int64_t count, Pcg32& rng);

// Worker answers every quiz item; counters are updated in place. Pass per
// regime: all answers correct, or trust >= trust_threshold.
bool run_quiz(SimWorker& worker, std::span<const PaperItem> quiz_items, double easy_delta,
              QuizRegime regime, double trust_threshold, Pcg32& rng);

// Sends n_samples workers through the quiz and reports empirical pass rates
// and the surviving population's composition.
QuizReport simulate_quiz_population(const SimulationConfig& config, std::int64_t n_samples);

// One full task replication (quiz + paged labeling + trust upkeep).
RunOutcome simulate_task_run(const SimulationConfig& config, std::int64_t replication_index);

// All configured replications, in replication order.
std::vector<RunOutcome> simulate_replications(const SimulationConfig& config);

}  // namespace crowdscreen

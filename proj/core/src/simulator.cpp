#include "crowdscreen/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>
#include <string>

namespace crowdscreen {

namespace {

// Substream lanes; keep distinct so quiz sampling, task workers and gold
// pools never share a generator.
constexpr std::uint64_t kLaneQuizSample = 1;
constexpr std::uint64_t kLaneTaskWorker = 2;
constexpr std::uint64_t kLaneGoldPool = 3;

constexpr std::uint64_t kNoWorker = std::numeric_limits<std::uint64_t>::max();

std::size_t kind_index(WorkerKind k) { return static_cast<std::size_t>(k); }

int quiz_pass_minimum(int n_tests, QuizRegime regime, double trust_threshold) {
  if (regime == QuizRegime::all_correct) return n_tests;
  return static_cast<int>(std::ceil(trust_threshold * n_tests - 1e-12));
}

}  // namespace

void SimulationConfig::validate() const {
  population.validate();
  problem.validate();
  params.validate();
  if (replications < 1) throw std::invalid_argument("replications must be >= 1");
  if (max_workers < 1) throw std::invalid_argument("max_workers must be >= 1");
}

double QuizReport::pass_rate(WorkerKind kind) const {
  const auto i = kind_index(kind);
  return sampled_by_kind[i] > 0
             ? static_cast<double>(passed_by_kind[i]) / static_cast<double>(sampled_by_kind[i])
             : 0.0;
}

WorkerPopulation analytic_matching_population(double z) {
  WorkerPopulation pop;
  pop.cheater_fraction = z;
  pop.smart_cheater_share = 0.0;
  pop.honest_accuracy_low = 0.5;
  pop.honest_accuracy_high = 1.0;
  pop.easy_delta = 0.0;
  return pop;
}

SimWorker sample_worker(const WorkerPopulation& population, Pcg32& rng) {
  SimWorker w;
  if (rng.bernoulli(population.cheater_fraction)) {
    if (rng.bernoulli(population.smart_cheater_share)) {
      w.kind = WorkerKind::smart_cheater;
      w.base_accuracy = population.smart_cheater_accuracy;
    } else {
      w.kind = WorkerKind::random_cheater;
      w.base_accuracy = 0.5;
    }
  } else {
    w.kind = WorkerKind::trustworthy;
    w.base_accuracy = rng.uniform(population.honest_accuracy_low, population.honest_accuracy_high);
  }
  return w;
}

double effective_accuracy(const SimWorker& worker, Difficulty difficulty, double easy_delta) {
  if (worker.kind == WorkerKind::random_cheater) return 0.5;
  if (difficulty == Difficulty::easy) return std::min(1.0, worker.base_accuracy + easy_delta);
  return worker.base_accuracy;
}

std::vector<PaperItem> make_gold_pool(std::int64_t count, Pcg32& rng) {
  std::vector<PaperItem> pool;
  pool.reserve(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i) {
    PaperItem item;
    item.id = "gold-" + std::to_string(i);
    item.gold_label = rng.bernoulli(0.5) ? Label::include : Label::exclude;
    item.difficulty = rng.bernoulli(0.5) ? Difficulty::easy : Difficulty::average;
    pool.push_back(std::move(item));
  }
  return pool;
}

bool run_quiz(SimWorker& worker, std::span<const PaperItem> quiz_items, double easy_delta,
              QuizRegime regime, double trust_threshold, Pcg32& rng) {
  int correct = 0;
  for (const PaperItem& item : quiz_items) {
    if (rng.bernoulli(effective_accuracy(worker, item.difficulty, easy_delta))) ++correct;
  }
  worker.test_correct += correct;
  worker.test_seen += static_cast<int>(quiz_items.size());
  return correct >= quiz_pass_minimum(static_cast<int>(quiz_items.size()), regime, trust_threshold);
}

QuizReport simulate_quiz_population(const SimulationConfig& config, std::int64_t n_samples) {
  config.validate();
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");

  // One shared quiz, as a requester would field it.
  Pcg32 pool_rng = substream(config.seed, kLaneGoldPool, 0);
  const std::vector<PaperItem> quiz = make_gold_pool(config.params.n_tests, pool_rng);

  QuizReport report;
  report.sampled_n = n_samples;
  std::int64_t cheaters_passed = 0;
  std::int64_t passed = 0;
  double accuracy_sum = 0.0;

  for (std::int64_t i = 0; i < n_samples; ++i) {
    Pcg32 rng = substream(config.seed, kLaneQuizSample, static_cast<std::uint64_t>(i));
    SimWorker w = sample_worker(config.population, rng);
    w.id = static_cast<std::uint64_t>(i);
    ++report.sampled_by_kind[kind_index(w.kind)];
    if (!run_quiz(w, quiz, config.population.easy_delta, config.quiz_regime,
                  config.params.trust_threshold, rng))
      continue;
    ++passed;
    ++report.passed_by_kind[kind_index(w.kind)];
    if (w.kind != WorkerKind::trustworthy) ++cheaters_passed;
    accuracy_sum += w.base_accuracy;
    const int bin = std::min(kAccuracyHistogramBins - 1,
                             static_cast<int>((w.base_accuracy - 0.5) / 0.5 * kAccuracyHistogramBins));
    ++report.accuracy_histogram[static_cast<std::size_t>(std::max(0, bin))];
  }

  report.pass_rate_overall = static_cast<double>(passed) / static_cast<double>(n_samples);
  if (passed > 0) {
    report.surviving_cheater_fraction =
        static_cast<double>(cheaters_passed) / static_cast<double>(passed);
    report.surviving_accuracy_mean = accuracy_sum / static_cast<double>(passed);
  }
  return report;
}

RunOutcome simulate_task_run(const SimulationConfig& config, std::int64_t replication_index) {
  config.validate();
  if (config.papers.empty()) throw std::invalid_argument("simulate_task_run: no papers");

  const TaskParameters& params = config.params;
  const auto paper_count = static_cast<int>(config.papers.size());
  const std::uint64_t rep = static_cast<std::uint64_t>(replication_index);

  // Gold pool: quiz questions up front, injected page tests drawn from the rest.
  const std::int64_t pool_size = params.n_tests + (params.tests_per_page > 0 ? 128 : 0);
  Pcg32 pool_rng = substream(config.seed, kLaneGoldPool, rep, 1);
  const std::vector<PaperItem> gold_pool = make_gold_pool(std::max<std::int64_t>(pool_size, 0), pool_rng);
  const std::span<const PaperItem> quiz{gold_pool.data(),
                                        static_cast<std::size_t>(params.n_tests)};
  const std::int64_t page_test_pool = pool_size - params.n_tests;

  // Pay per non-test label; the (N_l + N_t)/N_l factor compensates quiz work,
  // so a full worker earns unit_cost * (N_l + N_t).
  const double pay_per_label =
      config.problem.unit_cost *
      (static_cast<double>(params.labels_per_worker + params.n_tests) / params.labels_per_worker);

  RunOutcome outcome;
  std::vector<int> votes_needed(static_cast<std::size_t>(paper_count),
                                params.judgments_per_paper);
  std::deque<int> queue;
  for (int p = 0; p < paper_count; ++p) queue.push_back(p);

  // stamp[p] == worker id  <=>  this worker already voted on p
  std::vector<std::uint64_t> vote_stamp(static_cast<std::size_t>(paper_count), kNoWorker);

  struct WorkerVote {
    int paper = 0;
    std::size_t entry = 0;  // index into outcome.votes.entries
  };

  std::uint64_t arrivals = 0;
  while (!queue.empty() && arrivals < config.max_workers) {
    const std::uint64_t worker_id = arrivals++;
    Pcg32 rng = substream(config.seed, kLaneTaskWorker, rep, worker_id);
    SimWorker worker = sample_worker(config.population, rng);
    worker.id = worker_id;

    if (!run_quiz(worker, quiz, config.population.easy_delta, config.quiz_regime,
                  params.trust_threshold, rng))
      continue;  // failed the quiz: never enters the task, never paid

    TrustTrajectory trajectory;
    trajectory.worker_id = worker_id;
    trajectory.kind = worker.kind;
    trajectory.trust.push_back(worker.trust());

    std::vector<WorkerVote> worker_votes;
    bool distrusted = false;
    int labels_left = params.labels_per_worker;

    while (labels_left > 0 && !queue.empty()) {
      // Deal a page round-robin, skipping papers this worker has voted on.
      std::vector<int> page;
      std::vector<int> skipped;
      const int want = std::min(params.papers_per_page, labels_left);
      for (std::size_t scan = queue.size(); scan > 0 && static_cast<int>(page.size()) < want;
           --scan) {
        const int p = queue.front();
        queue.pop_front();
        if (vote_stamp[static_cast<std::size_t>(p)] == worker_id) {
          skipped.push_back(p);
        } else {
          page.push_back(p);
        }
      }
      for (int p : skipped) queue.push_back(p);
      if (page.empty()) break;  // nothing assignable left for this worker

      for (int p : page) {
        const PaperItem& paper = config.papers[static_cast<std::size_t>(p)];
        const double acc = effective_accuracy(worker, paper.difficulty,
                                              config.population.easy_delta);
        const Label vote = rng.bernoulli(acc)
                               ? paper.gold_label
                               : (paper.gold_label == Label::include ? Label::exclude
                                                                      : Label::include);
        vote_stamp[static_cast<std::size_t>(p)] = worker_id;
        worker_votes.push_back({p, outcome.votes.entries.size()});
        outcome.votes.entries.push_back({paper.id, worker_id, vote, true});
        if (--votes_needed[static_cast<std::size_t>(p)] > 0) queue.push_back(p);
      }
      labels_left -= static_cast<int>(page.size());
      outcome.realized_cost += pay_per_label * static_cast<double>(page.size());

      // Injected test questions, then the trust refresh.
      for (int t = 0; t < params.tests_per_page; ++t) {
        const PaperItem& item =
            gold_pool[static_cast<std::size_t>(params.n_tests +
                                               static_cast<std::int64_t>(rng.below(
                                                   static_cast<std::uint64_t>(page_test_pool))))];
        ++worker.test_seen;
        if (rng.bernoulli(effective_accuracy(worker, item.difficulty,
                                             config.population.easy_delta)))
          ++worker.test_correct;
      }
      trajectory.trust.push_back(worker.trust());

      if (worker.trust() < params.trust_threshold) {
        distrusted = true;
        break;
      }
    }

    if (distrusted) {
      // Retroactively void the worker's votes; shorted papers re-enter the queue.
      for (const WorkerVote& v : worker_votes) {
        outcome.votes.entries[v.entry].trusted = false;
        if (votes_needed[static_cast<std::size_t>(v.paper)]++ == 0) queue.push_back(v.paper);
      }
    }
    trajectory.ended_trusted = !distrusted;
    outcome.trust_trajectories.push_back(std::move(trajectory));
  }

  outcome.complete = queue.empty();

  // Decisions for every paper that holds its full quota of trusted votes.
  std::vector<std::vector<Label>> trusted_votes(static_cast<std::size_t>(paper_count));
  std::map<std::string, int> paper_index;
  for (int p = 0; p < paper_count; ++p)
    paper_index[config.papers[static_cast<std::size_t>(p)].id] = p;
  for (const VoteEntry& e : outcome.votes.entries) {
    if (e.trusted)
      trusted_votes[static_cast<std::size_t>(paper_index.at(e.paper_id))].push_back(e.vote);
  }

  std::map<std::string, Label> gold;
  for (int p = 0; p < paper_count; ++p) {
    const PaperItem& paper = config.papers[static_cast<std::size_t>(p)];
    gold[paper.id] = paper.gold_label;
    if (votes_needed[static_cast<std::size_t>(p)] == 0) {
      outcome.decisions[paper.id] =
          classify(trusted_votes[static_cast<std::size_t>(p)], params.exclusion_threshold);
    }
  }

  if (!outcome.decisions.empty()) {
    outcome.metrics =
        evaluate(outcome.decisions, gold, config.problem.cost_ratio, outcome.realized_cost);
  }
  return outcome;
}

std::vector<RunOutcome> simulate_replications(const SimulationConfig& config) {
  config.validate();
  std::vector<RunOutcome> runs;
  runs.reserve(static_cast<std::size_t>(config.replications));
  for (std::int64_t r = 0; r < config.replications; ++r) runs.push_back(simulate_task_run(config, r));
  return runs;
}

}  // namespace crowdscreen

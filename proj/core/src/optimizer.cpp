#include "crowdscreen/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace crowdscreen {

namespace {

constexpr double kLossTieEps = 1e-12;
constexpr double kThetaClampLow = 0.01;
constexpr double kThetaClampHigh = 0.99;

double loss_at(double a_bar, int judgments, int exclusion_threshold, double theta_i,
               double cost_ratio) {
  const double p_fe = false_exclusion_prob(a_bar, judgments, exclusion_threshold, theta_i);
  const double p_fi = false_inclusion_prob(a_bar, judgments, exclusion_threshold, theta_i);
  return expected_loss_per_paper(p_fe, p_fi, cost_ratio);
}

struct Candidate {
  double loss = 0.0;
  double price = 0.0;
  int judgments = 0;
  int n_tests = 0;
  int exclusion_threshold = 0;
};

// Lexicographic (loss, price, J, N_t, J_t); losses within kLossTieEps of each
// other count as tied so fp noise cannot reorder genuinely symmetric triples.
bool better(const Candidate& a, const Candidate& b) {
  const double scale = std::max({1.0, std::fabs(a.loss), std::fabs(b.loss)});
  if (a.loss < b.loss - kLossTieEps * scale) return true;
  if (b.loss < a.loss - kLossTieEps * scale) return false;
  if (a.price != b.price) return a.price < b.price;
  if (a.judgments != b.judgments) return a.judgments < b.judgments;
  if (a.n_tests != b.n_tests) return a.n_tests < b.n_tests;
  return a.exclusion_threshold < b.exclusion_threshold;
}

double include_fraction(const std::map<std::string, Label>& decisions) {
  std::int64_t includes = 0;
  for (const auto& [id, label] : decisions) {
    if (label == Label::include) ++includes;
  }
  return static_cast<double>(includes) / static_cast<double>(decisions.size());
}

// Reclassify from the trusted votes in an outcome after the exclusion
// threshold changed.
void reclassify(RunOutcome& outcome, std::span<const PaperItem> papers, double cost_ratio,
                int exclusion_threshold) {
  std::map<std::string, std::vector<Label>> trusted;
  for (const VoteEntry& e : outcome.votes.entries) {
    if (e.trusted) trusted[e.paper_id].push_back(e.vote);
  }
  std::map<std::string, Label> decisions;
  for (auto& [paper_id, votes] : trusted) {
    if (outcome.decisions.count(paper_id) > 0)
      decisions[paper_id] = classify(votes, exclusion_threshold);
  }
  outcome.decisions = std::move(decisions);
  if (outcome.decisions.empty()) return;
  std::map<std::string, Label> gold;
  for (const PaperItem& p : papers) gold[p.id] = p.gold_label;
  outcome.metrics = evaluate(outcome.decisions, gold, cost_ratio, outcome.realized_cost);
}

}  // namespace

void SearchSpace::validate() const {
  if (n_tests_min < 0 || n_tests_min > n_tests_max)
    throw std::invalid_argument("n_tests range must be nonempty and nonnegative");
  if (judgments_min < 1 || judgments_min > judgments_max)
    throw std::invalid_argument("judgments range must be nonempty, min >= 1");
  if (judgments_max > 25) throw std::invalid_argument("judgments_max must be <= 25");
}

OptimizationResult optimize_single_run(const WorkerPopulation& population,
                                       const ScreeningProblem& problem, const SearchSpace& space,
                                       double budget, double theta_i, const TaskParameters& base) {
  population.validate();
  problem.validate();
  space.validate();
  if (budget <= 0.0) throw std::invalid_argument("budget must be > 0");
  if (theta_i < 0.0 || theta_i > 1.0) throw std::invalid_argument("theta_i must be in [0,1]");

  const double per_paper_budget = budget / static_cast<double>(problem.papers_n);

  OptimizationResult result;
  result.best_params = base;
  result.theta_i = theta_i;

  bool found = false;
  Candidate best;
  for (int n_tests = space.n_tests_min; n_tests <= space.n_tests_max; ++n_tests) {
    const double a_bar = expected_accuracy(population.cheater_fraction, n_tests, space.mode);
    for (int judgments = space.judgments_min; judgments <= space.judgments_max; ++judgments) {
      const double price =
          price_per_paper(problem.unit_cost, judgments, n_tests, base.labels_per_worker);
      if (price > per_paper_budget) continue;
      for (int threshold = 1; threshold <= judgments; ++threshold) {
        Candidate c{loss_at(a_bar, judgments, threshold, theta_i, problem.cost_ratio), price,
                    judgments, n_tests, threshold};
        if (!found || better(c, best)) {
          best = c;
          found = true;
        }
      }
    }
  }

  if (!found) return result;  // feasible stays false
  result.feasible = true;
  result.best_params.n_tests = best.n_tests;
  result.best_params.judgments_per_paper = best.judgments;
  result.best_params.exclusion_threshold = best.exclusion_threshold;
  result.expected_loss_per_paper = best.loss;
  result.expected_price_per_paper = best.price;
  return result;
}

int best_exclusion_threshold(double a_bar, int judgments, double theta_i, double cost_ratio) {
  int best = 1;
  double best_loss = loss_at(a_bar, judgments, 1, theta_i, cost_ratio);
  for (int threshold = 2; threshold <= judgments; ++threshold) {
    const double loss = loss_at(a_bar, judgments, threshold, theta_i, cost_ratio);
    if (loss < best_loss - kLossTieEps * std::max(1.0, best_loss)) {
      best_loss = loss;
      best = threshold;
    }
  }
  return best;
}

double estimate_theta_raw(double include_fraction, double a_bar, int judgments,
                          int exclusion_threshold) {
  const double p_ei = binomial_upper_tail(judgments, exclusion_threshold, 1.0 - a_bar);
  const double p_ie =
      binomial_upper_tail(judgments, judgments - exclusion_threshold + 1, 1.0 - a_bar);
  const double denom = 1.0 - p_ei - p_ie;
  if (denom <= 0.05)
    throw EstimateError("estimate_theta: decisions are uninformative (1 - p_ei - p_ie = " +
                        std::to_string(denom) + ")");
  return (include_fraction - p_ie) / denom;
}

double estimate_theta(const std::map<std::string, Label>& decisions, double a_bar, int judgments,
                      int exclusion_threshold) {
  if (decisions.empty()) throw std::invalid_argument("estimate_theta: no decisions");
  const double raw =
      estimate_theta_raw(include_fraction(decisions), a_bar, judgments, exclusion_threshold);
  return std::clamp(raw, kThetaClampLow, kThetaClampHigh);
}

SimulatorVoteSource::SimulatorVoteSource(WorkerPopulation population, ScreeningProblem problem,
                                         QuizRegime quiz_regime, std::uint64_t seed,
                                         std::uint64_t max_workers)
    : population_(population),
      problem_(problem),
      quiz_regime_(quiz_regime),
      seed_(seed),
      max_workers_(max_workers) {}

RunOutcome SimulatorVoteSource::collect(std::span<const PaperItem> papers,
                                        const TaskParameters& params) {
  SimulationConfig config;
  config.population = population_;
  config.problem = problem_;
  config.problem.papers_n = static_cast<std::int64_t>(papers.size());
  config.params = params;
  config.papers.assign(papers.begin(), papers.end());
  config.quiz_regime = quiz_regime_;
  config.seed = seed_;
  config.max_workers = max_workers_;
  return simulate_task_run(config, calls_++);
}

IterativeResult optimize_iterative(const WorkerPopulation& population,
                                   const ScreeningProblem& problem, const SearchSpace& space,
                                   double budget, int rounds, std::span<const PaperItem> papers,
                                   VoteSource& source, const TaskParameters& base) {
  if (rounds < 1) throw std::invalid_argument("rounds must be >= 1");
  if (papers.empty()) throw std::invalid_argument("optimize_iterative: no papers");

  IterativeResult out;
  double theta = 0.5;
  out.theta_trace.push_back(theta);

  for (int round = 0; round < rounds; ++round) {
    OptimizationResult res = optimize_single_run(population, problem, space, budget, theta, base);
    if (!res.feasible) {
      out.result = res;
      return out;
    }

    RunOutcome outcome = source.collect(papers, res.best_params);
    const double a_bar =
        expected_accuracy(population.cheater_fraction, res.best_params.n_tests, space.mode);

    if (outcome.decisions.empty()) {
      out.warnings.push_back("round " + std::to_string(round + 1) +
                             ": no decided papers, keeping theta");
    } else {
      try {
        theta = estimate_theta(outcome.decisions, a_bar, res.best_params.judgments_per_paper,
                               res.best_params.exclusion_threshold);
      } catch (const EstimateError& e) {
        out.warnings.push_back("round " + std::to_string(round + 1) + ": " + e.what() +
                               ", keeping theta");
      }
    }
    out.theta_trace.push_back(theta);

    // Post-run, the exclusion threshold is the only knob left: re-tune it for
    // the revised theta and reclassify the collected votes.
    const int threshold = best_exclusion_threshold(
        a_bar, res.best_params.judgments_per_paper, theta, problem.cost_ratio);
    if (threshold != res.best_params.exclusion_threshold) {
      res.best_params.exclusion_threshold = threshold;
      reclassify(outcome, papers, problem.cost_ratio, threshold);
    }
    res.expected_loss_per_paper = loss_at(a_bar, res.best_params.judgments_per_paper, threshold,
                                          theta, problem.cost_ratio);
    res.theta_i = theta;

    out.result = res;
    out.last_outcome = std::move(outcome);
  }
  return out;
}

HorizontalResult run_horizontal(const WorkerPopulation& population,
                                const ScreeningProblem& problem, const SearchSpace& space,
                                double budget, double baseline_fraction,
                                std::span<const PaperItem> papers, VoteSource& source,
                                const TaskParameters& base) {
  if (!(baseline_fraction > 0.0 && baseline_fraction < 1.0))
    throw std::invalid_argument("baseline_fraction must be in (0,1)");
  if (papers.empty()) throw std::invalid_argument("run_horizontal: no papers");

  const auto total = static_cast<std::int64_t>(papers.size());
  const auto phase1_n = std::min<std::int64_t>(
      total, static_cast<std::int64_t>(
                 std::ceil(baseline_fraction * static_cast<double>(total))));
  const auto phase2_n = total - phase1_n;

  HorizontalResult out;
  out.phase1_papers = phase1_n;
  out.phase2_papers = phase2_n;

  const std::span<const PaperItem> phase1_papers = papers.first(static_cast<std::size_t>(phase1_n));
  const std::span<const PaperItem> phase2_papers = papers.subspan(static_cast<std::size_t>(phase1_n));

  // Phase 1: budget share proportional to the paper split, prior at 0.5.
  const double budget1 = budget * static_cast<double>(phase1_n) / static_cast<double>(total);
  ScreeningProblem problem1 = problem;
  problem1.papers_n = phase1_n;
  out.phase1 = optimize_single_run(population, problem1, space, budget1, 0.5, base);
  if (!out.phase1.feasible) return out;  // abort: nothing to build on

  RunOutcome outcome1 = source.collect(phase1_papers, out.phase1.best_params);

  const double a_bar1 =
      expected_accuracy(population.cheater_fraction, out.phase1.best_params.n_tests, space.mode);
  double theta = 0.5;
  if (outcome1.decisions.empty()) {
    out.warnings.push_back("phase 1 decided no papers, keeping theta = 0.5");
  } else {
    try {
      theta = estimate_theta(outcome1.decisions, a_bar1,
                             out.phase1.best_params.judgments_per_paper,
                             out.phase1.best_params.exclusion_threshold);
    } catch (const EstimateError& e) {
      out.warnings.push_back(std::string(e.what()) + ", keeping theta = 0.5");
    }
  }
  out.theta_estimate = theta;

  out.combined = outcome1;

  if (phase2_n == 0) {
    out.phase2 = out.phase1;
    out.feasible = true;
    return out;
  }

  // Phase 2: whatever budget is not committed by phase 1, prior at theta-hat.
  const double committed1 =
      out.phase1.expected_price_per_paper * static_cast<double>(phase1_n);
  const double budget2 = budget - committed1;
  ScreeningProblem problem2 = problem;
  problem2.papers_n = phase2_n;
  if (budget2 <= 0.0) return out;  // feasible stays false
  out.phase2 = optimize_single_run(population, problem2, space, budget2, theta, base);
  if (!out.phase2.feasible) return out;

  RunOutcome outcome2 = source.collect(phase2_papers, out.phase2.best_params);

  // Merge the two phases into one ledger.
  out.combined.realized_cost += outcome2.realized_cost;
  out.combined.complete = outcome1.complete && outcome2.complete;
  for (const auto& [id, label] : outcome2.decisions) out.combined.decisions[id] = label;
  out.combined.votes.entries.insert(out.combined.votes.entries.end(),
                                    outcome2.votes.entries.begin(),
                                    outcome2.votes.entries.end());
  out.combined.trust_trajectories.insert(out.combined.trust_trajectories.end(),
                                         outcome2.trust_trajectories.begin(),
                                         outcome2.trust_trajectories.end());
  if (!out.combined.decisions.empty()) {
    std::map<std::string, Label> gold;
    for (const PaperItem& p : papers) gold[p.id] = p.gold_label;
    out.combined.metrics = evaluate(out.combined.decisions, gold, problem.cost_ratio,
                                    out.combined.realized_cost);
  }
  out.feasible = true;
  return out;
}

std::vector<TradeoffPoint> tradeoff_curve(const WorkerPopulation& population,
                                          const ScreeningProblem& problem,
                                          const SearchSpace& space, std::vector<double> budgets,
                                          const TaskParameters& base) {
  if (budgets.empty()) throw std::invalid_argument("tradeoff_curve: no budgets");
  for (double b : budgets) {
    if (b <= 0.0) throw std::invalid_argument("tradeoff_curve: budgets must be > 0");
  }
  std::sort(budgets.begin(), budgets.end());

  std::vector<TradeoffPoint> curve;
  curve.reserve(budgets.size());
  for (double budget : budgets) {
    OptimizationResult res =
        optimize_single_run(population, problem, space, budget, problem.theta_i, base);
    TradeoffPoint point;
    point.budget = budget;
    point.feasible = res.feasible;
    if (res.feasible) {
      point.params = res.best_params;
      point.loss = res.expected_loss_per_paper;
      point.price = res.expected_price_per_paper;
    } else {
      point.params = base;
      point.params.n_tests = 0;
      point.params.judgments_per_paper = 0;
      point.params.exclusion_threshold = 0;
      point.loss = std::numeric_limits<double>::infinity();
      point.price = std::numeric_limits<double>::infinity();
    }
    curve.push_back(point);
  }
  return curve;
}

}  // namespace crowdscreen

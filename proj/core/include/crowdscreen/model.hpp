#pragma once

// Shared vocabulary for crowdsourced screening runs: worker populations,
// screening problems, task knobs, votes, decisions and quality metrics.
// Everything here is a plain value type; instances are immutable after
// construction and safe to share across threads.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace crowdscreen {

enum class Label : std::uint8_t { include, exclude };
enum class Difficulty : std::uint8_t { easy, average };
enum class WorkerKind : std::uint8_t { random_cheater, smart_cheater, trustworthy };

std::string_view to_string(Label l);
std::string_view to_string(Difficulty d);
std::string_view to_string(WorkerKind k);
Label label_from_string(std::string_view s);
Difficulty difficulty_from_string(std::string_view s);

// Crowd mixture: a fraction z of cheaters (some of them "smart", answering a
// little above chance), the rest honest workers whose accuracy is drawn
// uniformly from [honest_accuracy_low, honest_accuracy_high].
struct WorkerPopulation {
  double cheater_fraction = 0.0;       // z
  double smart_cheater_share = 0.0;    // fraction of cheaters that are smart
  double smart_cheater_accuracy = 0.6;
  double honest_accuracy_low = 0.5;
  double honest_accuracy_high = 1.0;
  double easy_delta = 0.1;             // accuracy bonus on easy items, capped at 1

  void validate() const;  // throws std::invalid_argument
};

// Review-side inputs: how many candidate papers, the prior that a paper is
// in scope, how much worse a false exclusion is than a false inclusion, and
// the price paid per vote.
struct ScreeningProblem {
  std::int64_t papers_n = 1;
  double theta_i = 0.5;     // prior P(true label = include)
  double cost_ratio = 1.0;  // false-exclusion cost in false-inclusion units
  double unit_cost = 0.01;  // currency per vote

  void validate() const;
};

// The knobs of a single crowdsourcing run.
struct TaskParameters {
  int n_tests = 0;              // N_t, initial quiz questions
  int judgments_per_paper = 1;  // J, trusted votes collected per paper
  int exclusion_threshold = 1;  // J_t, exclude once this many exclusion votes arrive
  int labels_per_worker = 10;   // N_l, non-test labels per trusted worker
  int papers_per_page = 5;      // simulation only
  int tests_per_page = 0;       // simulation only, injected gold questions per page
  double trust_threshold = 0.75;  // minimum fraction of correct test answers

  void validate() const;
};

struct PaperItem {
  std::string id;
  Label gold_label = Label::exclude;
  Difficulty difficulty = Difficulty::average;
};

struct VoteEntry {
  std::string paper_id;
  std::uint64_t worker_id = 0;
  Label vote = Label::exclude;
  bool trusted = true;  // counted at aggregation time
};

struct VoteMatrix {
  std::vector<VoteEntry> entries;
};

struct EvaluationMetrics {
  double accuracy = 0.0;
  double false_exclusion_rate = 0.0;
  double false_inclusion_rate = 0.0;
  double loss_per_paper = 0.0;             // FE_rate * cost_ratio + FI_rate
  double cost_per_classified_paper = 0.0;  // realized cost / decided papers
  std::int64_t decided_n = 0;
};

struct TrustTrajectory {
  std::uint64_t worker_id = 0;
  WorkerKind kind = WorkerKind::trustworthy;
  std::vector<double> trust;  // after the quiz, then after each page
  bool ended_trusted = true;
};

// Result of one task run. decisions covers exactly the papers that reached
// judgments_per_paper trusted votes; complete is false when the worker supply
// cap was exhausted first.
struct RunOutcome {
  std::map<std::string, Label> decisions;
  EvaluationMetrics metrics;
  double realized_cost = 0.0;  // includes pay to workers distrusted mid-run
  std::vector<TrustTrajectory> trust_trajectories;
  VoteMatrix votes;
  bool complete = true;
};

// Classification function: exclude iff at least exclusion_threshold of the
// votes say exclude. Throws std::invalid_argument on an empty vote list or a
// threshold outside [1, votes.size()].
Label classify(std::span<const Label> votes, int exclusion_threshold);

// Rates over decided papers; every decided paper must have a gold label and
// at least one paper must be decided (CCP is undefined otherwise).
EvaluationMetrics evaluate(const std::map<std::string, Label>& decisions,
                           const std::map<std::string, Label>& gold, double cost_ratio,
                           double realized_cost);

}  // namespace crowdscreen

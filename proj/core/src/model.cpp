#include "crowdscreen/model.hpp"

#include <sstream>
#include <stdexcept>

namespace crowdscreen {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

void require(bool ok, const char* msg) {
  if (!ok) fail(msg);
}

}  // namespace

std::string_view to_string(Label l) { return l == Label::include ? "include" : "exclude"; }

std::string_view to_string(Difficulty d) { return d == Difficulty::easy ? "easy" : "average"; }

std::string_view to_string(WorkerKind k) {
  switch (k) {
    case WorkerKind::random_cheater: return "random_cheater";
    case WorkerKind::smart_cheater: return "smart_cheater";
    case WorkerKind::trustworthy: return "trustworthy";
  }
  return "trustworthy";
}

Label label_from_string(std::string_view s) {
  if (s == "include") return Label::include;
  if (s == "exclude") return Label::exclude;
  fail("unknown label '" + std::string(s) + "' (expected include|exclude)");
}

Difficulty difficulty_from_string(std::string_view s) {
  if (s == "easy") return Difficulty::easy;
  if (s == "average") return Difficulty::average;
  fail("unknown difficulty '" + std::string(s) + "' (expected easy|average)");
}

void WorkerPopulation::validate() const {
  require(cheater_fraction >= 0.0 && cheater_fraction <= 1.0, "cheater_fraction must be in [0,1]");
  require(smart_cheater_share >= 0.0 && smart_cheater_share <= 1.0,
          "smart_cheater_share must be in [0,1]");
  require(smart_cheater_accuracy >= 0.5 && smart_cheater_accuracy <= 1.0,
          "smart_cheater_accuracy must be in [0.5,1]");
  require(honest_accuracy_low >= 0.5, "honest_accuracy_low must be >= 0.5");
  // low == high is a point prior, which the simulator supports
  require(honest_accuracy_low <= honest_accuracy_high, "honest accuracy range must be nonempty");
  require(honest_accuracy_high <= 1.0, "honest_accuracy_high must be <= 1");
  require(easy_delta >= 0.0 && easy_delta <= 0.5, "easy_delta must be in [0,0.5]");
}

void ScreeningProblem::validate() const {
  require(papers_n >= 1, "papers_n must be >= 1");
  require(theta_i >= 0.0 && theta_i <= 1.0, "theta_i must be in [0,1]");
  require(cost_ratio > 0.0, "cost_ratio must be > 0");
  require(unit_cost > 0.0, "unit_cost must be > 0");
}

void TaskParameters::validate() const {
  require(n_tests >= 0, "n_tests must be >= 0");
  require(judgments_per_paper >= 1, "judgments_per_paper must be >= 1");
  require(exclusion_threshold >= 1 && exclusion_threshold <= judgments_per_paper,
          "exclusion_threshold must be in [1, judgments_per_paper]");
  require(labels_per_worker >= 1, "labels_per_worker must be >= 1");
  require(papers_per_page >= 1, "papers_per_page must be >= 1");
  require(tests_per_page >= 0, "tests_per_page must be >= 0");
  require(trust_threshold >= 0.5 && trust_threshold <= 1.0, "trust_threshold must be in [0.5,1]");
}

Label classify(std::span<const Label> votes, int exclusion_threshold) {
  require(!votes.empty(), "classify: no votes, no decision possible");
  require(exclusion_threshold >= 1 && exclusion_threshold <= static_cast<int>(votes.size()),
          "classify: exclusion_threshold must be in [1, votes.size()]");
  int exclusions = 0;
  for (Label v : votes) {
    if (v == Label::exclude) ++exclusions;
  }
  return exclusions >= exclusion_threshold ? Label::exclude : Label::include;
}

EvaluationMetrics evaluate(const std::map<std::string, Label>& decisions,
                           const std::map<std::string, Label>& gold, double cost_ratio,
                           double realized_cost) {
  require(!decisions.empty(), "evaluate: no decided papers, CCP undefined");
  require(cost_ratio > 0.0, "evaluate: cost_ratio must be > 0");

  std::int64_t correct = 0, false_exclusions = 0, false_inclusions = 0;
  for (const auto& [paper_id, decision] : decisions) {
    auto it = gold.find(paper_id);
    if (it == gold.end()) fail("evaluate: decided paper '" + paper_id + "' has no gold label");
    if (decision == it->second) {
      ++correct;
    } else if (decision == Label::exclude) {
      ++false_exclusions;
    } else {
      ++false_inclusions;
    }
  }

  const auto decided = static_cast<double>(decisions.size());
  EvaluationMetrics m;
  m.decided_n = static_cast<std::int64_t>(decisions.size());
  m.accuracy = static_cast<double>(correct) / decided;
  m.false_exclusion_rate = static_cast<double>(false_exclusions) / decided;
  m.false_inclusion_rate = static_cast<double>(false_inclusions) / decided;
  m.loss_per_paper = m.false_exclusion_rate * cost_ratio + m.false_inclusion_rate;
  m.cost_per_classified_paper = realized_cost / decided;
  return m;
}

}  // namespace crowdscreen

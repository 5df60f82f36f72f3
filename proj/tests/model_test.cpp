#include <doctest.h>

#include <stdexcept>
#include <vector>

#include "crowdscreen/model.hpp"

using namespace crowdscreen;

namespace {
constexpr Label kIn = Label::include;
constexpr Label kEx = Label::exclude;
}  // namespace

TEST_CASE("classify follows the exclusion-vote threshold") {
  CHECK(classify(std::vector<Label>{kEx, kEx, kIn}, 2) == kEx);
  CHECK(classify(std::vector<Label>{kIn, kIn, kIn}, 1) == kIn);
  // 2 exclusion votes < threshold 3
  CHECK(classify(std::vector<Label>{kEx, kIn, kIn, kEx}, 3) == kIn);
}

TEST_CASE("classify rejects empty votes and bad thresholds") {
  CHECK_THROWS_AS(classify(std::vector<Label>{}, 1), std::invalid_argument);
  CHECK_THROWS_AS(classify(std::vector<Label>{kIn}, 0), std::invalid_argument);
  CHECK_THROWS_AS(classify(std::vector<Label>{kIn}, 2), std::invalid_argument);
}

TEST_CASE("classify is monotone in exclusion votes") {
  // Over every vote pattern up to 6 votes: flipping one include to exclude
  // never flips the decision exclude -> include.
  for (int j = 1; j <= 6; ++j) {
    for (int j_t = 1; j_t <= j; ++j_t) {
      for (std::uint32_t pattern = 0; pattern < (1u << j); ++pattern) {
        std::vector<Label> votes;
        for (int v = 0; v < j; ++v) votes.push_back((pattern & (1u << v)) ? kEx : kIn);
        const Label before = classify(votes, j_t);
        for (int v = 0; v < j; ++v) {
          if (votes[v] == kEx) continue;
          std::vector<Label> flipped = votes;
          flipped[v] = kEx;
          const Label after = classify(flipped, j_t);
          if (before == kEx) CHECK(after == kEx);
        }
      }
    }
  }
}

TEST_CASE("classify threshold extremes") {
  for (int j = 1; j <= 6; ++j) {
    for (std::uint32_t pattern = 0; pattern < (1u << j); ++pattern) {
      std::vector<Label> votes;
      int exclusions = 0;
      for (int v = 0; v < j; ++v) {
        const bool ex = pattern & (1u << v);
        votes.push_back(ex ? kEx : kIn);
        exclusions += ex ? 1 : 0;
      }
      // threshold 1: any exclusion vote excludes
      CHECK(classify(votes, 1) == (exclusions >= 1 ? kEx : kIn));
      // threshold J: unanimous exclusion required
      CHECK(classify(votes, j) == (exclusions == j ? kEx : kIn));
    }
  }
}

TEST_CASE("evaluate computes rates, loss and CCP") {
  std::map<std::string, Label> gold, decisions;
  for (int i = 0; i < 100; ++i) {
    const std::string id = "p" + std::to_string(i);
    const Label truth = i < 50 ? kIn : kEx;
    gold[id] = truth;
    Label decision = truth;
    if (i < 3) decision = kEx;         // 3 false exclusions (gold include)
    if (i >= 50 && i < 55) decision = kIn;  // 5 false inclusions (gold exclude)
    decisions[id] = decision;
  }
  const EvaluationMetrics m = evaluate(decisions, gold, 10.0, 9.0);
  CHECK(m.decided_n == 100);
  CHECK(m.false_exclusion_rate == doctest::Approx(0.03).epsilon(1e-12));
  CHECK(m.false_inclusion_rate == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(m.accuracy == doctest::Approx(0.92).epsilon(1e-12));
  CHECK(m.loss_per_paper == doctest::Approx(0.35).epsilon(1e-12));
  CHECK(m.cost_per_classified_paper == doctest::Approx(0.09).epsilon(1e-12));
  CHECK(m.accuracy + m.false_exclusion_rate + m.false_inclusion_rate ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("evaluate identity and boundary cases") {
  std::map<std::string, Label> gold{{"a", kIn}, {"b", kEx}};

  const EvaluationMetrics perfect = evaluate(gold, gold, 5.0, 1.0);
  CHECK(perfect.accuracy == 1.0);
  CHECK(perfect.loss_per_paper == 0.0);

  std::map<std::string, Label> all_include{{"a", kIn}, {"b", kIn}};
  std::map<std::string, Label> all_excluded{{"a", kEx}, {"b", kEx}};
  const EvaluationMetrics boundary = evaluate(all_excluded, all_include, 1.0, 1.0);
  CHECK(boundary.false_exclusion_rate == 1.0);
  CHECK(boundary.loss_per_paper == 1.0);
}

TEST_CASE("evaluate error paths") {
  std::map<std::string, Label> gold{{"a", kIn}};
  CHECK_THROWS_AS(evaluate({}, gold, 1.0, 0.0), std::invalid_argument);
  std::map<std::string, Label> decisions{{"missing", kIn}};
  CHECK_THROWS_AS(evaluate(decisions, gold, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("type invariants are enforced") {
  WorkerPopulation pop;
  pop.cheater_fraction = 1.5;
  CHECK_THROWS_AS(pop.validate(), std::invalid_argument);
  pop.cheater_fraction = 0.2;
  pop.honest_accuracy_low = 0.4;
  CHECK_THROWS_AS(pop.validate(), std::invalid_argument);
  pop.honest_accuracy_low = 0.6;
  CHECK_NOTHROW(pop.validate());
  // point prior is allowed
  pop.honest_accuracy_low = pop.honest_accuracy_high = 0.8;
  CHECK_NOTHROW(pop.validate());

  ScreeningProblem problem;
  problem.papers_n = 0;
  CHECK_THROWS_AS(problem.validate(), std::invalid_argument);
  problem.papers_n = 10;
  problem.cost_ratio = 0.0;
  CHECK_THROWS_AS(problem.validate(), std::invalid_argument);

  TaskParameters params;
  params.judgments_per_paper = 3;
  params.exclusion_threshold = 4;
  CHECK_THROWS_AS(params.validate(), std::invalid_argument);
  params.exclusion_threshold = 2;
  params.trust_threshold = 0.4;
  CHECK_THROWS_AS(params.validate(), std::invalid_argument);
  params.trust_threshold = 0.75;
  CHECK_NOTHROW(params.validate());
}

#pragma once

// Closed-form engine for the screening model: quiz-survival posterior,
// expected post-quiz accuracy, false-exclusion/inclusion probabilities,
// expected loss and price per paper.
//
// The cheater prior is a point mass of weight z at accuracy 0.5; honest
// accuracy is uniform on (0.5, 1):
//
//   pdf(a) = z * delta(a - 0.5) + 2 * (1 - z),   0.5 <= a <= 1
//
// Two formula variants exist and Mode selects between them:
//
//   exact  - direct Bayes computation under the prior above (default, and
//            what every optimizer/simulator agreement check is pinned to);
//   paper  - the model's original printed derivation, which treats the quiz
//            likelihood as conjugate in the scaled variable 2a-1. It differs
//            from exact Bayes in the quiz pass-rate denominator, the survivor
//            density family / accuracy moment, and the false-inclusion
//            summation bound. Kept callable so the two can be compared.

#include <cstdint>

namespace crowdscreen {

enum class Mode : std::uint8_t { exact, paper };

// Density of a mixed distribution at a point: the continuous part plus the
// weight of an atom sitting exactly at the query point (zero elsewhere).
struct MixtureDensity {
  double density = 0.0;
  double point_mass = 0.0;
};

// Worker-accuracy prior at a. Throws std::domain_error outside [0.5, 1].
MixtureDensity accuracy_prior_density(double a, double z);

// P(worker answers all n_tests quiz questions correctly), marginal over the
// prior:  z * 0.5^n + (1-z) * Q(n)  with
//   Q_exact(n) = 2 (1 - 0.5^{n+1}) / (n+1)
//   Q_paper(n) = 2/(n+1) * (1 - 1/(2^n + 1))
double pass_probability(double z, int n_tests, Mode mode = Mode::exact);

// Posterior cheater fraction among quiz survivors:
//   z_s = z * 0.5^n / pass_probability(z, n, mode)
double surviving_cheater_fraction(double z, int n_tests, Mode mode = Mode::exact);

// Continuous survivor accuracy density at a (plus the 0.5 atom of weight z_s
// when a == 0.5). exact: proportional to a^n on (0.5, 1), total continuous
// mass 1 - z_s; paper: 2 (1 - z_s) (n+1) (2a - 1)^n.
MixtureDensity survivor_density(double a, double z_s, int n_tests, Mode mode = Mode::exact);

// Expected accuracy of a quiz survivor. The cheater weight is always the
// Bayes posterior z_s; Mode selects the honest-survivor mean:
//   exact: E[a | survived] = integral ratio of a^{n+1} / a^n over (0.5, 1)
//   paper: 0.5 + 0.5 (1+n)/(2+n)
double expected_accuracy(double z, int n_tests, Mode mode = Mode::exact);

struct SurvivorPosterior {
  double surviving_cheater_fraction = 0.0;  // z_s (Bayes form)
  int n_tests = 0;
  Mode mode = Mode::exact;
  double expected_accuracy = 0.75;  // a-bar_s under the mode's moment formula
};

SurvivorPosterior survivor_posterior(double z, int n_tests, Mode mode = Mode::exact);

// P(K >= k_min) for K ~ Binomial(n, p). Terms are assembled in log space so
// the sum stays usable for n up to 64.
double binomial_upper_tail(int n, int k_min, double p);

// P(true label include AND >= exclusion_threshold wrong exclusion votes):
//   theta_i * sum_{k=J_t}^{J} C(J,k) (1-a)^k a^{J-k}
double false_exclusion_prob(double a_bar, int judgments, int exclusion_threshold, double theta_i);

// P(true label exclude AND fewer than exclusion_threshold exclusion votes).
// exact counts >= J - J_t + 1 wrong inclusion votes (complement of the
// decision rule); paper reproduces the printed bound J - J_t, whose decision
// regions overlap at k = J - J_t.
double false_inclusion_prob(double a_bar, int judgments, int exclusion_threshold, double theta_i,
                            Mode mode = Mode::exact);

double expected_loss_per_paper(double p_fe, double p_fi, double cost_ratio);
double total_expected_loss(double loss_per_paper, std::int64_t papers_n);

// Price per classified paper, including the quiz surcharge:
//   PPP = unit_cost * J * (N_l + N_t) / N_l
double price_per_paper(double unit_cost, int judgments, int n_tests, int labels_per_worker);
double task_budget(double price_pp, std::int64_t papers_n);

}  // namespace crowdscreen

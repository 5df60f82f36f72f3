#pragma once

// Test-only oracles, deliberately independent of the closed forms they check:
// brute-force enumeration over vote outcomes, plain quadrature, and a naive
// rejection sampler for the quiz posterior.

#include <cmath>
#include <cstdint>
#include <functional>
#include <utility>

#include "crowdscreen/rng.hpp"

namespace oracles {

struct ErrorProbs {
  double p_fe = 0.0;
  double p_fi = 0.0;
};

// Enumerates all 2^J vote outcomes under both truths. A vote is wrong with
// probability 1 - a_bar; the decision is exclude iff the exclusion votes
// reach the threshold.
inline ErrorProbs enumerate_error_probs(double a_bar, int judgments, int exclusion_threshold,
                                        double theta_i) {
  const double wrong = 1.0 - a_bar;
  ErrorProbs out;
  for (std::uint32_t pattern = 0; pattern < (1u << judgments); ++pattern) {
    double prob = 1.0;
    int wrong_votes = 0;
    for (int v = 0; v < judgments; ++v) {
      if (pattern & (1u << v)) {
        prob *= wrong;
        ++wrong_votes;
      } else {
        prob *= a_bar;
      }
    }
    // truth = include: wrong votes are exclusion votes
    if (wrong_votes >= exclusion_threshold) out.p_fe += theta_i * prob;
    // truth = exclude: wrong votes are inclusion votes, exclusions = J - wrong
    if (judgments - wrong_votes < exclusion_threshold) out.p_fi += (1.0 - theta_i) * prob;
  }
  return out;
}

// Total probability of a misclassification, same enumeration.
inline double enumerate_misclassification_mass(double a_bar, int judgments,
                                               int exclusion_threshold, double theta_i) {
  const ErrorProbs p = enumerate_error_probs(a_bar, judgments, exclusion_threshold, theta_i);
  return p.p_fe + p.p_fi;
}

// Composite Simpson on [lo, hi]; intervals must be even.
inline double simpson(const std::function<double(double)>& f, double lo, double hi,
                      int intervals = 1 << 14) {
  const double h = (hi - lo) / intervals;
  double sum = f(lo) + f(hi);
  for (int i = 1; i < intervals; ++i) sum += f(lo + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

struct QuizMonteCarlo {
  double pass_rate = 0.0;
  double surviving_cheater_fraction = 0.0;
  double surviving_accuracy_mean = 0.0;
};

// Rejection sampler for the all-correct quiz under the mixed prior
// (point mass z at 0.5, honest uniform on (0.5, 1)).
inline QuizMonteCarlo quiz_rejection_sample(double z, int n_tests, std::int64_t samples,
                                            std::uint64_t seed) {
  crowdscreen::Pcg32 rng(seed, 0x7043);
  std::int64_t passed = 0, cheaters_passed = 0;
  double accuracy_sum = 0.0;
  for (std::int64_t i = 0; i < samples; ++i) {
    const bool cheater = rng.bernoulli(z);
    const double a = cheater ? 0.5 : rng.uniform(0.5, 1.0);
    bool pass = true;
    for (int t = 0; t < n_tests && pass; ++t) pass = rng.bernoulli(a);
    if (!pass) continue;
    ++passed;
    if (cheater) ++cheaters_passed;
    accuracy_sum += a;
  }
  QuizMonteCarlo out;
  out.pass_rate = static_cast<double>(passed) / static_cast<double>(samples);
  if (passed > 0) {
    out.surviving_cheater_fraction =
        static_cast<double>(cheaters_passed) / static_cast<double>(passed);
    out.surviving_accuracy_mean = accuracy_sum / static_cast<double>(passed);
  }
  return out;
}

}  // namespace oracles

#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "crowdscreen/analytic.hpp"
#include "oracles.hpp"

using namespace crowdscreen;

TEST_CASE("accuracy prior density") {
  CHECK(accuracy_prior_density(0.75, 0.4).density == doctest::Approx(1.2).epsilon(1e-12));
  CHECK(accuracy_prior_density(0.6, 0.0).density == doctest::Approx(2.0).epsilon(1e-12));
  // atom of weight z sits exactly at 0.5
  const MixtureDensity at_half = accuracy_prior_density(0.5, 0.2);
  CHECK(at_half.point_mass == doctest::Approx(0.2));
  CHECK(at_half.density == doctest::Approx(1.6));
  CHECK(accuracy_prior_density(0.75, 0.2).point_mass == 0.0);
  CHECK_THROWS_AS(accuracy_prior_density(0.3, 0.2), std::domain_error);
  CHECK_THROWS_AS(accuracy_prior_density(1.1, 0.2), std::domain_error);
}

TEST_CASE("pass probability closed forms") {
  for (double z : {0.0, 0.3, 0.7, 1.0}) {
    CHECK(pass_probability(z, 0, Mode::exact) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pass_probability(z, 0, Mode::paper) == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(pass_probability(0.5, 1, Mode::exact) == doctest::Approx(0.625).epsilon(1e-12));
  CHECK(pass_probability(0.3, 3, Mode::exact) == doctest::Approx(0.365625).epsilon(1e-12));
  // printed variant: denominator term 1 - 1/(2^n + 1)
  CHECK(pass_probability(0.3, 3, Mode::paper) ==
        doctest::Approx(0.0375 + 0.7 * 0.5 * (8.0 / 9.0)).epsilon(1e-12));

  // honest mass -> 0: only cheaters remain
  for (int n : {1, 3, 7}) {
    CHECK(pass_probability(1.0, n, Mode::exact) ==
          doctest::Approx(std::ldexp(1.0, -n)).epsilon(1e-12));
    CHECK(pass_probability(1.0, n, Mode::paper) ==
          doctest::Approx(std::ldexp(1.0, -n)).epsilon(1e-12));
  }
}

TEST_CASE("pass probability agrees with quadrature of the prior") {
  // P(pass) = z 0.5^n + integral over (0.5,1) of 2(1-z) a^n
  for (double z : {0.0, 0.3, 0.8}) {
    for (int n : {1, 2, 5}) {
      const double quad = oracles::simpson(
          [&](double a) { return 2.0 * (1.0 - z) * std::pow(a, n); }, 0.5, 1.0);
      CHECK(pass_probability(z, n, Mode::exact) ==
            doctest::Approx(z * std::ldexp(1.0, -n) + quad).epsilon(1e-10));
    }
  }
}

TEST_CASE("surviving cheater fraction") {
  CHECK(surviving_cheater_fraction(0.3, 0, Mode::exact) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(surviving_cheater_fraction(0.0, 5, Mode::exact) == 0.0);
  CHECK(surviving_cheater_fraction(1.0, 5, Mode::exact) == doctest::Approx(1.0).epsilon(1e-12));
  // hand-derived: 0.0375 / 0.365625 = 4/39
  CHECK(surviving_cheater_fraction(0.3, 3, Mode::exact) ==
        doctest::Approx(4.0 / 39.0).epsilon(1e-12));
  CHECK(surviving_cheater_fraction(0.3, 3, Mode::exact) == doctest::Approx(0.1026).epsilon(1e-3));
  // printed variant: 27/251
  CHECK(surviving_cheater_fraction(0.3, 3, Mode::paper) ==
        doctest::Approx(27.0 / 251.0).epsilon(1e-12));
}

TEST_CASE("surviving cheater fraction is non-increasing in the quiz length") {
  for (Mode mode : {Mode::exact, Mode::paper}) {
    for (double z : {0.1, 0.3, 0.5, 0.9}) {
      double prev = surviving_cheater_fraction(z, 0, mode);
      CHECK(prev == doctest::Approx(z));
      for (int n = 1; n <= 10; ++n) {
        const double cur = surviving_cheater_fraction(z, n, mode);
        CHECK(cur <= prev + 1e-12);
        prev = cur;
      }
    }
  }
}

TEST_CASE("survivor density") {
  CHECK(survivor_density(1.0, 0.0, 0, Mode::exact).density == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(survivor_density(1.0, 0.0, 0, Mode::paper).density == doctest::Approx(2.0).epsilon(1e-12));
  // exact mode is proportional to a^n
  const double ratio = survivor_density(0.75, 0.0, 1, Mode::exact).density /
                       survivor_density(1.0, 0.0, 1, Mode::exact).density;
  CHECK(ratio == doctest::Approx(0.75).epsilon(1e-12));
  // printed conjugate form in the scaled variable: 2 * 2 * (2a-1)^1
  CHECK(survivor_density(0.75, 0.0, 1, Mode::paper).density ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK(survivor_density(0.5, 0.25, 2, Mode::exact).point_mass == doctest::Approx(0.25));
  CHECK_THROWS_AS(survivor_density(0.2, 0.1, 1, Mode::exact), std::domain_error);
}

TEST_CASE("survivor density integrates to the honest survivor mass") {
  for (Mode mode : {Mode::exact, Mode::paper}) {
    for (int n : {0, 1, 3, 6}) {
      for (double z_s : {0.0, 0.2, 0.7}) {
        const double mass = oracles::simpson(
            [&](double a) { return survivor_density(a, z_s, n, mode).density; }, 0.5, 1.0);
        CHECK(mass == doctest::Approx(1.0 - z_s).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("expected accuracy") {
  CHECK(expected_accuracy(0.0, 0, Mode::exact) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(expected_accuracy(0.0, 0, Mode::paper) == doctest::Approx(0.75).epsilon(1e-12));
  // printed moment formula at the Bayes z_s = 4/39: 67/78
  CHECK(expected_accuracy(0.3, 3, Mode::paper) == doctest::Approx(67.0 / 78.0).epsilon(1e-12));
  CHECK(expected_accuracy(0.3, 3, Mode::paper) == doctest::Approx(0.85897).epsilon(2e-5));
  // exact honest mean for n=3 is (31/160)/(15/64) = 0.82666...
  const double exact_expected = (4.0 / 39.0) * 0.5 + (35.0 / 39.0) * (31.0 / 160.0) / (15.0 / 64.0);
  CHECK(expected_accuracy(0.3, 3, Mode::exact) == doctest::Approx(exact_expected).epsilon(1e-12));
  CHECK(expected_accuracy(0.3, 3, Mode::exact) == doctest::Approx(0.79323).epsilon(7e-4));
}

TEST_CASE("expected accuracy agrees with the survivor-density moment") {
  // E[a] = z_s / 2 + integral a * f(a) da with the exact density
  for (double z : {0.1, 0.4}) {
    for (int n : {0, 2, 5}) {
      const double z_s = surviving_cheater_fraction(z, n, Mode::exact);
      const double moment = oracles::simpson(
          [&](double a) { return a * survivor_density(a, z_s, n, Mode::exact).density; }, 0.5,
          1.0);
      CHECK(expected_accuracy(z, n, Mode::exact) ==
            doctest::Approx(0.5 * z_s + moment).epsilon(1e-9));
    }
  }
}

TEST_CASE("expected accuracy is monotone in quiz length and cheater fraction") {
  for (Mode mode : {Mode::exact, Mode::paper}) {
    for (double z : {0.0, 0.2, 0.6}) {
      double prev = expected_accuracy(z, 0, mode);
      for (int n = 1; n <= 10; ++n) {
        const double cur = expected_accuracy(z, n, mode);
        CHECK(cur >= prev - 1e-12);
        prev = cur;
      }
    }
    for (int n : {0, 2, 6}) {
      double prev = expected_accuracy(0.0, n, mode);
      for (double z : {0.2, 0.4, 0.6, 0.8, 1.0}) {
        const double cur = expected_accuracy(z, n, mode);
        CHECK(cur <= prev + 1e-12);
        prev = cur;
      }
    }
  }
}

TEST_CASE("survivor posterior bundles the Bayes fraction and the mode's moment") {
  const SurvivorPosterior p = survivor_posterior(0.3, 3, Mode::paper);
  CHECK(p.surviving_cheater_fraction == doctest::Approx(4.0 / 39.0).epsilon(1e-12));
  CHECK(p.expected_accuracy == doctest::Approx(67.0 / 78.0).epsilon(1e-12));
  CHECK(p.n_tests == 3);
  CHECK(p.mode == Mode::paper);
  for (double z : {0.1, 0.5}) {
    for (int n : {0, 1, 4}) {
      const SurvivorPosterior q = survivor_posterior(z, n, Mode::exact);
      CHECK(q.surviving_cheater_fraction <= z + 1e-12);
      CHECK(q.expected_accuracy >= 0.5);
      CHECK(q.expected_accuracy <= 1.0);
    }
  }
}

TEST_CASE("false exclusion and inclusion probabilities") {
  CHECK(false_exclusion_prob(1.0, 5, 2, 0.7) == 0.0);
  CHECK(false_exclusion_prob(0.9, 3, 2, 0.0) == 0.0);
  CHECK(false_exclusion_prob(0.9, 3, 2, 0.5) == doctest::Approx(0.014).epsilon(1e-12));
  CHECK(false_inclusion_prob(1.0, 3, 2, 0.5) == 0.0);
  CHECK(false_inclusion_prob(0.9, 3, 2, 0.5) == doctest::Approx(0.014).epsilon(1e-12));
  CHECK(false_inclusion_prob(0.9, 1, 1, 0.5) == doctest::Approx(0.05).epsilon(1e-12));
  // printed bound J - J_t: sums one extra term
  CHECK(false_inclusion_prob(0.9, 3, 2, 0.5, Mode::paper) ==
        doctest::Approx(0.1355).epsilon(1e-12));
}

TEST_CASE("single-vote identities") {
  for (double a : {0.6, 0.75, 0.9}) {
    for (double theta : {0.2, 0.5, 0.8}) {
      CHECK(false_exclusion_prob(a, 1, 1, theta) ==
            doctest::Approx(theta * (1.0 - a)).epsilon(1e-12));
      CHECK(false_inclusion_prob(a, 1, 1, theta) ==
            doctest::Approx((1.0 - theta) * (1.0 - a)).epsilon(1e-12));
    }
  }
}

TEST_CASE("error probabilities match brute-force enumeration") {
  for (int j = 1; j <= 7; ++j) {
    for (int j_t = 1; j_t <= j; ++j_t) {
      for (double a : {0.6, 0.75, 0.9}) {
        for (double theta : {0.2, 0.5, 0.8}) {
          const oracles::ErrorProbs expected = oracles::enumerate_error_probs(a, j, j_t, theta);
          CHECK(std::fabs(false_exclusion_prob(a, j, j_t, theta) - expected.p_fe) < 1e-12);
          CHECK(std::fabs(false_inclusion_prob(a, j, j_t, theta) - expected.p_fi) < 1e-12);
          // FE + FI is the total misclassification mass
          const double mass = oracles::enumerate_misclassification_mass(a, j, j_t, theta);
          CHECK(std::fabs(false_exclusion_prob(a, j, j_t, theta) +
                          false_inclusion_prob(a, j, j_t, theta) - mass) < 1e-12);
        }
      }
    }
  }
}

TEST_CASE("binomial upper tail edge cases") {
  CHECK(binomial_upper_tail(5, 0, 0.3) == 1.0);
  CHECK(binomial_upper_tail(5, -2, 0.3) == 1.0);
  CHECK(binomial_upper_tail(5, 6, 0.3) == 0.0);
  CHECK(binomial_upper_tail(5, 3, 0.0) == 0.0);
  CHECK(binomial_upper_tail(5, 3, 1.0) == 1.0);
  CHECK(binomial_upper_tail(64, 32, 0.5) > 0.0);  // stays finite in log space
  CHECK(binomial_upper_tail(64, 1, 0.5) <= 1.0);
}

TEST_CASE("expected loss per paper") {
  CHECK(expected_loss_per_paper(0.014, 0.014, 10.0) == doctest::Approx(0.154).epsilon(1e-12));
  CHECK(expected_loss_per_paper(0.0, 0.0, 100.0) == 0.0);
  CHECK(expected_loss_per_paper(0.05, 0.05, 1.0) == doctest::Approx(0.10).epsilon(1e-12));
  CHECK(total_expected_loss(0.154, 1000) == doctest::Approx(154.0).epsilon(1e-12));
}

TEST_CASE("price per paper") {
  CHECK(price_per_paper(0.02, 3, 0, 10) == doctest::Approx(0.06).epsilon(1e-12));
  CHECK(price_per_paper(0.02, 3, 5, 10) == 0.09);  // exact in doubles
  CHECK(price_per_paper(0.01, 5, 5, 5) == doctest::Approx(0.10).epsilon(1e-12));
  CHECK(task_budget(0.09, 1000) == doctest::Approx(90.0).epsilon(1e-12));
}

TEST_CASE("price per paper is monotone in every argument") {
  const double uc[] = {0.01, 0.02, 0.05};
  const int j[] = {1, 3, 7};
  const int nt[] = {0, 2, 8};
  const int nl[] = {1, 5, 20};
  for (double u : uc)
    for (int a : j)
      for (int b : nt)
        for (int c : nl) {
          const double base = price_per_paper(u, a, b, c);
          CHECK(price_per_paper(u + 0.01, a, b, c) > base);
          CHECK(price_per_paper(u, a + 1, b, c) > base);
          CHECK(price_per_paper(u, a, b + 1, c) > base);
          CHECK(price_per_paper(u, a, b, c + 1) < base);
        }
}

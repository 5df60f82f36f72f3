#include "crowdscreen/analytic.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace crowdscreen {

namespace {

void check_unit(double x, const char* name) {
  if (!(x >= 0.0 && x <= 1.0))
    throw std::domain_error(std::string(name) + " must be in [0,1], got " + std::to_string(x));
}

void check_accuracy_domain(double a) {
  if (!(a >= 0.5 && a <= 1.0))
    throw std::domain_error("accuracy must be in [0.5,1], got " + std::to_string(a));
}

void check_n_tests(int n) {
  if (n < 0) throw std::domain_error("n_tests must be >= 0");
}

void check_thresholds(int judgments, int exclusion_threshold) {
  if (judgments < 1) throw std::domain_error("judgments must be >= 1");
  if (exclusion_threshold < 1 || exclusion_threshold > judgments)
    throw std::domain_error("exclusion_threshold must be in [1, judgments]");
}

// integral of 2 a^k over (0.5, 1) = 2 (1 - 0.5^{k+1}) / (k+1)
double honest_power_mass(int k) { return 2.0 * (1.0 - std::ldexp(1.0, -(k + 1))) / (k + 1); }

// Honest pass rate per mode; equals honest_power_mass in exact mode, and the
// printed 2/(n+1) (1 - 1/(2^n + 1)) otherwise. They coincide at n = 0.
double honest_pass_rate(int n_tests, Mode mode) {
  if (mode == Mode::exact) return honest_power_mass(n_tests);
  return 2.0 / (n_tests + 1) * (1.0 - 1.0 / (std::ldexp(1.0, n_tests) + 1.0));
}

}  // namespace

MixtureDensity accuracy_prior_density(double a, double z) {
  check_accuracy_domain(a);
  check_unit(z, "z");
  MixtureDensity d;
  d.density = 2.0 * (1.0 - z);
  d.point_mass = (a == 0.5) ? z : 0.0;
  return d;
}

double pass_probability(double z, int n_tests, Mode mode) {
  check_unit(z, "z");
  check_n_tests(n_tests);
  const double cheater_rate = std::ldexp(1.0, -n_tests);  // 0.5^n
  return z * cheater_rate + (1.0 - z) * honest_pass_rate(n_tests, mode);
}

double surviving_cheater_fraction(double z, int n_tests, Mode mode) {
  check_unit(z, "z");
  check_n_tests(n_tests);
  if (z == 0.0) return 0.0;
  const double numerator = z * std::ldexp(1.0, -n_tests);
  return numerator / pass_probability(z, n_tests, mode);
}

MixtureDensity survivor_density(double a, double z_s, int n_tests, Mode mode) {
  check_accuracy_domain(a);
  check_unit(z_s, "z_s");
  check_n_tests(n_tests);
  MixtureDensity d;
  d.point_mass = (a == 0.5) ? z_s : 0.0;
  if (mode == Mode::exact) {
    // 2 a^n (1 - z_s) / (2 integral a^n) : continuous mass normalized to 1 - z_s
    d.density = (1.0 - z_s) * 2.0 * std::pow(a, n_tests) / honest_power_mass(n_tests);
  } else {
    d.density = 2.0 * (1.0 - z_s) * (n_tests + 1) * std::pow(2.0 * a - 1.0, n_tests);
  }
  return d;
}

double expected_accuracy(double z, int n_tests, Mode mode) {
  const double z_s = surviving_cheater_fraction(z, n_tests, Mode::exact);
  double honest_mean;
  if (mode == Mode::exact) {
    honest_mean = honest_power_mass(n_tests + 1) / honest_power_mass(n_tests);
  } else {
    honest_mean = 0.5 + 0.5 * (1.0 + n_tests) / (2.0 + n_tests);
  }
  return z_s * 0.5 + (1.0 - z_s) * honest_mean;
}

SurvivorPosterior survivor_posterior(double z, int n_tests, Mode mode) {
  SurvivorPosterior p;
  p.surviving_cheater_fraction = surviving_cheater_fraction(z, n_tests, Mode::exact);
  p.n_tests = n_tests;
  p.mode = mode;
  p.expected_accuracy = expected_accuracy(z, n_tests, mode);
  return p;
}

double binomial_upper_tail(int n, int k_min, double p) {
  if (n < 0) throw std::domain_error("binomial_upper_tail: n must be >= 0");
  check_unit(p, "p");
  if (k_min <= 0) return 1.0;
  if (k_min > n) return 0.0;
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;

  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  const double log_fact_n = std::lgamma(n + 1.0);
  double sum = 0.0;
  for (int k = k_min; k <= n; ++k) {
    const double log_coeff = log_fact_n - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
    sum += std::exp(log_coeff + k * log_p + (n - k) * log_q);
  }
  return sum < 1.0 ? sum : 1.0;
}

double false_exclusion_prob(double a_bar, int judgments, int exclusion_threshold, double theta_i) {
  check_accuracy_domain(a_bar);
  check_thresholds(judgments, exclusion_threshold);
  check_unit(theta_i, "theta_i");
  return theta_i * binomial_upper_tail(judgments, exclusion_threshold, 1.0 - a_bar);
}

double false_inclusion_prob(double a_bar, int judgments, int exclusion_threshold, double theta_i,
                            Mode mode) {
  check_accuracy_domain(a_bar);
  check_thresholds(judgments, exclusion_threshold);
  check_unit(theta_i, "theta_i");
  const int k_min = mode == Mode::exact ? judgments - exclusion_threshold + 1
                                        : judgments - exclusion_threshold;
  return (1.0 - theta_i) * binomial_upper_tail(judgments, k_min, 1.0 - a_bar);
}

double expected_loss_per_paper(double p_fe, double p_fi, double cost_ratio) {
  return p_fe * cost_ratio + p_fi;
}

double total_expected_loss(double loss_per_paper, std::int64_t papers_n) {
  return loss_per_paper * static_cast<double>(papers_n);
}

double price_per_paper(double unit_cost, int judgments, int n_tests, int labels_per_worker) {
  if (labels_per_worker < 1) throw std::domain_error("labels_per_worker must be >= 1");
  if (judgments < 1) throw std::domain_error("judgments must be >= 1");
  check_n_tests(n_tests);
  return unit_cost * judgments *
         (static_cast<double>(labels_per_worker + n_tests) / labels_per_worker);
}

double task_budget(double price_pp, std::int64_t papers_n) {
  return price_pp * static_cast<double>(papers_n);
}

}  // namespace crowdscreen

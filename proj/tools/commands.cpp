#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include "crowdscreen/analytic.hpp"
#include "crowdscreen/dataset.hpp"
#include "crowdscreen/model.hpp"
#include "crowdscreen/optimizer.hpp"
#include "crowdscreen/simulator.hpp"

namespace crowdscreen::cli {

namespace {

namespace fs = std::filesystem;

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string num6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct Loaded {
  RunConfig config;
  fs::path out_dir;
};

// Loads the config and applies command-line overrides; throws ConfigError.
Loaded load(const CommonOptions& options, bool allow_mode_both = false) {
  if (options.config_path.empty()) throw ConfigError("--config is required");
  Loaded loaded;
  loaded.config = load_config(options.config_path);
  if (!options.mode.empty() && !(allow_mode_both && options.mode == "both"))
    loaded.config.mode = mode_from_string(options.mode);
  if (options.seed) loaded.config.seed = *options.seed;
  if (!options.budgets.empty()) {
    loaded.config.budgets.clear();
    std::istringstream list(options.budgets);
    std::string part;
    while (std::getline(list, part, ','))
      loaded.config.budgets.push_back(std::stod(part));
  }
  loaded.out_dir = options.out_dir.empty() ? fs::path(".") : fs::path(options.out_dir);
  fs::create_directories(loaded.out_dir);
  return loaded;
}

std::uint64_t require_seed(const RunConfig& config) {
  if (!config.seed)
    throw ConfigError("this command is randomized: set 'seed' in the config or pass --seed");
  return *config.seed;
}

PaperDataset obtain_dataset(const RunConfig& config, std::uint64_t seed) {
  if (!config.dataset.empty()) return load_dataset(config.dataset);
  return synthesize_dataset(config.papers_n, config.in_prop, config.easy_fraction, seed);
}

std::ofstream open_csv(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError(path.string() + ": cannot open for writing");
  return out;
}

struct AnalyzeRow {
  Mode mode;
  double z_s, a_bar, p_fe, p_fi, loss, total_loss, ppp, total_budget;
};

AnalyzeRow analyze_row(const RunConfig& c, Mode mode) {
  AnalyzeRow row;
  row.mode = mode;
  row.z_s = surviving_cheater_fraction(c.z, c.n_t, mode);
  row.a_bar = expected_accuracy(c.z, c.n_t, mode);
  row.p_fe = false_exclusion_prob(row.a_bar, c.judg_n, c.j_t, c.in_prop);
  row.p_fi = false_inclusion_prob(row.a_bar, c.judg_n, c.j_t, c.in_prop, mode);
  const double cost_ratio = c.fn_cost / c.fp_cost;
  row.loss = expected_loss_per_paper(row.p_fe, row.p_fi, cost_ratio);
  row.total_loss = total_expected_loss(row.loss, c.papers_n);
  row.ppp = price_per_paper(c.price_p, c.judg_n, c.n_t, c.n_l);
  row.total_budget = task_budget(row.ppp, c.papers_n);
  return row;
}

void print_optimization(const char* title, const OptimizationResult& res) {
  std::cout << title << ":\n";
  if (!res.feasible) {
    std::cout << "  infeasible: no (n_t, judg_n, j_t) fits the budget\n";
    return;
  }
  std::cout << "  n_t = " << res.best_params.n_tests
            << "  judg_n = " << res.best_params.judgments_per_paper
            << "  j_t = " << res.best_params.exclusion_threshold << '\n';
  std::cout << "  expected loss/paper  = " << num6(res.expected_loss_per_paper) << '\n';
  std::cout << "  expected price/paper = " << num6(res.expected_price_per_paper) << '\n';
  std::cout << "  theta used           = " << num6(res.theta_i) << '\n';
}

void write_optimize_csv(const fs::path& path, const std::string& strategy,
                        std::span<const std::pair<std::string, OptimizationResult>> rows) {
  std::ofstream out = open_csv(path);
  out << "strategy,phase,n_tests,judgments,exclusion_threshold,expected_loss,expected_price,"
         "feasible,theta\n";
  for (const auto& [phase, res] : rows) {
    out << strategy << ',' << phase << ',' << res.best_params.n_tests << ','
        << res.best_params.judgments_per_paper << ',' << res.best_params.exclusion_threshold
        << ',' << num(res.expected_loss_per_paper) << ',' << num(res.expected_price_per_paper)
        << ',' << (res.feasible ? '1' : '0') << ',' << num(res.theta_i) << '\n';
  }
}

void write_theta_trace(const fs::path& path, std::span<const double> trace) {
  std::ofstream out = open_csv(path);
  out << "round,theta\n";
  for (std::size_t i = 0; i < trace.size(); ++i) out << i << ',' << num(trace[i]) << '\n';
}

struct Stats {
  double mean = 0.0;
  double stddev = 0.0;
};

Stats stats_of(const std::vector<double>& xs) {
  Stats s;
  if (xs.empty()) return s;
  for (double x : xs) s.mean += x;
  s.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return s;
}

int catching(const char* command, int (*body)(const CommonOptions&),
             const CommonOptions& options) {
  try {
    return body(options);
  } catch (const ConfigError& e) {
    std::cerr << command << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const DatasetError& e) {
    std::cerr << command << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << command << ": " << e.what() << '\n';
    return kExitUsage;
  }
}

int analyze_body(const CommonOptions& options) {
  const Loaded loaded = load(options, /*allow_mode_both=*/true);
  const RunConfig& c = loaded.config;

  std::vector<AnalyzeRow> rows;
  if (options.mode == "both") {
    rows.push_back(analyze_row(c, Mode::exact));
    rows.push_back(analyze_row(c, Mode::paper));
  } else {
    rows.push_back(analyze_row(c, c.mode));
  }

  for (const AnalyzeRow& row : rows) {
    std::cout << "mode " << to_string(row.mode) << ":\n";
    std::cout << "  z_s (surviving cheater fraction) = " << num6(row.z_s) << '\n';
    std::cout << "  a_bar (expected accuracy)        = " << num6(row.a_bar) << '\n';
    std::cout << "  P(FE)                            = " << num6(row.p_fe) << '\n';
    std::cout << "  P(FI)                            = " << num6(row.p_fi) << '\n';
    std::cout << "  expected loss per paper          = " << num6(row.loss) << '\n';
    std::cout << "  expected total loss              = " << num6(row.total_loss) << '\n';
    std::cout << "  price per paper (PPP)            = " << num6(row.ppp) << '\n';
    std::cout << "  total budget                     = " << num6(row.total_budget) << '\n';
  }

  std::ofstream out = open_csv(loaded.out_dir / "analyze.csv");
  out << "mode,z_s,a_bar,p_fe,p_fi,loss_per_paper,total_loss,price_per_paper,total_budget\n";
  for (const AnalyzeRow& row : rows) {
    out << to_string(row.mode) << ',' << num(row.z_s) << ',' << num(row.a_bar) << ','
        << num(row.p_fe) << ',' << num(row.p_fi) << ',' << num(row.loss) << ','
        << num(row.total_loss) << ',' << num(row.ppp) << ',' << num(row.total_budget) << '\n';
  }
  return kExitOk;
}

int curve_body(const CommonOptions& options) {
  const Loaded loaded = load(options);
  const RunConfig& c = loaded.config;

  std::vector<double> budgets = c.budgets;
  if (budgets.empty()) throw ConfigError("curve needs budgets: config key 'budgets' or --budgets");
  std::sort(budgets.begin(), budgets.end());
  const auto last = std::unique(budgets.begin(), budgets.end());
  if (last != budgets.end()) {
    std::cerr << "curve: dropping " << std::distance(last, budgets.end())
              << " duplicate budget(s)\n";
    budgets.erase(last, budgets.end());
  }

  // The curve is a sweep of single runs, planned without a prior (theta 0.5).
  ScreeningProblem problem = c.problem();
  problem.theta_i = 0.5;
  const std::vector<TradeoffPoint> curve =
      tradeoff_curve(c.population(), problem, c.search_space(), budgets, c.task_parameters());

  write_curve(curve, loaded.out_dir / "curve.csv");

  bool any_infeasible = false;
  for (const TradeoffPoint& p : curve) {
    std::cout << "budget " << num6(p.budget) << ": ";
    if (p.feasible) {
      std::cout << "n_t=" << p.params.n_tests << " judg_n=" << p.params.judgments_per_paper
                << " j_t=" << p.params.exclusion_threshold << " loss=" << num6(p.loss)
                << " price=" << num6(p.price) << '\n';
    } else {
      std::cout << "infeasible\n";
      any_infeasible = true;
    }
  }
  return any_infeasible ? kExitInfeasible : kExitOk;
}

int simulate_body(const CommonOptions& options) {
  const Loaded loaded = load(options);
  const RunConfig& c = loaded.config;
  const std::uint64_t seed = require_seed(c);

  const PaperDataset dataset = obtain_dataset(c, seed);
  const SimulationConfig sim = c.simulation_config(dataset.items);
  const std::vector<RunOutcome> runs = simulate_replications(sim);

  write_outcome(runs.front(), dataset.gold_map(), loaded.out_dir / "outcome.csv");

  std::ofstream reps = open_csv(loaded.out_dir / "replications.csv");
  reps << "replication,accuracy,false_exclusion_rate,false_inclusion_rate,loss_per_paper,"
          "cost_per_classified_paper,realized_cost,decided,complete\n";
  std::vector<double> acc, fe, fi, loss, ccp, cost;
  bool starved = false;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const RunOutcome& run = runs[r];
    const EvaluationMetrics& m = run.metrics;
    reps << r << ',' << num(m.accuracy) << ',' << num(m.false_exclusion_rate) << ','
         << num(m.false_inclusion_rate) << ',' << num(m.loss_per_paper) << ','
         << num(m.cost_per_classified_paper) << ',' << num(run.realized_cost) << ','
         << m.decided_n << ',' << (run.complete ? '1' : '0') << '\n';
    acc.push_back(m.accuracy);
    fe.push_back(m.false_exclusion_rate);
    fi.push_back(m.false_inclusion_rate);
    loss.push_back(m.loss_per_paper);
    ccp.push_back(m.cost_per_classified_paper);
    cost.push_back(run.realized_cost);
    starved = starved || !run.complete;
  }

  const double cost_ratio = c.fn_cost / c.fp_cost;
  const auto line = [](const char* name, const Stats& s) {
    std::cout << "  " << name << " = " << num6(s.mean) << " (stddev " << num6(s.stddev) << ")\n";
  };
  std::cout << "simulate: " << runs.size() << " replication(s), " << dataset.items.size()
            << " papers, seed " << seed << '\n';
  line("acc_res", stats_of(acc));
  line("fp     ", stats_of(fi));
  line("fn     ", stats_of(fe));
  {
    std::vector<double> fp_ls = fi, fn_ls = fe;
    for (double& x : fn_ls) x *= cost_ratio;
    line("fp_ls  ", stats_of(fp_ls));
    line("fn_ls  ", stats_of(fn_ls));
  }
  line("loss   ", stats_of(loss));
  line("ccp    ", stats_of(ccp));
  line("budget ", stats_of(cost));
  if (starved) {
    std::cout << "warning: worker supply exhausted before completion in some replication(s)\n";
    return kExitStarved;
  }
  return kExitOk;
}

int optimize_body(const CommonOptions& options) {
  const Loaded loaded = load(options);
  const RunConfig& c = loaded.config;
  if (!c.budget) throw ConfigError("optimize needs a budget: config key 'budget'");
  const double budget = *c.budget;

  const WorkerPopulation population = c.population();
  const ScreeningProblem problem = c.problem();
  const SearchSpace space = c.search_space();
  const TaskParameters base = c.task_parameters();

  if (options.strategy == "single") {
    // "without theta estimation": plan at the uninformative prior.
    const OptimizationResult res =
        optimize_single_run(population, problem, space, budget, 0.5, base);
    print_optimization("single-run optimization", res);
    const std::pair<std::string, OptimizationResult> rows[] = {{"1", res}};
    write_optimize_csv(loaded.out_dir / "optimize.csv", "single", rows);
    return res.feasible ? kExitOk : kExitInfeasible;
  }

  const std::uint64_t seed = require_seed(c);
  const PaperDataset dataset = obtain_dataset(c, seed);
  SimulatorVoteSource source(population, problem, c.quiz_regime, seed, c.max_workers);

  if (options.strategy == "iterative") {
    const IterativeResult it = optimize_iterative(population, problem, space, budget, c.rounds,
                                                  dataset.items, source, base);
    print_optimization("iterative optimization (final round)", it.result);
    std::cout << "  theta trace:";
    for (double t : it.theta_trace) std::cout << ' ' << num6(t);
    std::cout << '\n';
    for (const std::string& w : it.warnings) std::cerr << "warning: " << w << '\n';
    const std::pair<std::string, OptimizationResult> rows[] = {{"final", it.result}};
    write_optimize_csv(loaded.out_dir / "optimize.csv", "iterative", rows);
    write_theta_trace(loaded.out_dir / "theta_trace.csv", it.theta_trace);
    if (!it.result.feasible) return kExitInfeasible;
    if (!it.last_outcome.decisions.empty())
      write_outcome(it.last_outcome, dataset.gold_map(), loaded.out_dir / "outcome.csv");
    return it.last_outcome.complete ? kExitOk : kExitStarved;
  }

  if (options.strategy == "horizontal") {
    const HorizontalResult h =
        run_horizontal(population, problem, space, budget, c.baseline_fraction, dataset.items,
                       source, base);
    print_optimization("horizontal phase 1 (theta = 0.5)", h.phase1);
    print_optimization("horizontal phase 2 (theta re-estimated)", h.phase2);
    std::cout << "  theta estimate = " << num6(h.theta_estimate) << '\n';
    std::cout << "  papers: phase 1 = " << h.phase1_papers << ", phase 2 = " << h.phase2_papers
              << '\n';
    if (!h.combined.decisions.empty())
      std::cout << "  combined realized cost = " << num6(h.combined.realized_cost) << '\n';
    for (const std::string& w : h.warnings) std::cerr << "warning: " << w << '\n';
    const std::pair<std::string, OptimizationResult> rows[] = {{"1", h.phase1}, {"2", h.phase2}};
    write_optimize_csv(loaded.out_dir / "optimize.csv", "horizontal", rows);
    const double trace[] = {0.5, h.theta_estimate};
    write_theta_trace(loaded.out_dir / "theta_trace.csv", trace);
    if (!h.feasible) {
      std::cerr << "horizontal strategy infeasible under the given budget\n";
      return kExitInfeasible;
    }
    write_outcome(h.combined, dataset.gold_map(), loaded.out_dir / "outcome.csv");
    return h.combined.complete ? kExitOk : kExitStarved;
  }

  throw ConfigError("unknown strategy '" + options.strategy +
                    "' (expected single|iterative|horizontal)");
}

struct ValidationCheck {
  std::string name;
  double analytic = 0.0;
  double empirical = 0.0;
  double tolerance = 0.0;  // absolute unless relative is set
  bool relative = false;
  bool pass = false;
};

int validate_body(const CommonOptions& options) {
  const Loaded loaded = load(options);
  RunConfig c = loaded.config;
  const std::uint64_t seed = require_seed(c);

  // Force the analytic-matching population so the closed forms apply.
  c.smart_share = 0.0;
  c.acc_low = 0.5;
  c.acc_high = 1.0;
  c.easy_delta = 0.0;
  c.tests_p = 0;
  c.quiz_regime = QuizRegime::all_correct;
  std::cout << "validate: analytic-matching overrides in effect "
               "(smart_share=0, acc_low=0.5, acc_high=1, easy_delta=0, tests_p=0, "
               "quiz_regime=all_correct)\n";

  std::vector<ValidationCheck> checks;

  // Quiz posterior agreement at the configured (z, n_t).
  constexpr std::int64_t kQuizSamples = 100'000;
  SimulationConfig quiz_sim = c.simulation_config(
      synthesize_dataset(std::max<std::int64_t>(c.papers_n, 1), c.in_prop, c.easy_fraction, seed)
          .items);
  const QuizReport report = simulate_quiz_population(quiz_sim, kQuizSamples);
  checks.push_back({"quiz_pass_rate", pass_probability(c.z, c.n_t, Mode::exact),
                    report.pass_rate_overall, 0.01, false, false});
  checks.push_back({"quiz_surviving_cheater_fraction",
                    surviving_cheater_fraction(c.z, c.n_t, Mode::exact),
                    report.surviving_cheater_fraction, 0.01, false, false});
  checks.push_back({"quiz_surviving_accuracy_mean", expected_accuracy(c.z, c.n_t, Mode::exact),
                    report.surviving_accuracy_mean, 0.01, false, false});

  // End-to-end loss agreement: simulated mean loss vs the closed form at the
  // dataset's true include rate.
  const std::vector<RunOutcome> runs = simulate_replications(quiz_sim);
  std::vector<double> losses;
  bool starved = false;
  for (const RunOutcome& run : runs) {
    losses.push_back(run.metrics.loss_per_paper);
    starved = starved || !run.complete;
  }
  const double a_bar = expected_accuracy(c.z, c.n_t, Mode::exact);
  const double theta_true = c.in_prop;
  const double cost_ratio = c.fn_cost / c.fp_cost;
  const double analytic_loss =
      expected_loss_per_paper(false_exclusion_prob(a_bar, c.judg_n, c.j_t, theta_true),
                              false_inclusion_prob(a_bar, c.judg_n, c.j_t, theta_true),
                              cost_ratio);
  checks.push_back({"task_mean_loss", analytic_loss, stats_of(losses).mean, 0.20, true, false});

  bool all_pass = true;
  std::ofstream out = open_csv(loaded.out_dir / "validate.csv");
  out << "check,analytic,empirical,error,tolerance,relative,pass\n";
  for (ValidationCheck& check : checks) {
    const double err = check.relative
                           ? std::fabs(check.empirical - check.analytic) /
                                 std::max(std::fabs(check.analytic), 1e-300)
                           : std::fabs(check.empirical - check.analytic);
    check.pass = err <= check.tolerance;
    all_pass = all_pass && check.pass;
    std::cout << (check.pass ? "PASS " : "FAIL ") << check.name
              << ": analytic=" << num6(check.analytic) << " empirical=" << num6(check.empirical)
              << " error=" << num6(err) << (check.relative ? " (relative)" : "")
              << " tolerance=" << num6(check.tolerance) << '\n';
    out << check.name << ',' << num(check.analytic) << ',' << num(check.empirical) << ','
        << num(err) << ',' << num(check.tolerance) << ',' << (check.relative ? '1' : '0') << ','
        << (check.pass ? '1' : '0') << '\n';
  }
  if (starved) {
    std::cout << "warning: simulation starved; results are partial\n";
    return kExitStarved;
  }
  return all_pass ? kExitOk : kExitUsage;
}

}  // namespace

int run_analyze(const CommonOptions& options) { return catching("analyze", analyze_body, options); }
int run_curve(const CommonOptions& options) { return catching("curve", curve_body, options); }
int run_simulate(const CommonOptions& options) {
  return catching("simulate", simulate_body, options);
}
int run_optimize(const CommonOptions& options) {
  return catching("optimize", optimize_body, options);
}
int run_validate(const CommonOptions& options) {
  return catching("validate", validate_body, options);
}

}  // namespace crowdscreen::cli

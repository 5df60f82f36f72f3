#include "crowdscreen/run_config.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace crowdscreen {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

[[noreturn]] void bad_key(const std::string& key, const std::string& why) {
  throw ConfigError("config key '" + key + "': " + why);
}

double to_double(const std::string& key, const std::string& value) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0' || errno == ERANGE)
    bad_key(key, "not a number: '" + value + "'");
  return v;
}

std::int64_t to_int(const std::string& key, const std::string& value) {
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0' || errno == ERANGE)
    bad_key(key, "not an integer: '" + value + "'");
  return v;
}

std::string format_full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void check_range(const std::string& key, double v, double lo, double hi) {
  if (!(v >= lo && v <= hi))
    bad_key(key, "must be in [" + format_full(lo) + "," + format_full(hi) + "], got " +
                     format_full(v));
}

void check_min(const std::string& key, double v, double lo, bool strict) {
  if (strict ? !(v > lo) : !(v >= lo))
    bad_key(key, std::string("must be ") + (strict ? "> " : ">= ") + format_full(lo) + ", got " +
                     format_full(v));
}

}  // namespace

std::string_view to_string(Mode mode) { return mode == Mode::exact ? "exact" : "paper"; }

Mode mode_from_string(std::string_view s) {
  if (s == "exact") return Mode::exact;
  if (s == "paper") return Mode::paper;
  throw ConfigError("unknown mode '" + std::string(s) + "' (expected exact|paper)");
}

std::string_view to_string(QuizRegime regime) {
  return regime == QuizRegime::all_correct ? "all_correct" : "threshold";
}

QuizRegime quiz_regime_from_string(std::string_view s) {
  if (s == "all_correct") return QuizRegime::all_correct;
  if (s == "threshold") return QuizRegime::threshold;
  throw ConfigError("unknown quiz_regime '" + std::string(s) +
                    "' (expected all_correct|threshold)");
}

WorkerPopulation RunConfig::population() const {
  WorkerPopulation pop;
  pop.cheater_fraction = z;
  pop.smart_cheater_share = smart_share;
  pop.smart_cheater_accuracy = smart_acc;
  pop.honest_accuracy_low = acc_low;
  pop.honest_accuracy_high = acc_high;
  pop.easy_delta = easy_delta;
  return pop;
}

ScreeningProblem RunConfig::problem() const {
  ScreeningProblem p;
  p.papers_n = papers_n;
  p.theta_i = in_prop;
  p.cost_ratio = fn_cost / fp_cost;
  p.unit_cost = price_p;
  return p;
}

TaskParameters RunConfig::task_parameters() const {
  TaskParameters t;
  t.n_tests = n_t;
  t.judgments_per_paper = judg_n;
  t.exclusion_threshold = j_t;
  t.labels_per_worker = n_l;
  t.papers_per_page = p_page;
  t.tests_per_page = tests_p;
  t.trust_threshold = trsh;
  return t;
}

SearchSpace RunConfig::search_space() const {
  SearchSpace s;
  s.n_tests_min = n_t_min;
  s.n_tests_max = n_t_max;
  s.judgments_min = j_min;
  s.judgments_max = j_max;
  s.mode = mode;
  return s;
}

SimulationConfig RunConfig::simulation_config(std::vector<PaperItem> papers) const {
  SimulationConfig c;
  c.population = population();
  c.problem = problem();
  c.problem.papers_n = static_cast<std::int64_t>(papers.size());
  c.params = task_parameters();
  c.papers = std::move(papers);
  c.quiz_regime = quiz_regime;
  c.replications = replications;
  c.seed = seed.value_or(0);
  c.max_workers = max_workers;
  return c;
}

RunConfig parse_config_text(std::string_view text) {
  std::map<std::string, std::string> pairs;
  std::istringstream stream{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string entry = trim(line);
    if (entry.empty()) continue;
    const auto eq = entry.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value', got '" +
                        entry + "'");
    const std::string key = trim(entry.substr(0, eq));
    const std::string value = trim(entry.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    if (value.empty()) bad_key(key, "empty value (line " + std::to_string(line_no) + ")");
    if (!pairs.emplace(key, value).second)
      bad_key(key, "duplicated (line " + std::to_string(line_no) + ")");
  }

  static const std::set<std::string> known = {
      "z",          "smart_share", "smart_acc",  "acc_low",   "acc_high",
      "easy_delta", "papers_n",    "in_prop",    "price_p",   "fp_cost",
      "fn_cost",    "n_t",         "judg_n",     "j_t",       "n_l",
      "p_page",     "tests_p",     "trsh",       "mode",      "quiz_regime",
      "seed",       "replications", "max_workers", "budget",  "budgets",
      "baseline_fraction", "rounds", "easy_fraction", "dataset",
      "n_t_min",    "n_t_max",     "j_min",      "j_max"};
  for (const auto& [key, value] : pairs) {
    if (known.count(key) == 0) throw ConfigError("unknown config key '" + key + "'");
  }

  static const std::vector<std::string> required = {"z",       "n_t",     "judg_n",
                                                    "j_t",     "papers_n", "in_prop",
                                                    "price_p", "fp_cost", "fn_cost"};
  std::string missing;
  for (const std::string& key : required) {
    if (pairs.count(key) == 0) missing += missing.empty() ? key : ", " + key;
  }
  if (!missing.empty()) throw ConfigError("missing required config key(s): " + missing);

  RunConfig c;
  const auto get = [&](const char* key) -> const std::string* {
    const auto it = pairs.find(key);
    return it == pairs.end() ? nullptr : &it->second;
  };
  const auto dbl = [&](const char* key, double& out) {
    if (const auto* v = get(key)) out = to_double(key, *v);
  };
  const auto intval = [&](const char* key, auto& out) {
    if (const auto* v = get(key)) out = static_cast<std::decay_t<decltype(out)>>(to_int(key, *v));
  };

  dbl("z", c.z);
  dbl("smart_share", c.smart_share);
  dbl("smart_acc", c.smart_acc);
  dbl("acc_low", c.acc_low);
  dbl("acc_high", c.acc_high);
  dbl("easy_delta", c.easy_delta);
  intval("papers_n", c.papers_n);
  dbl("in_prop", c.in_prop);
  dbl("price_p", c.price_p);
  dbl("fp_cost", c.fp_cost);
  dbl("fn_cost", c.fn_cost);
  intval("n_t", c.n_t);
  intval("judg_n", c.judg_n);
  intval("j_t", c.j_t);
  intval("n_l", c.n_l);
  intval("p_page", c.p_page);
  intval("tests_p", c.tests_p);
  dbl("trsh", c.trsh);
  if (const auto* v = get("mode")) c.mode = mode_from_string(*v);
  if (const auto* v = get("quiz_regime")) c.quiz_regime = quiz_regime_from_string(*v);
  if (const auto* v = get("seed")) c.seed = static_cast<std::uint64_t>(to_int("seed", *v));
  intval("replications", c.replications);
  intval("max_workers", c.max_workers);
  if (const auto* v = get("budget")) c.budget = to_double("budget", *v);
  if (const auto* v = get("budgets")) {
    std::istringstream list(*v);
    std::string part;
    while (std::getline(list, part, ',')) c.budgets.push_back(to_double("budgets", trim(part)));
    if (c.budgets.empty()) bad_key("budgets", "empty list");
  }
  dbl("baseline_fraction", c.baseline_fraction);
  intval("rounds", c.rounds);
  dbl("easy_fraction", c.easy_fraction);
  if (const auto* v = get("dataset")) c.dataset = *v;
  intval("n_t_min", c.n_t_min);
  intval("n_t_max", c.n_t_max);
  intval("j_min", c.j_min);
  intval("j_max", c.j_max);

  // Range validation with config-key names in the diagnostics.
  check_range("z", c.z, 0.0, 1.0);
  check_range("smart_share", c.smart_share, 0.0, 1.0);
  check_range("smart_acc", c.smart_acc, 0.5, 1.0);
  check_range("acc_low", c.acc_low, 0.5, 1.0);
  check_range("acc_high", c.acc_high, 0.5, 1.0);
  if (!(c.acc_low <= c.acc_high)) bad_key("acc_low", "must be <= acc_high");
  check_range("easy_delta", c.easy_delta, 0.0, 0.5);
  check_min("papers_n", static_cast<double>(c.papers_n), 1.0, false);
  check_range("in_prop", c.in_prop, 0.0, 1.0);
  check_min("price_p", c.price_p, 0.0, true);
  check_min("fp_cost", c.fp_cost, 0.0, true);
  check_min("fn_cost", c.fn_cost, 0.0, true);
  check_min("n_t", c.n_t, 0.0, false);
  check_min("judg_n", c.judg_n, 1.0, false);
  if (c.j_t < 1 || c.j_t > c.judg_n) bad_key("j_t", "must be in [1, judg_n]");
  check_min("n_l", c.n_l, 1.0, false);
  check_min("p_page", c.p_page, 1.0, false);
  check_min("tests_p", c.tests_p, 0.0, false);
  check_range("trsh", c.trsh, 0.5, 1.0);
  check_min("replications", static_cast<double>(c.replications), 1.0, false);
  check_min("max_workers", static_cast<double>(c.max_workers), 1.0, false);
  if (c.budget && !(*c.budget > 0.0)) bad_key("budget", "must be > 0");
  for (double b : c.budgets) {
    if (!(b > 0.0)) bad_key("budgets", "entries must be > 0");
  }
  if (!(c.baseline_fraction > 0.0 && c.baseline_fraction < 1.0))
    bad_key("baseline_fraction", "must be in (0,1)");
  check_min("rounds", c.rounds, 1.0, false);
  check_range("easy_fraction", c.easy_fraction, 0.0, 1.0);
  if (c.n_t_min < 0 || c.n_t_min > c.n_t_max) bad_key("n_t_min", "range [n_t_min, n_t_max] empty");
  if (c.j_min < 1 || c.j_min > c.j_max) bad_key("j_min", "range [j_min, j_max] empty");
  if (c.j_max > 25) bad_key("j_max", "must be <= 25");

  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open for reading");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str());
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream out;
  out << "# population\n";
  out << "z = " << format_full(c.z) << '\n';
  out << "smart_share = " << format_full(c.smart_share) << '\n';
  out << "smart_acc = " << format_full(c.smart_acc) << '\n';
  out << "acc_low = " << format_full(c.acc_low) << '\n';
  out << "acc_high = " << format_full(c.acc_high) << '\n';
  out << "easy_delta = " << format_full(c.easy_delta) << '\n';
  out << "# review problem\n";
  out << "papers_n = " << c.papers_n << '\n';
  out << "in_prop = " << format_full(c.in_prop) << '\n';
  out << "price_p = " << format_full(c.price_p) << '\n';
  out << "fp_cost = " << format_full(c.fp_cost) << '\n';
  out << "fn_cost = " << format_full(c.fn_cost) << '\n';
  out << "# task\n";
  out << "n_t = " << c.n_t << '\n';
  out << "judg_n = " << c.judg_n << '\n';
  out << "j_t = " << c.j_t << '\n';
  out << "n_l = " << c.n_l << '\n';
  out << "p_page = " << c.p_page << '\n';
  out << "tests_p = " << c.tests_p << '\n';
  out << "trsh = " << format_full(c.trsh) << '\n';
  out << "# execution\n";
  out << "mode = " << to_string(c.mode) << '\n';
  out << "quiz_regime = " << to_string(c.quiz_regime) << '\n';
  if (c.seed) out << "seed = " << *c.seed << '\n';
  out << "replications = " << c.replications << '\n';
  out << "max_workers = " << c.max_workers << '\n';
  if (c.budget) out << "budget = " << format_full(*c.budget) << '\n';
  if (!c.budgets.empty()) {
    out << "budgets = ";
    for (std::size_t i = 0; i < c.budgets.size(); ++i)
      out << (i ? "," : "") << format_full(c.budgets[i]);
    out << '\n';
  }
  out << "baseline_fraction = " << format_full(c.baseline_fraction) << '\n';
  out << "rounds = " << c.rounds << '\n';
  out << "easy_fraction = " << format_full(c.easy_fraction) << '\n';
  if (!c.dataset.empty()) out << "dataset = " << c.dataset << '\n';
  out << "# search space\n";
  out << "n_t_min = " << c.n_t_min << '\n';
  out << "n_t_max = " << c.n_t_max << '\n';
  out << "j_min = " << c.j_min << '\n';
  out << "j_max = " << c.j_max << '\n';
  return out.str();
}

}  // namespace crowdscreen

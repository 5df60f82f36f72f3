#include "crowdscreen/dataset.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "crowdscreen/rng.hpp"
#include "csv.hpp"

namespace crowdscreen {

namespace {

constexpr std::uint64_t kLaneDataset = 4;
constexpr std::size_t kMaxReportedErrors = 20;

[[noreturn]] void raise(const std::filesystem::path& path, const std::vector<std::string>& errors) {
  std::ostringstream msg;
  msg << path.string() << ": " << errors.size() << " problem(s)";
  const std::size_t shown = std::min(errors.size(), kMaxReportedErrors);
  for (std::size_t i = 0; i < shown; ++i) msg << "\n  " << errors[i];
  if (shown < errors.size()) msg << "\n  ... " << (errors.size() - shown) << " more";
  throw DatasetError(msg.str());
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DatasetError(path.string() + ": cannot open for reading");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  // ignore a trailing blank line
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DatasetError(path.string() + ": cannot open for writing");
  return out;
}

double parse_double(const std::string& field, const char* what, std::size_t line_no,
                    std::vector<std::string>& errors) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (end == field.c_str() || *end != '\0' || errno == ERANGE) {
    errors.push_back("line " + std::to_string(line_no) + ": bad " + what + " '" + field + "'");
    return 0.0;
  }
  return v;
}

}  // namespace

double PaperDataset::theta_empirical() const {
  if (items.empty()) return 0.0;
  std::int64_t includes = 0;
  for (const PaperItem& item : items) {
    if (item.gold_label == Label::include) ++includes;
  }
  return static_cast<double>(includes) / static_cast<double>(items.size());
}

std::map<std::string, Label> PaperDataset::gold_map() const {
  std::map<std::string, Label> gold;
  for (const PaperItem& item : items) gold[item.id] = item.gold_label;
  return gold;
}

PaperDataset load_dataset(const std::filesystem::path& path) {
  const std::vector<std::string> lines = read_lines(path);
  if (lines.empty()) throw DatasetError(path.string() + ": empty file, header required");

  const std::vector<std::string> header = csv::split_line(lines[0]);
  const bool with_text = header.size() == 5;
  if (!(header.size() == 3 || with_text) || header[0] != "id" || header[1] != "gold_label" ||
      header[2] != "difficulty" || (with_text && (header[3] != "title" || header[4] != "abstract")))
    throw DatasetError(path.string() +
                       ": bad header, expected id,gold_label,difficulty[,title,abstract]");

  PaperDataset dataset;
  dataset.source = path.string();
  std::vector<std::string> errors;
  std::map<std::string, std::size_t> first_line_of;  // id -> line number

  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const std::vector<std::string> fields = csv::split_line(lines[i]);
    if (fields.size() != header.size()) {
      errors.push_back("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " fields, got " +
                       std::to_string(fields.size()));
      continue;
    }
    PaperItem item;
    item.id = fields[0];
    if (item.id.empty()) {
      errors.push_back("line " + std::to_string(line_no) + ": empty id");
      continue;
    }
    const auto [it, inserted] = first_line_of.emplace(item.id, line_no);
    if (!inserted) {
      errors.push_back("line " + std::to_string(line_no) + ": duplicate id '" + item.id +
                       "' (first seen on line " + std::to_string(it->second) + ")");
      continue;
    }
    bool row_ok = true;
    try {
      item.gold_label = label_from_string(fields[1]);
    } catch (const std::invalid_argument& e) {
      errors.push_back("line " + std::to_string(line_no) + ": " + e.what());
      row_ok = false;
    }
    try {
      item.difficulty = difficulty_from_string(fields[2]);
    } catch (const std::invalid_argument& e) {
      errors.push_back("line " + std::to_string(line_no) + ": " + e.what());
      row_ok = false;
    }
    if (row_ok) dataset.items.push_back(std::move(item));
  }

  if (!errors.empty()) raise(path, errors);
  if (dataset.items.empty()) throw DatasetError(path.string() + ": no data rows");
  return dataset;
}

PaperDataset synthesize_dataset(std::int64_t papers_n, double in_prop, double easy_fraction,
                                std::uint64_t seed) {
  if (papers_n < 1) throw std::invalid_argument("papers_n must be >= 1");
  if (in_prop < 0.0 || in_prop > 1.0) throw std::invalid_argument("in_prop must be in [0,1]");
  if (easy_fraction < 0.0 || easy_fraction > 1.0)
    throw std::invalid_argument("easy_fraction must be in [0,1]");

  Pcg32 rng = substream(seed, kLaneDataset);
  PaperDataset dataset;
  dataset.source = "synthetic(n=" + std::to_string(papers_n) + ",seed=" + std::to_string(seed) + ")";
  dataset.items.reserve(static_cast<std::size_t>(papers_n));
  for (std::int64_t i = 0; i < papers_n; ++i) {
    PaperItem item;
    item.id = "p" + std::to_string(i + 1);
    item.gold_label = rng.bernoulli(in_prop) ? Label::include : Label::exclude;
    item.difficulty = rng.bernoulli(easy_fraction) ? Difficulty::easy : Difficulty::average;
    dataset.items.push_back(std::move(item));
  }
  return dataset;
}

void write_dataset(const PaperDataset& dataset, const std::filesystem::path& path) {
  std::ofstream out = open_for_write(path);
  out << "id,gold_label,difficulty,title,abstract\n";
  for (const PaperItem& item : dataset.items) {
    out << csv::escape(item.id) << ',' << to_string(item.gold_label) << ','
        << to_string(item.difficulty) << ",,\n";
  }
  if (!out.good()) throw DatasetError(path.string() + ": write failed");
}

void write_outcome(const RunOutcome& outcome, const std::map<std::string, Label>& gold,
                   const std::filesystem::path& path) {
  std::ofstream out = open_for_write(path);
  out << "paper_id,decision,gold_label,correct\n";
  for (const auto& [paper_id, decision] : outcome.decisions) {
    const auto it = gold.find(paper_id);
    if (it == gold.end())
      throw DatasetError(path.string() + ": no gold label for decided paper '" + paper_id + "'");
    out << csv::escape(paper_id) << ',' << to_string(decision) << ',' << to_string(it->second)
        << ',' << (decision == it->second ? '1' : '0') << '\n';
  }
  if (!out.good()) throw DatasetError(path.string() + ": write failed");
}

void write_curve(std::span<const TradeoffPoint> curve, const std::filesystem::path& path) {
  std::ofstream out = open_for_write(path);
  out << "budget,n_tests,judgments,exclusion_threshold,expected_loss,expected_price,feasible\n";
  for (const TradeoffPoint& p : curve) {
    out << csv::format_double(p.budget) << ',' << p.params.n_tests << ','
        << p.params.judgments_per_paper << ',' << p.params.exclusion_threshold << ','
        << csv::format_double(p.loss) << ',' << csv::format_double(p.price) << ','
        << (p.feasible ? '1' : '0') << '\n';
  }
  if (!out.good()) throw DatasetError(path.string() + ": write failed");
}

std::vector<TradeoffPoint> load_curve(const std::filesystem::path& path) {
  const std::vector<std::string> lines = read_lines(path);
  if (lines.empty()) throw DatasetError(path.string() + ": empty file, header required");
  if (lines[0] != "budget,n_tests,judgments,exclusion_threshold,expected_loss,expected_price,feasible")
    throw DatasetError(path.string() + ": bad curve header");

  std::vector<TradeoffPoint> curve;
  std::vector<std::string> errors;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const std::vector<std::string> fields = csv::split_line(lines[i]);
    if (fields.size() != 7) {
      errors.push_back("line " + std::to_string(line_no) + ": expected 7 fields, got " +
                       std::to_string(fields.size()));
      continue;
    }
    TradeoffPoint p;
    p.budget = parse_double(fields[0], "budget", line_no, errors);
    p.params.n_tests = static_cast<int>(parse_double(fields[1], "n_tests", line_no, errors));
    p.params.judgments_per_paper =
        static_cast<int>(parse_double(fields[2], "judgments", line_no, errors));
    p.params.exclusion_threshold =
        static_cast<int>(parse_double(fields[3], "exclusion_threshold", line_no, errors));
    p.loss = parse_double(fields[4], "expected_loss", line_no, errors);
    p.price = parse_double(fields[5], "expected_price", line_no, errors);
    p.feasible = fields[6] == "1";
    curve.push_back(p);
  }
  if (!errors.empty()) raise(path, errors);
  return curve;
}

}  // namespace crowdscreen

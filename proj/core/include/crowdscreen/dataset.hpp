#pragma once

// Candidate-paper datasets and CSV persistence of run outcomes and tradeoff
// curves.
//
// Dataset CSV:  id,gold_label,difficulty,title,abstract   (title/abstract
//               optional; carried opaquely, the model never reads them)
// Outcome CSV:  paper_id,decision,gold_label,correct
// Curve CSV:    budget,n_tests,judgments,exclusion_threshold,expected_loss,
//               expected_price,feasible

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "crowdscreen/model.hpp"
#include "crowdscreen/optimizer.hpp"

namespace crowdscreen {

// Structured parse/validation failure; the message lists every offending row
// with its line number.
class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PaperDataset {
  std::vector<PaperItem> items;
  std::string source;  // provenance: file path or a synthetic(...) tag

  double theta_empirical() const;  // include fraction of the gold labels
  std::map<std::string, Label> gold_map() const;
};

// Parses and validates a dataset CSV. Duplicate ids, unknown enum values and
// an empty file all raise DatasetError naming the offending lines.
PaperDataset load_dataset(const std::filesystem::path& path);

// Deterministic synthetic dataset: gold labels Bernoulli(in_prop), easy
// difficulty Bernoulli(easy_fraction).
PaperDataset synthesize_dataset(std::int64_t papers_n, double in_prop, double easy_fraction,
                                std::uint64_t seed);

void write_dataset(const PaperDataset& dataset, const std::filesystem::path& path);

void write_outcome(const RunOutcome& outcome, const std::map<std::string, Label>& gold,
                   const std::filesystem::path& path);

void write_curve(std::span<const TradeoffPoint> curve, const std::filesystem::path& path);
std::vector<TradeoffPoint> load_curve(const std::filesystem::path& path);

}  // namespace crowdscreen

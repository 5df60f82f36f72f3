#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>

#include "crowdscreen/dataset.hpp"

using namespace crowdscreen;
namespace fs = std::filesystem;

namespace {

fs::path scratch_file(const std::string& name, const std::string& contents) {
  const fs::path dir = fs::path("dataset_scratch");
  fs::create_directories(dir);
  const fs::path path = dir / name;
  std::ofstream out(path);
  out << contents;
  return path;
}

}  // namespace

TEST_CASE("load_dataset parses a valid file") {
  const fs::path path = scratch_file("valid.csv",
                                     "id,gold_label,difficulty\n"
                                     "p1,include,easy\n"
                                     "p2,exclude,average\n"
                                     "p3,exclude,easy\n");
  const PaperDataset d = load_dataset(path);
  CHECK(d.items.size() == 3);
  CHECK(d.items[0].id == "p1");
  CHECK(d.items[0].gold_label == Label::include);
  CHECK(d.items[2].difficulty == Difficulty::easy);
  CHECK(d.theta_empirical() == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("load_dataset handles quoted titles with commas") {
  const fs::path path = scratch_file("titled.csv",
                                     "id,gold_label,difficulty,title,abstract\n"
                                     "p1,include,easy,\"screening, at scale\",\"a \"\"quote\"\"\"\n"
                                     "p2,exclude,average,,\n");
  const PaperDataset d = load_dataset(path);
  CHECK(d.items.size() == 2);
  CHECK(d.theta_empirical() == doctest::Approx(0.5));
}

TEST_CASE("load_dataset reports duplicate ids with both line numbers") {
  const fs::path path = scratch_file("dup.csv",
                                     "id,gold_label,difficulty\n"
                                     "p1,include,easy\n"
                                     "p2,exclude,average\n"
                                     "p1,exclude,easy\n");
  try {
    load_dataset(path);
    FAIL("expected DatasetError");
  } catch (const DatasetError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("p1") != std::string::npos);
    CHECK(msg.find("line 4") != std::string::npos);
    CHECK(msg.find("line 2") != std::string::npos);
  }
}

TEST_CASE("load_dataset rejects bad labels with line numbers") {
  const fs::path path = scratch_file("badlabel.csv",
                                     "id,gold_label,difficulty\n"
                                     "p1,maybe,easy\n"
                                     "p2,exclude,hard\n");
  try {
    load_dataset(path);
    FAIL("expected DatasetError");
  } catch (const DatasetError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("line 2") != std::string::npos);
    CHECK(msg.find("maybe") != std::string::npos);
    CHECK(msg.find("line 3") != std::string::npos);
    CHECK(msg.find("hard") != std::string::npos);
  }
}

TEST_CASE("load_dataset rejects empty and headerless files") {
  CHECK_THROWS_AS(load_dataset(scratch_file("empty.csv", "")), DatasetError);
  CHECK_THROWS_AS(load_dataset(scratch_file("badheader.csv", "a,b,c\n1,2,3\n")), DatasetError);
  CHECK_THROWS_AS(load_dataset(fs::path("dataset_scratch") / "no_such_file.csv", ), DatasetError);
}

TEST_CASE("synthesize_dataset hits the configured include rate") {
  const PaperDataset d = synthesize_dataset(100'000, 0.3, 0.5, 777);
  CHECK(std::fabs(d.theta_empirical() - 0.3) < 0.005);
  std::int64_t easy = 0;
  for (const PaperItem& item : d.items) easy += item.difficulty == Difficulty::easy ? 1 : 0;
  CHECK(std::fabs(static_cast<double>(easy) / 100'000.0 - 0.5) < 0.005);
}

TEST_CASE("synthesize_dataset boundary and determinism") {
  const PaperDataset all_in = synthesize_dataset(50, 1.0, 0.5, 1);
  CHECK(all_in.theta_empirical() == 1.0);

  const PaperDataset a = synthesize_dataset(500, 0.4, 0.3, 99);
  const PaperDataset b = synthesize_dataset(500, 0.4, 0.3, 99);
  REQUIRE(a.items.size() == b.items.size());
  for (std::size_t i = 0; i < a.items.size(); ++i) {
    CHECK(a.items[i].id == b.items[i].id);
    CHECK(a.items[i].gold_label == b.items[i].gold_label);
    CHECK(a.items[i].difficulty == b.items[i].difficulty);
  }
}

TEST_CASE("dataset write/load round trip") {
  const PaperDataset original = synthesize_dataset(200, 0.35, 0.5, 4242);
  const fs::path path = fs::path("dataset_scratch") / "roundtrip.csv";
  fs::create_directories(path.parent_path());
  write_dataset(original, path);
  const PaperDataset reloaded = load_dataset(path);
  REQUIRE(reloaded.items.size() == original.items.size());
  for (std::size_t i = 0; i < original.items.size(); ++i) {
    CHECK(reloaded.items[i].id == original.items[i].id);
    CHECK(reloaded.items[i].gold_label == original.items[i].gold_label);
    CHECK(reloaded.items[i].difficulty == original.items[i].difficulty);
  }
}

TEST_CASE("curve write/load round trip") {
  std::vector<TradeoffPoint> curve;
  TradeoffPoint p1;
  p1.budget = 10.0;
  p1.feasible = false;
  p1.loss = std::numeric_limits<double>::infinity();
  p1.price = std::numeric_limits<double>::infinity();
  curve.push_back(p1);
  TradeoffPoint p2;
  p2.budget = 123.456789012345;
  p2.params.n_tests = 4;
  p2.params.judgments_per_paper = 5;
  p2.params.exclusion_threshold = 3;
  p2.loss = 0.0123456789012345;
  p2.price = 0.1001;
  p2.feasible = true;
  curve.push_back(p2);
  TradeoffPoint p3 = p2;
  p3.budget = 200.0;
  p3.loss = 0.001;
  curve.push_back(p3);

  const fs::path path = fs::path("dataset_scratch") / "curve.csv";
  fs::create_directories(path.parent_path());
  write_curve(curve, path);

  {
    std::ifstream in(path);
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) ++lines;
    CHECK(lines == 4);  // header + 3 points
  }

  const std::vector<TradeoffPoint> reloaded = load_curve(path);
  REQUIRE(reloaded.size() == curve.size());
  for (std::size_t i = 0; i < curve.size(); ++i) {
    CHECK(reloaded[i].budget == doctest::Approx(curve[i].budget).epsilon(1e-9));
    CHECK(reloaded[i].params.n_tests == curve[i].params.n_tests);
    CHECK(reloaded[i].params.judgments_per_paper == curve[i].params.judgments_per_paper);
    CHECK(reloaded[i].params.exclusion_threshold == curve[i].params.exclusion_threshold);
    if (std::isinf(curve[i].loss)) {
      CHECK(std::isinf(reloaded[i].loss));
    } else {
      CHECK(reloaded[i].loss == doctest::Approx(curve[i].loss).epsilon(1e-9));
      CHECK(reloaded[i].price == doctest::Approx(curve[i].price).epsilon(1e-9));
    }
    CHECK(reloaded[i].feasible == curve[i].feasible);
  }
}

TEST_CASE("empty curve writes a header-only file") {
  const fs::path path = fs::path("dataset_scratch") / "empty_curve.csv";
  fs::create_directories(path.parent_path());
  write_curve({}, path);
  std::ifstream in(path);
  std::string line;
  CHECK(std::getline(in, line));
  CHECK(line == "budget,n_tests,judgments,exclusion_threshold,expected_loss,expected_price,feasible");
  CHECK_FALSE(std::getline(in, line));
}

TEST_CASE("write_outcome emits decision rows with correctness flags") {
  RunOutcome outcome;
  outcome.decisions["a"] = Label::include;
  outcome.decisions["b"] = Label::exclude;
  std::map<std::string, Label> gold{{"a", Label::include}, {"b", Label::include}};
  const fs::path path = fs::path("dataset_scratch") / "outcome.csv";
  fs::create_directories(path.parent_path());
  write_outcome(outcome, gold, path);

  std::ifstream in(path);
  std::string header, row1, row2;
  std::getline(in, header);
  std::getline(in, row1);
  std::getline(in, row2);
  CHECK(header == "paper_id,decision,gold_label,correct");
  CHECK(row1 == "a,include,include,1");
  CHECK(row2 == "b,exclude,include,0");
}

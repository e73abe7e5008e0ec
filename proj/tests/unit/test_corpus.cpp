#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include <doctest.h>

#include "trivscan/corpus.hpp"
#include "trivscan/error.hpp"

using namespace trivscan;
using namespace trivscan::corpus;
namespace fs = std::filesystem;

namespace {

const fs::path fixtures = FIXTURES_DIR;

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("trivscan-corpus-" + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::vector<std::string> names(const ScanResult& s) {
  std::vector<std::string> out;
  for (auto& r : s.reports) out.push_back(r.name + "=" + std::string(to_string(r.classification.label)));
  return out;
}

}  // namespace

TEST_CASE("scan of the fixture corpus matches the authored truth") {
  auto result = scan_corpus(fixtures / "corpus", {}, 2);
  CHECK(result.reports.size() == 15);
  REQUIRE(result.no_source.size() == 1);
  CHECK(result.no_source[0].entry == "comments-only");
  CHECK(result.failed.empty());
  auto truth = read_truth(fixtures / "truth.csv");
  CHECK(truth.size() == 15);
  auto eval = evaluate_results(result.reports, truth);
  CHECK(eval.accuracy == 1.0);
  CHECK(eval.macro_f1 == 1.0);

  auto summary = summarize(result.reports);
  CHECK(summary.package_count == 15);
  CHECK(summary.counts.at(Label::data_only) == 6);
  CHECK(summary.counts.at(Label::trivial) == 5);
  CHECK(summary.counts.at(Label::normal) == 4);
  double pct = 0;
  for (auto& [label, p] : summary.percentages) pct += p;
  CHECK(pct == doctest::Approx(100.0).epsilon(1e-9));
  CHECK(summary.vulnerabilities.empty());
}

TEST_CASE("scan results do not depend on job count") {
  auto one = scan_corpus(fixtures / "corpus", {}, 1);
  for (unsigned jobs : {2u, 4u, 16u}) {
    auto many = scan_corpus(fixtures / "corpus", {}, jobs);
    CHECK(names(many) == names(one));
    CHECK(summarize(many.reports) == summarize(one.reports));
  }
}

TEST_CASE("empty root and fault injection") {
  TempDir empty("empty");
  auto none = scan_corpus(empty.path, {}, 3);
  CHECK(none.reports.empty());
  CHECK(summarize(none.reports).package_count == 0);
  CHECK_THROWS_AS(scan_corpus(empty.path / "missing", {}, 1), Error);

  TempDir faulty("faulty");
  fs::copy(fixtures / "corpus" / "const-e", faulty.path / "const-e", fs::copy_options::recursive);
  fs::copy(fixtures / "corpus" / "facade", faulty.path / "facade", fs::copy_options::recursive);
  fs::create_directories(faulty.path / "broken");
  std::ofstream(faulty.path / "broken" / "package.json") << "{ nope";
  std::ofstream(faulty.path / "junk.tgz") << "not a tarball at all";
  auto r = scan_corpus(faulty.path, {}, 2);
  CHECK(r.reports.size() == 2);
  REQUIRE(r.failed.size() == 2);
  CHECK(r.failed[0].entry == "broken");
  CHECK(r.failed[1].entry == "junk.tgz");
  auto text = render_summary(summarize(r.reports), &r);
  CHECK(text.find("failed: 2") != std::string::npos);
}

TEST_CASE("results round trip through json-lines") {
  auto idx = deps::RegistryIndex::load(fixtures / "registry");
  auto db = audit::AdvisoryDatabase::load(fixtures / "advisories.jsonl");
  AnalyzeOptions opt;
  opt.advisories = &db;
  opt.registry = &idx;
  auto result = scan_corpus(fixtures / "corpus", opt, 2);
  std::stringstream buf;
  write_results(buf, result.reports);
  auto back = read_results(buf);
  REQUIRE(back.size() == result.reports.size());
  auto original = summarize(result.reports);
  CHECK(summarize(back) == original);
  CHECK(to_json(summarize(back)) == to_json(original));
  CHECK(original.vulnerabilities.count("data-only") == 1);

  std::istringstream bad("{\"name\": 1}\n");
  CHECK_THROWS_AS(read_results(bad), Error);
  std::istringstream blank("\n\n");
  CHECK(read_results(blank).empty());
}

TEST_CASE("describe") {
  auto d = describe({4, 1, 3, 2});
  CHECK(d.count == 4);
  CHECK(d.min == 1);
  CHECK(d.max == 4);
  CHECK(d.median == 2.5);
  CHECK(d.mean == 2.5);
  CHECK(describe({}).count == 0);
}

TEST_CASE("metrics and group splits") {
  auto result = scan_corpus(fixtures / "corpus", {}, 1);
  CHECK(parse_metric("loc") == Metric::loc);
  CHECK(parse_metric("vulnerabilities") == Metric::vulnerabilities);
  CHECK_THROWS_AS(parse_metric("height"), Error);
  auto split = split_by_label(result.reports, Label::data_only, Metric::loc);
  CHECK(split.in_group.size() == 6);
  CHECK(split.rest.size() == 9);
  auto vulns = split_by_label(result.reports, Label::trivial, Metric::vulnerabilities);
  CHECK(vulns.skipped == 15);
  CHECK(metric_value(result.reports[0], Metric::dependencies) == std::nullopt);
}

TEST_CASE("truth csv and evaluation with flips") {
  std::istringstream csv("package,label\na,trivial\n\nb , Data-Only\n");
  auto t = read_truth(csv);
  REQUIRE(t.size() == 2);
  CHECK(t[1].first == "b");
  CHECK(t[1].second == Label::data_only);
  std::istringstream headerless("x,normal\n");
  CHECK(read_truth(headerless).size() == 1);
  std::istringstream bad("x;normal\n");
  CHECK_THROWS_AS(read_truth(bad), Error);

  auto result = scan_corpus(fixtures / "corpus", {}, 1);
  auto eval = evaluate_results(result.reports, read_truth(fixtures / "truth_flipped.csv"));
  CHECK(eval.confusion[0] == std::array<int, 3>{3, 0, 0});
  CHECK(eval.confusion[1] == std::array<int, 3>{1, 5, 1});
  CHECK(eval.confusion[2] == std::array<int, 3>{0, 0, 5});
  CHECK(eval.accuracy == doctest::Approx(13.0 / 15.0));

  std::vector<std::pair<std::string, Label>> missing = {{"const-e", Label::data_only}, {"ghost", Label::normal},
                                                        {"phantom", Label::trivial}};
  try {
    evaluate_results(result.reports, missing);
    FAIL("expected MissingPackage");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::missing_package);
    CHECK(std::string(e.what()).find("ghost") != std::string::npos);
    CHECK(std::string(e.what()).find("phantom") != std::string::npos);
  }
  auto text = render_evaluation(eval);
  CHECK(text.find("accuracy") != std::string::npos);
  CHECK(to_json(eval)["confusion"][1][2] == 1);
}

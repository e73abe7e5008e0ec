#pragma once

// Corpus-level workflows behind the `scan`, `stats` and `evaluate` commands.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "trivscan/report.hpp"
#include "trivscan/stats.hpp"

namespace trivscan::corpus {

struct SkippedPackage {
  std::string entry;  // directory or tarball name under the corpus root
  std::string reason;
};

struct ScanResult {
  std::vector<PackageReport> reports;      // ordered by corpus entry name
  std::vector<SkippedPackage> no_source;   // loaded fine but nothing measurable
  std::vector<SkippedPackage> failed;      // could not be loaded or analyzed
};

/// Analyzes every subdirectory (and `.tgz`/`.tar.gz` file) of `root` with a
/// bounded pool of `jobs` workers. Per-package failures never abort the scan.
ScanResult scan_corpus(const std::filesystem::path& root, const AnalyzeOptions& options, unsigned jobs = 1);

struct Distribution {
  std::size_t count = 0;
  double min = 0, median = 0, mean = 0, max = 0;

  friend bool operator==(const Distribution&, const Distribution&) = default;
};

Distribution describe(std::vector<double> values);

struct CorpusSummary {
  std::size_t package_count = 0;
  std::map<Label, std::size_t> counts;
  std::map<Label, double> percentages;
  /// Present only when every report carries vulnerability counts.
  std::map<std::string, Distribution> vulnerabilities;  // keyed by group name

  friend bool operator==(const CorpusSummary&, const CorpusSummary&) = default;
};

CorpusSummary summarize(const std::vector<PackageReport>& reports);

nlohmann::json to_json(const CorpusSummary& summary);
std::string render_summary(const CorpusSummary& summary, const ScanResult* scan = nullptr);

void write_results(std::ostream& out, const std::vector<PackageReport>& reports);
/// Throws Error(invalid_argument) naming the offending line.
std::vector<PackageReport> read_results(std::istream& in);
std::vector<PackageReport> read_results(const std::filesystem::path& path);

/// Quantities a group comparison can be run on.
enum class Metric { vulnerabilities, loc, cyclomatic, functions, dependencies, avg_cyclomatic };
Metric parse_metric(const std::string& text);
std::optional<double> metric_value(const PackageReport& report, Metric metric);

struct GroupSplit {
  std::vector<double> in_group;
  std::vector<double> rest;
  std::size_t skipped = 0;  // reports lacking the metric
};

/// Splits reports into `label` vs every other label.
GroupSplit split_by_label(const std::vector<PackageReport>& reports, Label label, Metric metric);

/// `package,label` CSV with an optional header row.
std::vector<std::pair<std::string, Label>> read_truth(std::istream& in);
std::vector<std::pair<std::string, Label>> read_truth(const std::filesystem::path& path);

/// Pairs ground truth with predicted labels by package name. Throws
/// Error(missing_package) listing every truth entry absent from results.
stats::EvalReport evaluate_results(const std::vector<PackageReport>& reports,
                                   const std::vector<std::pair<std::string, Label>>& truth);

std::string render_evaluation(const stats::EvalReport& report);
nlohmann::json to_json(const stats::EvalReport& report);

}  // namespace trivscan::corpus

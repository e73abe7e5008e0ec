#pragma once

// Single-package analysis pipeline and its renderings.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "trivscan/advisories.hpp"
#include "trivscan/classifier.hpp"
#include "trivscan/depgraph.hpp"
#include "trivscan/error.hpp"
#include "trivscan/ingest.hpp"
#include "trivscan/metrics.hpp"

namespace trivscan {

struct AnalyzeOptions {
  FilterOptions filter;
  metrics::Options metrics;
  Thresholds thresholds;
  const deps::RegistryIndex* registry = nullptr;
  const audit::AdvisoryDatabase* advisories = nullptr;
  deps::CountBy count_by = deps::CountBy::name_version;
  /// Classify dependencies found under the package's own node_modules.
  bool annotate_dependencies = true;
};

struct FileReport {
  std::string path;
  metrics::FileMetrics metrics;
};

struct VulnerabilitySummary {
  int total = 0;
  std::map<audit::Severity, int> by_severity;

  friend bool operator==(const VulnerabilitySummary&, const VulnerabilitySummary&) = default;
};

struct PackageReport {
  std::string name;
  std::string version;
  std::string source;  // path the package was loaded from
  metrics::PackageMetrics metrics;
  Classification classification;
  std::vector<FileReport> files;
  std::optional<std::size_t> dependency_count;
  std::optional<VulnerabilitySummary> vulnerabilities;
  std::vector<std::string> warnings;

  // Populated only by a live analysis; not serialized.
  std::optional<deps::DependencyGraph> graph;
  std::map<deps::NodeId, Label> dependency_labels;
  std::map<deps::NodeId, int> node_vulnerabilities;
};

/// ingest -> metrics -> classifier, plus closure and audit when the options
/// carry a registry and an advisory database. Throws Error(missing_manifest |
/// malformed_manifest | no_measurable_source | io_failure).
PackageReport analyze_package(const std::filesystem::path& path, const AnalyzeOptions& options = {});

/// Same pipeline over already-filtered files; used by analyze_package.
PackageReport analyze_files(const PackageSource& pkg, const std::vector<SourceFile>& files,
                            const AnalyzeOptions& options);

nlohmann::json to_json(const PackageReport& report);
/// Inverse of to_json for the serialized fields. Throws Error(invalid_argument).
PackageReport report_from_json(const nlohmann::json& doc);

struct RenderOptions {
  bool color = false;
  int depth = 5;
  bool show_warnings = false;
};

/// Human-readable report: metrics, rule trace, and the dependency tree
/// with data-only/trivial and vulnerable nodes highlighted.
std::string render_text(const PackageReport& report, const RenderOptions& options = {});

/// Process exit code for an error kind: 2 for missing manifest or no
/// measurable source (and other input errors), 1 for I/O failures.
int exit_code_for(ErrorKind kind);

}  // namespace trivscan

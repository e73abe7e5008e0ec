#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "trivscan/depgraph.hpp"
#include "trivscan/semver.hpp"

namespace trivscan::audit {

enum class Severity { low, moderate, high, critical };

inline constexpr std::array<Severity, 4> kSeverities = {Severity::low, Severity::moderate, Severity::high,
                                                         Severity::critical};

std::string_view to_string(Severity s);
/// Throws Error(malformed_advisory) for anything outside the four audit levels.
Severity parse_severity(std::string_view text);

struct Advisory {
  std::string id;
  std::string package;
  semver::Range range;
  Severity severity = Severity::low;
};

/// Advisories indexed by package name; ids are unique.
class AdvisoryDatabase {
 public:
  /// One JSON object per line: {"id","name","range","severity"}. Blank lines
  /// are ignored. Throws Error(malformed_advisory) naming the line.
  static AdvisoryDatabase parse(std::istream& in);
  static AdvisoryDatabase load(const std::filesystem::path& path);

  /// Throws Error(malformed_advisory) on a duplicate id.
  void add(Advisory advisory);

  const std::vector<Advisory>& for_package(const std::string& name) const;
  std::size_t size() const { return ids_.size(); }

 private:
  std::unordered_map<std::string, std::vector<Advisory>> by_package_;
  std::map<std::string, std::string> ids_;  // id -> package
};

struct Match {
  std::string advisory_id;
  deps::NodeId node;
};

struct VulnerabilityReport {
  int total = 0;
  std::map<Severity, int> by_severity{{Severity::low, 0}, {Severity::moderate, 0}, {Severity::high, 0},
                                      {Severity::critical, 0}};
  std::vector<Match> matches;
};

/// One match per (advisory, node) pair over the whole closure, root included.
VulnerabilityReport audit(const deps::DependencyGraph& graph, const AdvisoryDatabase& db);

/// Converts `npm audit --json` output (v1 `advisories` or v2
/// `vulnerabilities` layout) into advisory JSON-lines text.
std::string convert_audit_report(std::string_view audit_json, std::vector<std::string>* warnings = nullptr);

}  // namespace trivscan::audit

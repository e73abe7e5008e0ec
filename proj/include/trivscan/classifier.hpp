#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "trivscan/metrics.hpp"

namespace trivscan {

struct Thresholds {
  int trivial_loc_max = 35;
  int trivial_cc_max = 10;
  double data_only_avg_cc_max = 1.0;

  /// Throws Error(invalid_thresholds) unless all values are strictly positive.
  void validate() const;
};

/// Reads overrides from JSON, or from a flat TOML document (`key = value`,
/// optionally under a `[thresholds]` table). Keys match the field names;
/// missing keys keep their defaults.
Thresholds load_thresholds(const std::filesystem::path& path);
Thresholds parse_thresholds(std::string_view text);

enum class Label { data_only, trivial, normal };

std::string_view to_string(Label label);
/// Accepts `data-only`, `trivial`, `normal` (case-insensitive). Throws Error(invalid_argument).
Label parse_label(std::string_view text);

struct RuleCheck {
  std::string rule;
  double quantity = 0.0;
  double threshold = 0.0;
  bool satisfied = false;

  friend bool operator==(const RuleCheck&, const RuleCheck&) = default;
};

struct Classification {
  Label label = Label::normal;
  std::vector<RuleCheck> trace;
};

// Rule names as they appear in traces and reports.
inline constexpr std::string_view kRuleFunctions = "functions == 0";
inline constexpr std::string_view kRuleAvgCyclomatic = "avg cyclomatic per file <= max";
inline constexpr std::string_view kRuleExternalImports = "external imports == 0";
inline constexpr std::string_view kRuleTrivialLoc = "loc <= max";
inline constexpr std::string_view kRuleTrivialCyclomatic = "cyclomatic <= max";

/// Data-only takes precedence over trivial; all bounds are inclusive.
Classification classify(const metrics::PackageMetrics& m, const Thresholds& t = {});

/// Recomputes the label from a trace alone.
Label label_from_trace(const std::vector<RuleCheck>& trace);

}  // namespace trivscan

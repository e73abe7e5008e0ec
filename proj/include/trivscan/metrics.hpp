#pragma once

#include <string>
#include <vector>

#include "trivscan/lexer.hpp"
#include "trivscan/scanner.hpp"

namespace trivscan::metrics {

struct ImportRef {
  std::string specifier;
  bool internal = false;

  friend bool operator==(const ImportRef&, const ImportRef&) = default;
};

struct FileMetrics {
  int loc = 0;
  int cyclomatic = 0;  // >= 1 when loc >= 1, else 0
  int functions = 0;
  std::vector<ImportRef> imports;
};

struct PackageMetrics {
  int loc = 0;         // sum over files
  int cyclomatic = 0;  // sum over files; the trivial rule reads this
  int functions = 0;
  int files_with_code = 0;
  double avg_cyclomatic_per_file = 0.0;  // the data-only rule reads this
  int external_imports = 0;
  int total_imports = 0;
};

struct Options {
  /// Count `??` as a decision point.
  bool count_nullish = true;
  /// Treat `node:` and bare builtin module names as external imports.
  bool builtins_external = true;
};

/// Lines holding at least one non-trivia token. Blank and comment-only
/// lines do not count; a multi-line literal counts each non-blank line it spans.
int count_loc(const std::vector<lex::Token>& tokens);

/// 1 + decision points. `else if` counts as an `if`; `default` and bare `else` count zero.
int cyclomatic_complexity(const std::vector<scan::Construct>& constructs, const Options& options = {});

int count_functions(const std::vector<scan::Construct>& constructs);

enum class ImportClass { internal, external };

/// Relative (`./`, `../`) and absolute (`/`) specifiers are internal.
ImportClass classify_import(const std::string& specifier, const Options& options = {});

bool is_node_builtin(const std::string& specifier);

FileMetrics file_metrics(const scan::ParseOutcome& outcome, const Options& options = {});

/// Throws Error(no_measurable_source) when no file has code.
PackageMetrics package_metrics(const std::vector<FileMetrics>& files);

}  // namespace trivscan::metrics

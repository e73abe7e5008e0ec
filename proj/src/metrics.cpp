#include "trivscan/metrics.hpp"

#include <set>
#include <unordered_set>

#include "trivscan/error.hpp"

namespace trivscan::metrics {

using scan::ConstructKind;

int count_loc(const std::vector<lex::Token>& tokens) {
  std::set<int> code_lines;
  for (const auto& t : tokens) {
    if (t.is_trivia()) continue;
    // Walk the lexeme so every line it touches with visible text is counted.
    int line = t.line;
    bool visible = false;
    for (std::size_t i = 0; i < t.lexeme.size(); ++i) {
      const char c = t.lexeme[i];
      if (c == '\n' || c == '\r') {
        if (visible) code_lines.insert(line);
        if (c == '\r' && i + 1 < t.lexeme.size() && t.lexeme[i + 1] == '\n') ++i;
        ++line;
        visible = false;
      } else if (c != ' ' && c != '\t') {
        visible = true;
      }
    }
    if (visible) code_lines.insert(line);
  }
  return static_cast<int>(code_lines.size());
}

int cyclomatic_complexity(const std::vector<scan::Construct>& constructs, const Options& options) {
  int complexity = 1;
  for (const auto& c : constructs) {
    switch (c.kind) {
      case ConstructKind::if_:
      case ConstructKind::else_if:
      case ConstructKind::for_:
      case ConstructKind::for_in_of:
      case ConstructKind::while_:
      case ConstructKind::do_while:
      case ConstructKind::case_clause:
      case ConstructKind::catch_clause:
      case ConstructKind::conditional_expr:
      case ConstructKind::logical_and:
      case ConstructKind::logical_or:
        ++complexity;
        break;
      case ConstructKind::nullish_coalesce:
        if (options.count_nullish) ++complexity;
        break;
      default:
        break;
    }
  }
  return complexity;
}

int count_functions(const std::vector<scan::Construct>& constructs) {
  int n = 0;
  for (const auto& c : constructs) {
    if (scan::is_function(c.kind)) ++n;
  }
  return n;
}

bool is_node_builtin(const std::string& specifier) {
  static const std::unordered_set<std::string> builtins = {
      "assert", "async_hooks", "buffer", "child_process", "cluster", "console", "constants", "crypto",
      "dgram", "diagnostics_channel", "dns", "domain", "events", "fs", "http", "http2", "https",
      "inspector", "module", "net", "os", "path", "perf_hooks", "process", "punycode", "querystring",
      "readline", "repl", "stream", "string_decoder", "sys", "timers", "tls", "trace_events", "tty",
      "url", "util", "v8", "vm", "wasi", "worker_threads", "zlib"};
  if (specifier.rfind("node:", 0) == 0) return true;
  const std::string head = specifier.substr(0, specifier.find('/'));
  return builtins.count(head) > 0;
}

ImportClass classify_import(const std::string& specifier, const Options& options) {
  if (specifier.rfind("./", 0) == 0 || specifier.rfind("../", 0) == 0 || specifier.rfind("/", 0) == 0 ||
      specifier == "." || specifier == "..") {
    return ImportClass::internal;
  }
  if (!options.builtins_external && is_node_builtin(specifier)) return ImportClass::internal;
  return ImportClass::external;
}

FileMetrics file_metrics(const scan::ParseOutcome& outcome, const Options& options) {
  FileMetrics m;
  m.loc = count_loc(outcome.tokens);
  m.cyclomatic = m.loc >= 1 ? cyclomatic_complexity(outcome.constructs, options) : 0;
  m.functions = count_functions(outcome.constructs);
  for (const auto& c : outcome.constructs) {
    if (!scan::is_module_reference(c.kind) || !c.specifier) continue;
    m.imports.push_back({*c.specifier, classify_import(*c.specifier, options) == ImportClass::internal});
  }
  return m;
}

PackageMetrics package_metrics(const std::vector<FileMetrics>& files) {
  PackageMetrics p;
  for (const auto& f : files) {
    p.loc += f.loc;
    p.cyclomatic += f.cyclomatic;
    p.functions += f.functions;
    if (f.loc >= 1) ++p.files_with_code;
    for (const auto& imp : f.imports) {
      ++p.total_imports;
      if (!imp.internal) ++p.external_imports;
    }
  }
  if (p.files_with_code == 0) throw Error(ErrorKind::no_measurable_source, "no file contains code");
  p.avg_cyclomatic_per_file = static_cast<double>(p.cyclomatic) / p.files_with_code;
  return p;
}

}  // namespace trivscan::metrics

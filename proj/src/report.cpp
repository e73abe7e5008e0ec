#include "trivscan/report.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>

#include "trivscan/error.hpp"
#include "trivscan/scanner.hpp"

namespace trivscan {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* kReset = "\033[0m";
const char* kBold = "\033[1m";
const char* kRed = "\033[31m";
const char* kGreen = "\033[32m";
const char* kYellow = "\033[33m";
const char* kMagenta = "\033[35m";
const char* kDim = "\033[2m";

std::string paint(const std::string& text, const char* code, bool color) {
  return color ? std::string(code) + text + kReset : text;
}

const char* label_color(Label label) {
  switch (label) {
    case Label::data_only: return kMagenta;
    case Label::trivial: return kYellow;
    case Label::normal: return kGreen;
  }
  return kGreen;
}

std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// Integral quantities print without a fraction.
std::string number(double v) {
  if (v == std::floor(v) && std::fabs(v) < 1e15) return std::to_string(static_cast<long long>(v));
  return fixed(v);
}

// Looks for the dependency materialized under the package's node_modules.
std::optional<Label> installed_label(const PackageSource& pkg, const deps::NodeId& node,
                                     const AnalyzeOptions& options) {
  if (pkg.from_tarball()) return std::nullopt;
  const fs::path dir = pkg.origin() / "node_modules" / fs::path(node.name);
  std::error_code ec;
  if (!fs::is_regular_file(dir / "package.json", ec)) return std::nullopt;
  try {
    AnalyzeOptions inner = options;
    inner.registry = nullptr;
    inner.advisories = nullptr;
    inner.annotate_dependencies = false;
    PackageReport r = analyze_package(dir, inner);
    if (r.version != node.version) return std::nullopt;
    return r.classification.label;
  } catch (const Error&) {
    return std::nullopt;
  }
}

json metrics_json(const metrics::PackageMetrics& m) {
  return {{"loc", m.loc},
          {"cyclomatic", m.cyclomatic},
          {"functions", m.functions},
          {"files_with_code", m.files_with_code},
          {"avg_cyclomatic_per_file", m.avg_cyclomatic_per_file},
          {"external_imports", m.external_imports},
          {"total_imports", m.total_imports}};
}

}  // namespace

int exit_code_for(ErrorKind kind) { return kind == ErrorKind::io_failure ? 1 : 2; }

PackageReport analyze_files(const PackageSource& pkg, const std::vector<SourceFile>& files,
                            const AnalyzeOptions& options) {
  PackageReport report;
  report.name = pkg.name();
  report.version = pkg.manifest().version_text;
  report.source = pkg.origin().string();
  report.warnings.insert(report.warnings.end(), pkg.warnings().begin(), pkg.warnings().end());

  std::vector<metrics::FileMetrics> per_file;
  for (const auto& f : files) {
    auto outcome = scan::parse_source(f.content);
    for (const auto& e : outcome.errors) {
      report.warnings.push_back(f.relative_path + ":" + std::to_string(e.line) + ": " + e.message);
    }
    auto fm = metrics::file_metrics(outcome, options.metrics);
    report.files.push_back({f.relative_path, fm});
    per_file.push_back(std::move(fm));
  }
  report.metrics = metrics::package_metrics(per_file);
  report.classification = classify(report.metrics, options.thresholds);

  if (options.registry) {
    report.graph = deps::resolve_closure(pkg, *options.registry);
    report.dependency_count = deps::transitive_count(*report.graph, options.count_by);
    for (const auto& u : report.graph->unresolved) {
      report.warnings.push_back("unresolved dependency " + u.name + "@" + u.range + " of " +
                                u.dependent.to_string() + ": " + u.reason);
    }
  }
  if (options.advisories) {
    deps::DependencyGraph single;
    single.root = {report.name, report.version};
    single.nodes.insert(single.root);
    const auto vr = audit::audit(report.graph ? *report.graph : single, *options.advisories);
    report.vulnerabilities = VulnerabilitySummary{vr.total, vr.by_severity};
    for (const auto& m : vr.matches) ++report.node_vulnerabilities[m.node];
  }
  if (report.graph && options.annotate_dependencies) {
    for (const auto& node : report.graph->nodes) {
      if (node == report.graph->root) continue;
      if (auto label = installed_label(pkg, node, options)) report.dependency_labels[node] = *label;
    }
  }
  return report;
}

PackageReport analyze_package(const fs::path& path, const AnalyzeOptions& options) {
  options.thresholds.validate();
  PackageSource pkg = load_package(path);
  std::vector<std::string> warnings;
  auto files = filter_files(pkg, options.filter, &warnings);
  if (!has_measurable_source(files)) {
    throw Error(ErrorKind::no_measurable_source, pkg.name() + " has no measurable source");
  }
  PackageReport report = analyze_files(pkg, files, options);
  report.warnings.insert(report.warnings.begin(), warnings.begin(), warnings.end());
  return report;
}

json to_json(const PackageReport& r) {
  json trace = json::array();
  for (const auto& c : r.classification.trace) {
    trace.push_back({{"rule", c.rule}, {"quantity", c.quantity}, {"threshold", c.threshold}, {"satisfied", c.satisfied}});
  }
  json files = json::array();
  for (const auto& f : r.files) {
    files.push_back({{"path", f.path},
                     {"loc", f.metrics.loc},
                     {"cyclomatic", f.metrics.cyclomatic},
                     {"functions", f.metrics.functions}});
  }
  json doc = {{"name", r.name},
              {"version", r.version},
              {"source", r.source},
              {"label", std::string(to_string(r.classification.label))},
              {"metrics", metrics_json(r.metrics)},
              {"trace", trace},
              {"files", files},
              {"warnings", r.warnings}};
  doc["dependency_count"] = r.dependency_count ? json(*r.dependency_count) : json(nullptr);
  if (r.vulnerabilities) {
    json sev = json::object();
    for (auto s : audit::kSeverities) {
      auto it = r.vulnerabilities->by_severity.find(s);
      sev[std::string(audit::to_string(s))] = it == r.vulnerabilities->by_severity.end() ? 0 : it->second;
    }
    doc["vulnerabilities"] = {{"total", r.vulnerabilities->total}, {"by_severity", sev}};
  } else {
    doc["vulnerabilities"] = nullptr;
  }
  return doc;
}

PackageReport report_from_json(const json& doc) {
  try {
    PackageReport r;
    r.name = doc.at("name").get<std::string>();
    r.version = doc.at("version").get<std::string>();
    r.source = doc.value("source", "");
    const auto& m = doc.at("metrics");
    r.metrics.loc = m.at("loc").get<int>();
    r.metrics.cyclomatic = m.at("cyclomatic").get<int>();
    r.metrics.functions = m.at("functions").get<int>();
    r.metrics.files_with_code = m.at("files_with_code").get<int>();
    r.metrics.avg_cyclomatic_per_file = m.at("avg_cyclomatic_per_file").get<double>();
    r.metrics.external_imports = m.at("external_imports").get<int>();
    r.metrics.total_imports = m.at("total_imports").get<int>();
    for (const auto& c : doc.at("trace")) {
      r.classification.trace.push_back({c.at("rule").get<std::string>(), c.at("quantity").get<double>(),
                                        c.at("threshold").get<double>(), c.at("satisfied").get<bool>()});
    }
    r.classification.label = parse_label(doc.at("label").get<std::string>());
    if (doc.contains("files")) {
      for (const auto& f : doc["files"]) {
        FileReport fr;
        fr.path = f.at("path").get<std::string>();
        fr.metrics.loc = f.at("loc").get<int>();
        fr.metrics.cyclomatic = f.at("cyclomatic").get<int>();
        fr.metrics.functions = f.at("functions").get<int>();
        r.files.push_back(std::move(fr));
      }
    }
    if (doc.contains("dependency_count") && !doc["dependency_count"].is_null()) {
      r.dependency_count = doc["dependency_count"].get<std::size_t>();
    }
    if (doc.contains("vulnerabilities") && !doc["vulnerabilities"].is_null()) {
      VulnerabilitySummary v;
      v.total = doc["vulnerabilities"].at("total").get<int>();
      for (const auto& [sev, n] : doc["vulnerabilities"].at("by_severity").items()) {
        v.by_severity[audit::parse_severity(sev)] = n.get<int>();
      }
      r.vulnerabilities = v;
    }
    if (doc.contains("warnings")) r.warnings = doc["warnings"].get<std::vector<std::string>>();
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::invalid_argument, std::string("bad report record: ") + e.what());
  }
}

std::string render_text(const PackageReport& r, const RenderOptions& options) {
  const bool color = options.color;
  const Label label = r.classification.label;
  std::ostringstream out;
  out << paint(r.name + "@" + r.version, kBold, color) << "  "
      << paint("[" + std::string(to_string(label)) + "]", label_color(label), color) << "\n";
  const auto& m = r.metrics;
  out << "  loc " << m.loc << "  cyclomatic " << m.cyclomatic << "  functions " << m.functions << "  files "
      << m.files_with_code << "  avg cc/file " << fixed(m.avg_cyclomatic_per_file) << "  external imports "
      << m.external_imports << "\n";
  out << "  rules:\n";
  for (const auto& c : r.classification.trace) {
    std::string mark = c.satisfied ? paint("pass", kGreen, color) : paint("fail", kRed, color);
    char line[160];
    std::snprintf(line, sizeof line, "    %s  %-32s %8s  (limit %s)\n", mark.c_str(), c.rule.c_str(),
                  number(c.quantity).c_str(), number(c.threshold).c_str());
    out << line;
  }

  if (r.graph) {
    const auto& g = *r.graph;
    out << "  dependencies: " << r.dependency_count.value_or(0) << " transitive\n";
    std::set<deps::NodeId> path;
    std::function<void(const deps::NodeId&, const std::string&, bool, int)> walk =
        [&](const deps::NodeId& node, const std::string& prefix, bool last, int depth) {
          std::string text = node.to_string();
          if (auto it = r.dependency_labels.find(node); it != r.dependency_labels.end()) {
            const Label l = it->second;
            std::string tag = " [" + std::string(to_string(l)) + "]";
            text += l == Label::normal ? paint(tag, kDim, color) : paint(tag, label_color(l), color);
          }
          if (auto it = r.node_vulnerabilities.find(node); it != r.node_vulnerabilities.end()) {
            text += paint(" (" + std::to_string(it->second) + (it->second == 1 ? " vulnerability)" : " vulnerabilities)"), kRed, color);
          }
          const bool cycle = path.count(node) > 0;
          if (cycle) text += paint(" (cycle)", kDim, color);
          if (depth == 0) {
            out << "  " << text << "\n";
          } else {
            out << "  " << prefix << (last ? "`-- " : "|-- ") << text << "\n";
          }
          if (cycle) return;
          auto kids = g.children(node);
          if (kids.empty()) return;
          const std::string child_prefix = depth == 0 ? "" : prefix + (last ? "    " : "|   ");
          if (depth >= options.depth) {
            out << "  " << child_prefix << "`-- ...\n";
            return;
          }
          path.insert(node);
          for (std::size_t i = 0; i < kids.size(); ++i) walk(kids[i], child_prefix, i + 1 == kids.size(), depth + 1);
          path.erase(node);
        };
    walk(g.root, "", true, 0);
  }
  if (r.vulnerabilities) {
    const auto& v = *r.vulnerabilities;
    auto count = [&](audit::Severity s) {
      auto it = v.by_severity.find(s);
      return it == v.by_severity.end() ? 0 : it->second;
    };
    std::string line = "  vulnerabilities: " + std::to_string(v.total) + " (low " +
                       std::to_string(count(audit::Severity::low)) + ", moderate " +
                       std::to_string(count(audit::Severity::moderate)) + ", high " +
                       std::to_string(count(audit::Severity::high)) + ", critical " +
                       std::to_string(count(audit::Severity::critical)) + ")";
    out << (v.total > 0 ? paint(line, kRed, color) : line) << "\n";
  }
  if (options.show_warnings) {
    for (const auto& w : r.warnings) out << "  warning: " << w << "\n";
  }
  return out.str();
}

}  // namespace trivscan

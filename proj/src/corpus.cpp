#include "trivscan/corpus.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include "trivscan/error.hpp"

namespace trivscan::corpus {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

bool is_archive_name(const std::string& name) {
  auto ends = [&](std::string_view s) { return name.size() > s.size() && name.substr(name.size() - s.size()) == s; };
  return ends(".tgz") || ends(".tar.gz");
}

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

ScanResult scan_corpus(const fs::path& root, const AnalyzeOptions& options, unsigned jobs) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw Error(ErrorKind::io_failure, "corpus root " + root.string() + " is not a directory");
  std::vector<fs::path> entries;
  for (const auto& entry : fs::directory_iterator(root, fs::directory_options::skip_permission_denied, ec)) {
    std::error_code sec;
    const std::string name = entry.path().filename().string();
    if (name.empty() || name.front() == '.') continue;
    if (entry.is_directory(sec) || (entry.is_regular_file(sec) && is_archive_name(name))) entries.push_back(entry.path());
  }
  std::sort(entries.begin(), entries.end());

  struct Slot {
    std::optional<PackageReport> report;
    std::optional<SkippedPackage> no_source;
    std::optional<SkippedPackage> failed;
  };
  std::vector<Slot> slots(entries.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < entries.size(); i = next++) {
      const std::string entry = entries[i].filename().string();
      try {
        slots[i].report = analyze_package(entries[i], options);
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::no_measurable_source) slots[i].no_source = SkippedPackage{entry, e.what()};
        else slots[i].failed = SkippedPackage{entry, e.what()};
      } catch (const std::exception& e) {
        slots[i].failed = SkippedPackage{entry, e.what()};
      }
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(entries.size(), 1))));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  ScanResult result;
  for (auto& s : slots) {
    if (s.report) result.reports.push_back(std::move(*s.report));
    if (s.no_source) result.no_source.push_back(std::move(*s.no_source));
    if (s.failed) result.failed.push_back(std::move(*s.failed));
  }
  return result;
}

Distribution describe(std::vector<double> values) {
  Distribution d;
  d.count = values.size();
  if (values.empty()) return d;
  std::sort(values.begin(), values.end());
  d.min = values.front();
  d.max = values.back();
  const std::size_t n = values.size();
  d.median = n % 2 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
  d.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
  return d;
}

CorpusSummary summarize(const std::vector<PackageReport>& reports) {
  CorpusSummary s;
  s.package_count = reports.size();
  for (Label l : stats::kEvalOrder) s.counts[l] = 0;
  bool all_audited = !reports.empty();
  for (const auto& r : reports) {
    ++s.counts[r.classification.label];
    all_audited = all_audited && r.vulnerabilities.has_value();
  }
  for (const auto& [label, n] : s.counts) {
    s.percentages[label] = reports.empty() ? 0.0 : 100.0 * static_cast<double>(n) / static_cast<double>(reports.size());
  }
  if (all_audited) {
    std::map<std::string, std::vector<double>> groups;
    for (Label l : stats::kEvalOrder) groups[std::string(to_string(l))];
    groups["non-trivial"];
    groups["non-data-only"];
    for (const auto& r : reports) {
      const double v = r.vulnerabilities->total;
      const Label l = r.classification.label;
      groups[std::string(to_string(l))].push_back(v);
      if (l != Label::trivial) groups["non-trivial"].push_back(v);
      if (l != Label::data_only) groups["non-data-only"].push_back(v);
    }
    for (auto& [name, values] : groups) s.vulnerabilities[name] = describe(std::move(values));
  }
  return s;
}

json to_json(const CorpusSummary& s) {
  json counts = json::object(), pct = json::object(), vulns = json::object();
  for (const auto& [l, n] : s.counts) counts[std::string(to_string(l))] = n;
  for (const auto& [l, p] : s.percentages) pct[std::string(to_string(l))] = p;
  for (const auto& [g, d] : s.vulnerabilities) {
    vulns[g] = {{"count", d.count}, {"min", d.min}, {"median", d.median}, {"mean", d.mean}, {"max", d.max}};
  }
  return {{"package_count", s.package_count}, {"counts", counts}, {"percentages", pct}, {"vulnerabilities", vulns}};
}

std::string render_summary(const CorpusSummary& s, const ScanResult* scan) {
  std::ostringstream out;
  out << "packages analyzed: " << s.package_count << "\n";
  char line[128];
  std::snprintf(line, sizeof line, "  %-10s %8s %9s\n", "label", "count", "percent");
  out << line;
  for (Label l : stats::kEvalOrder) {
    std::snprintf(line, sizeof line, "  %-10s %8zu %8.2f%%\n", std::string(to_string(l)).c_str(), s.counts.at(l),
                  s.percentages.at(l));
    out << line;
  }
  if (!s.vulnerabilities.empty()) {
    out << "vulnerabilities per group:\n";
    std::snprintf(line, sizeof line, "  %-14s %6s %8s %8s %8s %8s\n", "group", "n", "min", "median", "mean", "max");
    out << line;
    for (const auto& [g, d] : s.vulnerabilities) {
      std::snprintf(line, sizeof line, "  %-14s %6zu %8s %8s %8s %8s\n", g.c_str(), d.count, fixed(d.min, 2).c_str(),
                    fixed(d.median, 2).c_str(), fixed(d.mean, 2).c_str(), fixed(d.max, 2).c_str());
      out << line;
    }
  }
  if (scan) {
    if (!scan->no_source.empty()) {
      out << "excluded, no measurable source: " << scan->no_source.size() << "\n";
      for (const auto& p : scan->no_source) out << "  " << p.entry << "\n";
    }
    if (!scan->failed.empty()) {
      out << "failed: " << scan->failed.size() << "\n";
      for (const auto& p : scan->failed) out << "  " << p.entry << ": " << p.reason << "\n";
    }
  }
  return out.str();
}

void write_results(std::ostream& out, const std::vector<PackageReport>& reports) {
  for (const auto& r : reports) out << to_json(r).dump() << '\n';
}

std::vector<PackageReport> read_results(std::istream& in) {
  std::vector<PackageReport> out;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (raw.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(report_from_json(json::parse(raw)));
    } catch (const std::exception& e) {
      throw Error(ErrorKind::invalid_argument, "results line " + std::to_string(line) + ": " + e.what());
    }
  }
  return out;
}

std::vector<PackageReport> read_results(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io_failure, "cannot read " + path.string());
  return read_results(in);
}

Metric parse_metric(const std::string& text) {
  if (text == "vulnerabilities") return Metric::vulnerabilities;
  if (text == "loc") return Metric::loc;
  if (text == "cyclomatic") return Metric::cyclomatic;
  if (text == "functions") return Metric::functions;
  if (text == "dependencies") return Metric::dependencies;
  if (text == "avg_cyclomatic") return Metric::avg_cyclomatic;
  throw Error(ErrorKind::invalid_argument, "unknown metric '" + text + "'");
}

std::optional<double> metric_value(const PackageReport& r, Metric metric) {
  switch (metric) {
    case Metric::vulnerabilities:
      if (!r.vulnerabilities) return std::nullopt;
      return r.vulnerabilities->total;
    case Metric::loc: return r.metrics.loc;
    case Metric::cyclomatic: return r.metrics.cyclomatic;
    case Metric::functions: return r.metrics.functions;
    case Metric::dependencies:
      if (!r.dependency_count) return std::nullopt;
      return static_cast<double>(*r.dependency_count);
    case Metric::avg_cyclomatic: return r.metrics.avg_cyclomatic_per_file;
  }
  return std::nullopt;
}

GroupSplit split_by_label(const std::vector<PackageReport>& reports, Label label, Metric metric) {
  GroupSplit split;
  for (const auto& r : reports) {
    auto v = metric_value(r, metric);
    if (!v) {
      ++split.skipped;
      continue;
    }
    (r.classification.label == label ? split.in_group : split.rest).push_back(*v);
  }
  return split;
}

std::vector<std::pair<std::string, Label>> read_truth(std::istream& in) {
  std::vector<std::pair<std::string, Label>> out;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (trim(raw).empty()) continue;
    auto comma = raw.rfind(',');
    if (comma == std::string::npos) {
      throw Error(ErrorKind::invalid_argument, "truth line " + std::to_string(line) + ": expected package,label");
    }
    std::string name = trim(raw.substr(0, comma));
    std::string label = trim(raw.substr(comma + 1));
    if (line == 1 && name == "package" && label == "label") continue;
    try {
      out.emplace_back(name, parse_label(label));
    } catch (const Error& e) {
      throw Error(ErrorKind::invalid_argument, "truth line " + std::to_string(line) + ": " + e.what());
    }
  }
  return out;
}

std::vector<std::pair<std::string, Label>> read_truth(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io_failure, "cannot read " + path.string());
  return read_truth(in);
}

stats::EvalReport evaluate_results(const std::vector<PackageReport>& reports,
                                   const std::vector<std::pair<std::string, Label>>& truth) {
  std::map<std::string, Label> predicted;
  for (const auto& r : reports) predicted.emplace(r.name, r.classification.label);
  std::vector<std::pair<Label, Label>> pairs;
  std::vector<std::string> missing;
  for (const auto& [name, label] : truth) {
    auto it = predicted.find(name);
    if (it == predicted.end()) missing.push_back(name);
    else pairs.emplace_back(label, it->second);
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw Error(ErrorKind::missing_package, "not in results: " + list);
  }
  return stats::evaluate(pairs);
}

std::string render_evaluation(const stats::EvalReport& r) {
  std::ostringstream out;
  char line[160];
  out << "confusion matrix (rows = truth, columns = predicted):\n";
  std::snprintf(line, sizeof line, "  %-10s %8s %8s %10s\n", "", "normal", "trivial", "data-only");
  out << line;
  for (std::size_t t = 0; t < 3; ++t) {
    std::snprintf(line, sizeof line, "  %-10s %8d %8d %10d\n", std::string(to_string(stats::kEvalOrder[t])).c_str(),
                  r.confusion[t][0], r.confusion[t][1], r.confusion[t][2]);
    out << line;
  }
  out << "accuracy:    " << fixed(r.accuracy, 4) << "\n";
  std::snprintf(line, sizeof line, "  %-10s %9s %9s %9s %8s\n", "class", "precision", "recall", "f1", "support");
  out << line;
  for (std::size_t c = 0; c < 3; ++c) {
    const auto& s = r.per_class[c];
    std::snprintf(line, sizeof line, "  %-10s %9.4f %9.4f %9.4f %8d\n",
                  std::string(to_string(stats::kEvalOrder[c])).c_str(), s.precision, s.recall, s.f1, s.support);
    out << line;
  }
  out << "macro F1:    " << fixed(r.macro_f1, 4) << "\n";
  out << "weighted F1: " << fixed(r.weighted_f1, 4) << "\n";
  for (const auto& w : r.warnings) out << "warning: " << w << "\n";
  return out.str();
}

json to_json(const stats::EvalReport& r) {
  json per_class = json::object();
  for (std::size_t c = 0; c < 3; ++c) {
    const auto& s = r.per_class[c];
    per_class[std::string(to_string(stats::kEvalOrder[c]))] = {
        {"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}, {"support", s.support}};
  }
  json confusion = json::array();
  for (const auto& row : r.confusion) confusion.push_back(row);
  return {{"labels", {"normal", "trivial", "data-only"}},
          {"confusion", confusion},
          {"total", r.total},
          {"accuracy", r.accuracy},
          {"per_class", per_class},
          {"macro_f1", r.macro_f1},
          {"weighted_f1", r.weighted_f1},
          {"warnings", r.warnings}};
}

}  // namespace trivscan::corpus

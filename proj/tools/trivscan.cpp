// trivscan: classify npm packages as normal, trivial or data-only.

#include <unistd.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "trivscan/advisories.hpp"
#include "trivscan/corpus.hpp"
#include "trivscan/depgraph.hpp"
#include "trivscan/error.hpp"
#include "trivscan/report.hpp"
#include "trivscan/stats.hpp"

namespace {

using namespace trivscan;
using nlohmann::json;

struct GlobalFlags {
  bool json = false;
  bool no_color = false;
  std::string thresholds;
  std::string registry;
  std::string advisories;
  std::uint64_t seed = 0;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  int depth = 5;
  std::string count_by = "name-version";
  std::vector<std::string> exclude_dirs;
  bool no_default_excludes = false;
  bool builtins_internal = false;
  bool no_nullish = false;
  bool no_continuity = false;
};

struct Loaded {
  AnalyzeOptions options;
  std::unique_ptr<deps::RegistryIndex> registry;
  std::unique_ptr<audit::AdvisoryDatabase> advisories;
};

void warn(const std::string& message) { std::cerr << "warning: " << message << "\n"; }

Loaded load_options(const GlobalFlags& g) {
  Loaded l;
  if (!g.thresholds.empty()) l.options.thresholds = load_thresholds(g.thresholds);
  if (g.no_default_excludes) l.options.filter.excluded_dirs.clear();
  for (const auto& d : g.exclude_dirs) l.options.filter.excluded_dirs.insert(d);
  l.options.metrics.builtins_external = !g.builtins_internal;
  l.options.metrics.count_nullish = !g.no_nullish;
  if (g.count_by == "name") l.options.count_by = deps::CountBy::name;
  else if (g.count_by == "name-version") l.options.count_by = deps::CountBy::name_version;
  else throw Error(ErrorKind::invalid_argument, "--count-by must be name or name-version");
  if (!g.registry.empty()) {
    std::vector<std::string> warnings;
    l.registry = std::make_unique<deps::RegistryIndex>(deps::RegistryIndex::load(g.registry, &warnings));
    for (const auto& w : warnings) warn(w);
    l.options.registry = l.registry.get();
  }
  if (!g.advisories.empty()) {
    l.advisories = std::make_unique<audit::AdvisoryDatabase>(audit::AdvisoryDatabase::load(g.advisories));
    l.options.advisories = l.advisories.get();
  }
  return l;
}

bool use_color(const GlobalFlags& g) {
  return !g.no_color && !g.json && std::getenv("NO_COLOR") == nullptr && ::isatty(STDOUT_FILENO);
}

int run_analyze(const GlobalFlags& g, const std::string& path) {
  Loaded l = load_options(g);
  PackageReport report = analyze_package(path, l.options);
  for (const auto& w : report.warnings) warn(w);
  if (g.json) {
    json doc = to_json(report);
    if (report.graph) {
      json edges = json::array();
      for (const auto& [from, to] : report.graph->edges) edges.push_back({from.to_string(), to.to_string()});
      doc["dependency_edges"] = edges;
    }
    std::cout << doc.dump(2) << "\n";
  } else {
    std::cout << render_text(report, RenderOptions{use_color(g), g.depth, false});
  }
  return 0;
}

int run_scan(const GlobalFlags& g, const std::string& root, const std::string& out_path) {
  Loaded l = load_options(g);
  auto result = corpus::scan_corpus(root, l.options, g.jobs);
  {
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::io_failure, "cannot write " + out_path);
    corpus::write_results(out, result.reports);
  }
  const auto summary = corpus::summarize(result.reports);
  if (g.json) {
    json doc = corpus::to_json(summary);
    json no_source = json::array(), failed = json::array();
    for (const auto& p : result.no_source) no_source.push_back({{"entry", p.entry}, {"reason", p.reason}});
    for (const auto& p : result.failed) failed.push_back({{"entry", p.entry}, {"reason", p.reason}});
    doc["no_measurable_source"] = no_source;
    doc["failed"] = failed;
    doc["results"] = out_path;
    std::cout << doc.dump(2) << "\n";
  } else {
    std::cout << corpus::render_summary(summary, &result);
    std::cout << "results written to " << out_path << "\n";
  }
  return 0;
}

int run_stats(const GlobalFlags& g, const std::string& results, const std::string& group, const std::string& metric,
              std::size_t bootstrap, double alpha, const std::string& scheme) {
  const auto reports = corpus::read_results(results);
  const Label label = parse_label(group);
  const auto split = corpus::split_by_label(reports, label, corpus::parse_metric(metric));
  if (split.skipped) warn(std::to_string(split.skipped) + " packages lack '" + metric + "' and were skipped");
  if (split.in_group.empty() || split.rest.empty()) {
    throw Error(ErrorKind::invalid_argument, "both groups need at least one package with '" + metric + "'");
  }
  stats::MannWhitneyOptions mw;
  mw.continuity_correction = !g.no_continuity;
  const auto cmp = stats::compare_groups(split.in_group, split.rest, mw);
  if (cmp.degenerate) warn("DegenerateSample: every value is identical; p is defined as 1.0");

  std::optional<stats::BootstrapResult> boot;
  if (bootstrap > 0) {
    stats::BootstrapOptions opts;
    opts.iterations = bootstrap;
    opts.alpha = alpha;
    opts.seed = g.seed;
    opts.threads = g.jobs;
    opts.test = mw;
    if (scheme == "resample-both") opts.scheme = stats::BootstrapScheme::resample_both;
    else if (scheme != "size-matched") throw Error(ErrorKind::invalid_argument, "--scheme must be size-matched or resample-both");
    const bool group_smaller = split.in_group.size() <= split.rest.size();
    boot = stats::bootstrap_significance(group_smaller ? split.in_group : split.rest,
                                         group_smaller ? split.rest : split.in_group, opts);
  }

  const std::string name = std::string(to_string(label));
  if (g.json) {
    json doc = {{"group", name},
                {"metric", metric},
                {"n1", cmp.n1},
                {"n2", cmp.n2},
                {"u", cmp.u},
                {"p", cmp.p},
                {"p_method", cmp.method == stats::PValueMethod::exact ? "exact" : "normal"},
                {"cliffs_delta", cmp.delta},
                {"magnitude", std::string(stats::to_string(cmp.magnitude))},
                {"degenerate", cmp.degenerate}};
    if (boot) {
      doc["bootstrap"] = {{"iterations", boot->iterations},
                          {"alpha", boot->alpha},
                          {"seed", boot->seed},
                          {"significant", boot->significant},
                          {"significant_fraction", boot->significant_fraction}};
    }
    std::cout << doc.dump(2) << "\n";
    return 0;
  }
  std::cout << metric << ": " << name << " (n=" << cmp.n1 << ") vs non-" << name << " (n=" << cmp.n2 << ")\n";
  std::cout << "  Mann-Whitney U = " << cmp.u << ", p = " << cmp.p
            << (cmp.method == stats::PValueMethod::exact ? " (exact)" : " (normal approximation)") << "\n";
  std::cout << "  Cliff's delta  = " << cmp.delta << " (" << stats::to_string(cmp.magnitude) << ")\n";
  if (boot) {
    std::cout << "  bootstrap: " << boot->significant << "/" << boot->iterations << " resamples with p < "
              << boot->alpha << " (" << 100.0 * boot->significant_fraction << "%), seed " << boot->seed << "\n";
  }
  return 0;
}

int run_evaluate(const GlobalFlags& g, const std::string& results, const std::string& truth) {
  const auto report = corpus::evaluate_results(corpus::read_results(results), corpus::read_truth(truth));
  for (const auto& w : report.warnings) warn(w);
  if (g.json) std::cout << corpus::to_json(report).dump(2) << "\n";
  else std::cout << corpus::render_evaluation(report);
  return 0;
}

int run_sample(const GlobalFlags& g, std::optional<std::uint64_t> population, double confidence, double margin,
               double proportion) {
  const auto n = stats::cochran_sample_size(population, confidence, margin, proportion);
  if (g.json) {
    std::cout << json{{"population", population ? json(*population) : json(nullptr)},
                      {"confidence", confidence},
                      {"margin", margin},
                      {"proportion", proportion},
                      {"sample_size", n}}
                     .dump(2)
              << "\n";
  } else {
    std::cout << n << "\n";
  }
  return 0;
}

int run_convert(const std::string& input, const std::string& output) {
  std::ifstream in(input, std::ios::binary);
  if (!in) throw Error(ErrorKind::io_failure, "cannot read " + input);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::vector<std::string> warnings;
  const std::string lines = audit::convert_audit_report(text, &warnings);
  for (const auto& w : warnings) warn(w);
  if (output.empty() || output == "-") {
    std::cout << lines;
  } else {
    std::ofstream out(output, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::io_failure, "cannot write " + output);
    out << lines;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Classify npm packages as normal, trivial or data-only"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags g;
  app.add_flag("--json", g.json, "Machine-readable output");
  app.add_flag("--no-color", g.no_color, "Disable ANSI colors");
  app.add_option("--thresholds", g.thresholds, "Threshold overrides (JSON or TOML)");
  app.add_option("--registry", g.registry, "Offline registry metadata directory");
  app.add_option("--advisories", g.advisories, "Advisory database (JSON lines)");
  app.add_option("--seed", g.seed, "Seed for randomized procedures");
  app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--depth", g.depth, "Dependency tree depth limit")->check(CLI::NonNegativeNumber);
  app.add_option("--count-by", g.count_by, "Dependency counting: name or name-version");
  app.add_option("--exclude-dir", g.exclude_dirs, "Additional directory name to exclude (repeatable)");
  app.add_flag("--no-default-excludes", g.no_default_excludes, "Drop the built-in excluded directory list");
  app.add_flag("--builtins-internal", g.builtins_internal, "Do not count Node builtin imports as external");
  app.add_flag("--no-nullish", g.no_nullish, "Do not count ?? as a decision point");
  app.add_flag("--no-continuity", g.no_continuity, "Disable the Mann-Whitney continuity correction");

  std::string path;
  auto* analyze = app.add_subcommand("analyze", "Analyze one package directory or tarball");
  analyze->add_option("path", path)->required();

  std::string corpus_root, out_path = "results.jsonl";
  auto* scan = app.add_subcommand("scan", "Analyze every package under a directory");
  scan->add_option("root", corpus_root)->required();
  scan->add_option("-o,--out", out_path, "Results file (JSON lines)");

  std::string results, group = "trivial", metric = "vulnerabilities", scheme = "size-matched";
  std::size_t bootstrap = 0;
  double alpha = 0.05;
  auto* stats_cmd = app.add_subcommand("stats", "Compare a label group against the rest");
  stats_cmd->add_option("results", results)->required();
  stats_cmd->add_option("--group", group, "trivial, data-only or normal");
  stats_cmd->add_option("--metric", metric,
                        "vulnerabilities, loc, cyclomatic, functions, dependencies or avg_cyclomatic");
  stats_cmd->add_option("--bootstrap", bootstrap, "Bootstrap iterations (0 disables)");
  stats_cmd->add_option("--alpha", alpha, "Significance level");
  stats_cmd->add_option("--scheme", scheme, "size-matched or resample-both");

  std::string truth;
  auto* evaluate = app.add_subcommand("evaluate", "Score results against ground-truth labels");
  evaluate->add_option("results", results)->required();
  evaluate->add_option("truth", truth)->required();

  std::optional<std::uint64_t> population;
  double confidence = 0.90, margin = 0.05, proportion = 0.5;
  auto* sample = app.add_subcommand("sample", "Cochran sample size");
  sample->add_option("--population", population, "Population size (omit for infinite)");
  sample->add_option("--confidence", confidence, "0.90, 0.95 or 0.99");
  sample->add_option("--margin", margin, "Margin of error");
  sample->add_option("--proportion", proportion, "Expected proportion");

  std::string audit_input, audit_output;
  auto* convert = app.add_subcommand("convert-advisories", "Convert npm audit JSON into advisory JSON lines");
  convert->add_option("input", audit_input)->required();
  convert->add_option("-o,--out", audit_output, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*analyze) return run_analyze(g, path);
    if (*scan) return run_scan(g, corpus_root, out_path);
    if (*stats_cmd) return run_stats(g, results, group, metric, bootstrap, alpha, scheme);
    if (*evaluate) return run_evaluate(g, results, truth);
    if (*sample) return run_sample(g, population, confidence, margin, proportion);
    if (*convert) return run_convert(audit_input, audit_output);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  }
  return 2;
}

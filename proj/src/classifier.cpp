#include "trivscan/classifier.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <sstream>

#include <json.hpp>

#include "trivscan/error.hpp"

namespace trivscan {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view key, std::string_view value) {
  std::string text(trim(value));
  char* end = nullptr;
  double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size()) {
    throw Error(ErrorKind::invalid_thresholds, "value for '" + std::string(key) + "' is not a number");
  }
  return v;
}

int as_int(std::string_view key, double v) {
  if (v != static_cast<int>(v)) {
    throw Error(ErrorKind::invalid_thresholds, "'" + std::string(key) + "' must be an integer");
  }
  return static_cast<int>(v);
}

void assign(Thresholds& t, std::string_view key, double v) {
  if (key == "trivial_loc_max") t.trivial_loc_max = as_int(key, v);
  else if (key == "trivial_cc_max") t.trivial_cc_max = as_int(key, v);
  else if (key == "data_only_avg_cc_max") t.data_only_avg_cc_max = v;
  else throw Error(ErrorKind::invalid_thresholds, "unknown key '" + std::string(key) + "'");
}

bool get(const std::vector<RuleCheck>& trace, std::string_view rule) {
  auto it = std::find_if(trace.begin(), trace.end(), [&](const RuleCheck& c) { return c.rule == rule; });
  return it != trace.end() && it->satisfied;
}

}  // namespace

void Thresholds::validate() const {
  if (trivial_loc_max <= 0 || trivial_cc_max <= 0 || !(data_only_avg_cc_max > 0.0)) {
    throw Error(ErrorKind::invalid_thresholds, "thresholds must be strictly positive");
  }
}

Thresholds parse_thresholds(std::string_view text) {
  Thresholds t;
  std::string_view body = trim(text);
  if (!body.empty() && body.front() == '{') {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorKind::invalid_thresholds, e.what());
    }
    if (doc.contains("thresholds") && doc["thresholds"].is_object()) doc = doc["thresholds"];
    for (const auto& [key, value] : doc.items()) {
      if (!value.is_number()) throw Error(ErrorKind::invalid_thresholds, "'" + key + "' must be a number");
      assign(t, key, value.get<double>());
    }
  } else {
    std::istringstream in{std::string(body)};
    std::string raw;
    while (std::getline(in, raw)) {
      std::string_view line = trim(std::string_view(raw).substr(0, raw.find('#')));
      if (line.empty() || line == "[thresholds]") continue;
      auto eq = line.find('=');
      if (eq == std::string_view::npos) throw Error(ErrorKind::invalid_thresholds, "expected key = value: " + raw);
      auto key = trim(line.substr(0, eq));
      assign(t, key, parse_number(key, line.substr(eq + 1)));
    }
  }
  t.validate();
  return t;
}

Thresholds load_thresholds(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io_failure, "cannot read " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_thresholds(text);
}

std::string_view to_string(Label label) {
  switch (label) {
    case Label::data_only: return "data-only";
    case Label::trivial: return "trivial";
    case Label::normal: return "normal";
  }
  return "normal";
}

Label parse_label(std::string_view text) {
  std::string s(trim(text));
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (s == "data-only" || s == "data_only") return Label::data_only;
  if (s == "trivial") return Label::trivial;
  if (s == "normal") return Label::normal;
  throw Error(ErrorKind::invalid_argument, "unknown label '" + std::string(text) + "'");
}

Classification classify(const metrics::PackageMetrics& m, const Thresholds& t) {
  Classification c;
  c.trace = {
      {std::string(kRuleFunctions), double(m.functions), 0.0, m.functions == 0},
      {std::string(kRuleAvgCyclomatic), m.avg_cyclomatic_per_file, t.data_only_avg_cc_max,
       m.avg_cyclomatic_per_file <= t.data_only_avg_cc_max},
      {std::string(kRuleExternalImports), double(m.external_imports), 0.0, m.external_imports == 0},
      {std::string(kRuleTrivialLoc), double(m.loc), double(t.trivial_loc_max), m.loc <= t.trivial_loc_max},
      {std::string(kRuleTrivialCyclomatic), double(m.cyclomatic), double(t.trivial_cc_max),
       m.cyclomatic <= t.trivial_cc_max},
  };
  c.label = label_from_trace(c.trace);
  return c;
}

Label label_from_trace(const std::vector<RuleCheck>& trace) {
  if (get(trace, kRuleFunctions) && get(trace, kRuleAvgCyclomatic) && get(trace, kRuleExternalImports)) {
    return Label::data_only;
  }
  if (get(trace, kRuleTrivialLoc) && get(trace, kRuleTrivialCyclomatic)) return Label::trivial;
  return Label::normal;
}

}  // namespace trivscan

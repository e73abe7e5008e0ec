#include "trivscan/advisories.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "trivscan/error.hpp"

namespace trivscan::audit {

using nlohmann::json;

namespace {

const std::vector<Advisory> kNoAdvisories;

std::string string_field(const json& obj, const char* key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string() || it->get<std::string>().empty()) {
    throw Error(ErrorKind::malformed_advisory, "line " + std::to_string(line) + ": missing \"" + key + "\"");
  }
  return it->get<std::string>();
}

std::string id_string(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  return {};
}

// GHSA ids live at the tail of advisory URLs in audit output.
std::string id_from_url(const std::string& url) {
  auto slash = url.rfind('/');
  return slash == std::string::npos ? url : url.substr(slash + 1);
}

}  // namespace

std::string_view to_string(Severity s) {
  switch (s) {
    case Severity::low: return "low";
    case Severity::moderate: return "moderate";
    case Severity::high: return "high";
    case Severity::critical: return "critical";
  }
  return "low";
}

Severity parse_severity(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  for (auto s : kSeverities) {
    if (to_string(s) == lower) return s;
  }
  throw Error(ErrorKind::malformed_advisory, "unknown severity '" + std::string(text) + "'");
}

void AdvisoryDatabase::add(Advisory advisory) {
  if (!ids_.emplace(advisory.id, advisory.package).second) {
    throw Error(ErrorKind::malformed_advisory, "duplicate advisory id '" + advisory.id + "'");
  }
  by_package_[advisory.package].push_back(std::move(advisory));
}

const std::vector<Advisory>& AdvisoryDatabase::for_package(const std::string& name) const {
  auto it = by_package_.find(name);
  return it == by_package_.end() ? kNoAdvisories : it->second;
}

AdvisoryDatabase AdvisoryDatabase::parse(std::istream& in) {
  AdvisoryDatabase db;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (raw.find_first_not_of(" \t\r") == std::string::npos) continue;
    json doc;
    try {
      doc = json::parse(raw);
    } catch (const json::parse_error& e) {
      throw Error(ErrorKind::malformed_advisory, "line " + std::to_string(line) + ": " + e.what());
    }
    if (!doc.is_object()) throw Error(ErrorKind::malformed_advisory, "line " + std::to_string(line) + ": not an object");
    Advisory a;
    a.id = string_field(doc, "id", line);
    a.package = string_field(doc, "name", line);
    try {
      a.range = semver::Range::parse(string_field(doc, "range", line));
      a.severity = parse_severity(string_field(doc, "severity", line));
      db.add(std::move(a));
    } catch (const Error& e) {
      throw Error(ErrorKind::malformed_advisory, "line " + std::to_string(line) + ": " + e.what());
    }
  }
  return db;
}

AdvisoryDatabase AdvisoryDatabase::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io_failure, "cannot read " + path.string());
  return parse(in);
}

VulnerabilityReport audit(const deps::DependencyGraph& graph, const AdvisoryDatabase& db) {
  VulnerabilityReport report;
  for (const auto& node : graph.nodes) {
    const auto& candidates = db.for_package(node.name);
    if (candidates.empty()) continue;
    semver::Version v;
    if (!semver::try_parse_version(node.version, v)) continue;
    for (const auto& a : candidates) {
      if (!a.range.matches(v)) continue;
      report.matches.push_back({a.id, node});
      ++report.by_severity[a.severity];
      ++report.total;
    }
  }
  return report;
}

std::string convert_audit_report(std::string_view audit_json, std::vector<std::string>* warnings) {
  json doc;
  try {
    doc = json::parse(audit_json);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::malformed_advisory, std::string("audit report: ") + e.what());
  }
  std::ostringstream out;
  std::set<std::string> seen;
  auto write = [&](std::string id, std::string name, std::string range, std::string severity) {
    if (id.empty() || name.empty() || range.empty()) {
      if (warnings) warnings->push_back("skipped incomplete advisory for '" + name + "'");
      return;
    }
    if (severity == "info") {
      if (warnings) warnings->push_back("skipped informational advisory " + id);
      return;
    }
    severity = std::string(to_string(parse_severity(severity)));
    if (!seen.insert(id).second) return;
    out << json{{"id", id}, {"name", name}, {"range", range}, {"severity", severity}}.dump() << '\n';
  };

  const bool v1 = doc.is_object() && doc.contains("advisories") && doc["advisories"].is_object();
  const bool v2 = doc.is_object() && doc.contains("vulnerabilities") && doc["vulnerabilities"].is_object();
  if (!v1 && !v2) throw Error(ErrorKind::malformed_advisory, "audit report has neither 'advisories' nor 'vulnerabilities'");
  if (v1) {
    for (const auto& [key, adv] : doc["advisories"].items()) {
      std::string id = adv.contains("id") ? id_string(adv["id"]) : key;
      write(id, adv.value("module_name", ""), adv.value("vulnerable_versions", ""), adv.value("severity", ""));
    }
  }
  if (v2) {
    for (const auto& [name, vuln] : doc["vulnerabilities"].items()) {
      if (!vuln.contains("via") || !vuln["via"].is_array()) continue;
      for (const auto& via : vuln["via"]) {
        if (!via.is_object()) continue;  // a string names another vulnerable package
        std::string id = via.contains("url") && via["url"].is_string() ? id_from_url(via["url"].get<std::string>())
                                                                       : id_string(via.value("source", json()));
        write(id, via.value("name", name), via.value("range", ""), via.value("severity", ""));
      }
    }
  }
  return out.str();
}

}  // namespace trivscan::audit

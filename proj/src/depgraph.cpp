#include "trivscan/depgraph.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <iterator>
#include <optional>

#include <json.hpp>

#include "trivscan/error.hpp"

namespace trivscan::deps {

namespace fs = std::filesystem;

namespace {

std::string name_from_path(const fs::path& relative) {
  std::string s = relative.generic_string();
  s = s.substr(0, s.size() - std::string(".json").size());
  for (std::string enc : {"%2f", "%2F"}) {
    for (auto pos = s.find(enc); pos != std::string::npos; pos = s.find(enc)) s.replace(pos, 3, "/");
  }
  return s;
}

// Dist-tags and the empty range mean "any version" in manifests.
std::optional<semver::Range> parse_dependency_range(const std::string& text, std::string& reason) {
  if (text.empty() || text == "latest" || text == "*") return semver::Range::parse("*");
  try {
    return semver::Range::parse(text);
  } catch (const Error& e) {
    reason = e.what();
    return std::nullopt;
  }
}

}  // namespace

RegistryIndex RegistryIndex::load(const fs::path& dir, std::vector<std::string>* warnings) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw Error(ErrorKind::io_failure, "registry directory " + dir.string() + " not found");
  RegistryIndex index;
  std::vector<fs::path> files;
  for (auto it = fs::recursive_directory_iterator(dir, ec); !ec && it != fs::recursive_directory_iterator();
       it.increment(ec)) {
    if (it->is_regular_file() && it->path().extension() == ".json") files.push_back(it->path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& path : files) {
    std::ifstream in(path, std::ios::binary);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorKind::malformed_registry, path.string() + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("versions") || !doc["versions"].is_object()) {
      throw Error(ErrorKind::malformed_registry, path.string() + ": missing \"versions\" object");
    }
    std::string name = doc.contains("name") && doc["name"].is_string() ? doc["name"].get<std::string>()
                                                                          : name_from_path(path.lexically_relative(dir));
    for (const auto& [version, meta] : doc["versions"].items()) {
      std::map<std::string, std::string> dependencies;
      if (meta.is_object() && meta.contains("dependencies") && meta["dependencies"].is_object()) {
        for (const auto& [dep, range] : meta["dependencies"].items()) {
          if (range.is_string()) dependencies.emplace(dep, range.get<std::string>());
        }
      }
      try {
        index.add(name, version, std::move(dependencies));
      } catch (const Error& e) {
        if (warnings) warnings->push_back(name + ": skipped version '" + version + "' (" + e.what() + ")");
      }
    }
  }
  return index;
}

void RegistryIndex::add(const std::string& name, const std::string& version,
                        std::map<std::string, std::string> dependencies) {
  RegistryEntry entry{semver::parse_version(version), version, std::move(dependencies)};
  auto& list = packages_[name];
  auto pos = std::lower_bound(list.begin(), list.end(), entry.version,
                              [](const RegistryEntry& e, const semver::Version& v) { return e.version < v; });
  if (pos != list.end() && pos->version == entry.version) {
    *pos = std::move(entry);
  } else {
    list.insert(pos, std::move(entry));
  }
}

const std::vector<RegistryEntry>* RegistryIndex::versions(const std::string& name) const {
  auto it = packages_.find(name);
  return it == packages_.end() ? nullptr : &it->second;
}

const RegistryEntry* RegistryIndex::find(const std::string& name, const std::string& version) const {
  const auto* list = versions(name);
  semver::Version v;
  if (!list || !semver::try_parse_version(version, v)) return nullptr;
  auto it = std::find_if(list->begin(), list->end(), [&](const RegistryEntry& e) { return e.version == v; });
  return it == list->end() ? nullptr : &*it;
}

const RegistryEntry* RegistryIndex::highest_match(const std::string& name, const semver::Range& range) const {
  const auto* list = versions(name);
  if (!list) return nullptr;
  for (auto it = list->rbegin(); it != list->rend(); ++it) {
    if (range.matches(it->version)) return &*it;
  }
  return nullptr;
}

std::vector<NodeId> DependencyGraph::children(const NodeId& node) const {
  std::vector<NodeId> out;
  for (auto it = edges.lower_bound({node, NodeId{}}); it != edges.end() && it->first == node; ++it) {
    out.push_back(it->second);
  }
  return out;
}

DependencyGraph resolve_closure(const NodeId& root, const std::map<std::string, std::string>& root_dependencies,
                                const RegistryIndex& index) {
  DependencyGraph g;
  g.root = root;
  g.nodes.insert(root);
  std::deque<std::pair<NodeId, const std::map<std::string, std::string>*>> queue{{root, &root_dependencies}};
  while (!queue.empty()) {
    auto [node, dependencies] = queue.front();
    queue.pop_front();
    for (const auto& [name, range_text] : *dependencies) {
      std::string reason;
      auto range = parse_dependency_range(range_text, reason);
      if (!range) {
        g.unresolved.push_back({node, name, range_text, reason});
        continue;
      }
      const RegistryEntry* hit = index.highest_match(name, *range);
      if (!hit) {
        g.unresolved.push_back({node, name, range_text,
                                index.versions(name) ? "no version matches" : "package not in registry"});
        continue;
      }
      NodeId child{name, hit->version_text};
      g.edges.insert({node, child});
      if (g.nodes.insert(child).second) queue.emplace_back(child, &hit->dependencies);
    }
  }
  return g;
}

DependencyGraph resolve_closure(const PackageSource& root, const RegistryIndex& index) {
  return resolve_closure(NodeId{root.name(), root.manifest().version_text}, root.manifest().dependencies, index);
}

DependencyGraph resolve_closure(const std::string& name, const std::string& version, const RegistryIndex& index) {
  const RegistryEntry* entry = index.find(name, version);
  if (!entry) throw Error(ErrorKind::missing_package, name + "@" + version + " is not in the registry");
  return resolve_closure(NodeId{name, entry->version_text}, entry->dependencies, index);
}

std::size_t transitive_count(const DependencyGraph& graph, CountBy mode) {
  if (mode == CountBy::name_version) return graph.nodes.size() - 1;
  std::set<std::string> names;
  for (const auto& n : graph.nodes) names.insert(n.name);
  names.erase(graph.root.name);
  return names.size();
}

}  // namespace trivscan::deps

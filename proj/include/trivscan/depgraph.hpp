#pragma once

#include <compare>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "trivscan/ingest.hpp"
#include "trivscan/semver.hpp"

namespace trivscan::deps {

struct NodeId {
  std::string name;
  std::string version;

  friend auto operator<=>(const NodeId&, const NodeId&) = default;
  std::string to_string() const { return name + "@" + version; }
};

struct RegistryEntry {
  semver::Version version;
  std::string version_text;
  std::map<std::string, std::string> dependencies;
};

/// Offline registry metadata: one `<name>.json` per package holding
/// `{"versions": {"<v>": {"dependencies": {...}}}}`. Scoped packages may
/// live in `@scope/<name>.json` or `@scope%2f<name>.json`.
class RegistryIndex {
 public:
  /// Throws Error(malformed_registry) on unreadable JSON; bad version keys
  /// are skipped and reported through `warnings`.
  static RegistryIndex load(const std::filesystem::path& dir, std::vector<std::string>* warnings = nullptr);

  /// Inserts or replaces one version. Throws Error(malformed_version).
  void add(const std::string& name, const std::string& version, std::map<std::string, std::string> dependencies = {});

  /// Versions sorted ascending, or nullptr when the package is unknown.
  const std::vector<RegistryEntry>* versions(const std::string& name) const;
  const RegistryEntry* find(const std::string& name, const std::string& version) const;
  const RegistryEntry* highest_match(const std::string& name, const semver::Range& range) const;

  std::size_t package_count() const { return packages_.size(); }

 private:
  std::map<std::string, std::vector<RegistryEntry>> packages_;
};

struct Unresolved {
  NodeId dependent;
  std::string name;
  std::string range;
  std::string reason;
};

struct DependencyGraph {
  NodeId root;
  std::set<NodeId> nodes;
  std::set<std::pair<NodeId, NodeId>> edges;
  std::vector<Unresolved> unresolved;

  std::vector<NodeId> children(const NodeId& node) const;
};

/// Breadth-first closure over runtime dependencies; every range resolves
/// to the highest matching version in the index. Never throws for missing
/// packages or bad ranges; those land in `unresolved`.
DependencyGraph resolve_closure(const NodeId& root, const std::map<std::string, std::string>& root_dependencies,
                                const RegistryIndex& index);
DependencyGraph resolve_closure(const PackageSource& root, const RegistryIndex& index);

/// Roots the closure at a package version already present in the index.
DependencyGraph resolve_closure(const std::string& name, const std::string& version, const RegistryIndex& index);

enum class CountBy { name, name_version };

/// Unique packages reachable from the root, excluding the root itself.
std::size_t transitive_count(const DependencyGraph& graph, CountBy mode = CountBy::name_version);

}  // namespace trivscan::deps

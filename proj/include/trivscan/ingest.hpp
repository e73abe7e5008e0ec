#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "trivscan/semver.hpp"

namespace trivscan {

struct Manifest {
  std::string name;
  semver::Version version;
  std::string version_text;
  /// Runtime `dependencies` only; module specifier -> range text.
  std::map<std::string, std::string> dependencies;
  std::optional<std::string> entry_point;
};

/// Parses `package.json` text. Throws Error(malformed_manifest).
/// Dependency keys that are not bare specifiers are dropped into `warnings`.
Manifest parse_manifest(std::string_view json_text, std::vector<std::string>* warnings = nullptr);

enum class FileKind { script, other };

struct SourceFile {
  std::string relative_path;
  std::string content;
  FileKind kind = FileKind::other;
};

/// A package materialized on disk, either a directory or an unpacked tarball.
class PackageSource {
 public:
  const std::string& name() const { return manifest_.name; }
  const semver::Version& version() const { return manifest_.version; }
  const Manifest& manifest() const { return manifest_; }
  const std::filesystem::path& origin() const { return origin_; }
  bool from_tarball() const { return tarball_; }

  /// Every regular file below the root, relative, '/'-separated, sorted.
  /// Symlinks are never followed; `node_modules` and `.git` are not descended into.
  std::vector<std::string> list_files() const;

  /// Raw bytes of a file returned by list_files(); nullopt when unreadable.
  std::optional<std::string> read_file(const std::string& relative_path) const;

  /// Non-fatal problems seen while loading (skipped archive entries and the like).
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  friend PackageSource load_package(const std::filesystem::path& root);

  Manifest manifest_;
  std::filesystem::path origin_;
  std::filesystem::path root_dir_;                // directory form
  std::map<std::string, std::string> archive_;    // tarball form, path -> bytes
  bool tarball_ = false;
  std::vector<std::string> warnings_;
};

/// Loads a package directory holding `package.json`, or a gzip tarball with
/// a single top-level directory. Throws Error(missing_manifest |
/// malformed_manifest | io_failure).
PackageSource load_package(const std::filesystem::path& root);

struct FilterOptions {
  std::set<std::string> excluded_dirs = default_excluded_dirs();

  static std::set<std::string> default_excluded_dirs();
};

/// Resolves `.` and `..` segments. Returns nullopt if the path is absolute
/// or climbs above the root.
std::optional<std::string> normalize_relative(std::string_view path);

FileKind file_kind(std::string_view relative_path);

/// True when the path survives the measurable-source filter.
bool is_measurable_path(std::string_view relative_path, const FilterOptions& options = {});

/// Script files of the package that survive the exclusion rules, ordered by path.
/// Unreadable or non-UTF-8 files are skipped and reported through `warnings`.
std::vector<SourceFile> filter_files(const PackageSource& pkg, const FilterOptions& options = {},
                                     std::vector<std::string>* warnings = nullptr);

/// Re-applies the rules to an existing list (idempotent on filter_files output).
std::vector<SourceFile> filter_files(const std::vector<SourceFile>& files, const FilterOptions& options = {});

bool has_measurable_source(const std::vector<SourceFile>& files);

bool is_valid_utf8(std::string_view bytes);

}  // namespace trivscan

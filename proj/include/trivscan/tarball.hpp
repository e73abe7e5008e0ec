#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace trivscan::tarball {

struct Archive {
  /// Regular files keyed by their full in-archive path.
  std::map<std::string, std::string> files;
  std::vector<std::string> warnings;
};

/// True if the file starts with the gzip magic or a ustar header.
bool looks_like_tarball(const std::filesystem::path& path);

/// Reads a (optionally gzip-compressed) tar archive into memory. Only
/// regular files are kept; links and devices are reported as warnings.
/// Throws Error(io_failure) on unreadable or truncated input.
Archive read(const std::filesystem::path& path);

}  // namespace trivscan::tarball

#include "trivscan/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <sstream>

#include <json.hpp>

#include "trivscan/error.hpp"
#include "trivscan/lexer.hpp"
#include "trivscan/metrics.hpp"
#include "trivscan/tarball.hpp"

namespace trivscan {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::string_view kManifestName = "package.json";

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

bool is_pruned_dir(std::string_view name) { return name == "node_modules" || name == ".git"; }

std::optional<std::string> read_whole_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) return std::nullopt;
  return data;
}

std::string first_segment(const std::string& path) { return path.substr(0, path.find('/')); }

}  // namespace

Manifest parse_manifest(std::string_view json_text, std::vector<std::string>* warnings) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::malformed_manifest, std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorKind::malformed_manifest, "manifest is not a JSON object");
  Manifest m;
  auto name = doc.find("name");
  if (name == doc.end() || !name->is_string() || name->get<std::string>().empty()) {
    throw Error(ErrorKind::malformed_manifest, "missing \"name\"");
  }
  m.name = name->get<std::string>();
  auto version = doc.find("version");
  if (version == doc.end() || !version->is_string()) {
    throw Error(ErrorKind::malformed_manifest, "missing \"version\"");
  }
  m.version_text = version->get<std::string>();
  if (!semver::try_parse_version(m.version_text, m.version)) {
    throw Error(ErrorKind::malformed_manifest, "version '" + m.version_text + "' is not valid semver");
  }
  if (auto deps = doc.find("dependencies"); deps != doc.end() && deps->is_object()) {
    for (const auto& [spec, range] : deps->items()) {
      if (spec.empty() || spec.front() == '.' || spec.front() == '/') {
        if (warnings) warnings->push_back("ignored non-bare dependency key '" + spec + "'");
        continue;
      }
      if (!range.is_string()) {
        if (warnings) warnings->push_back("ignored dependency '" + spec + "' with non-string range");
        continue;
      }
      m.dependencies.emplace(spec, range.get<std::string>());
    }
  }
  if (auto main = doc.find("main"); main != doc.end() && main->is_string()) {
    m.entry_point = main->get<std::string>();
  }
  return m;
}

std::optional<std::string> normalize_relative(std::string_view path) {
  if (path.empty() || path.front() == '/' || path.find('\\') != std::string_view::npos) return std::nullopt;
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (start <= path.size()) {
    std::size_t slash = path.find('/', start);
    std::string_view seg = path.substr(start, slash == std::string_view::npos ? std::string_view::npos : slash - start);
    if (seg == "..") {
      if (parts.empty()) return std::nullopt;
      parts.pop_back();
    } else if (!seg.empty() && seg != ".") {
      parts.push_back(seg);
    }
    if (slash == std::string_view::npos) break;
    start = slash + 1;
  }
  if (parts.empty()) return std::nullopt;
  std::string out;
  for (auto seg : parts) {
    if (!out.empty()) out += '/';
    out += seg;
  }
  return out;
}

PackageSource load_package(const fs::path& root) {
  std::error_code ec;
  auto status = fs::status(root, ec);
  if (ec || !fs::exists(status)) throw Error(ErrorKind::io_failure, "cannot access " + root.string());

  PackageSource pkg;
  pkg.origin_ = root;
  std::string manifest_text;

  if (fs::is_directory(status)) {
    pkg.root_dir_ = root;
    const fs::path manifest = root / kManifestName;
    if (!fs::is_regular_file(manifest, ec)) {
      throw Error(ErrorKind::missing_manifest, "no package.json in " + root.string());
    }
    auto text = read_whole_file(manifest);
    if (!text) throw Error(ErrorKind::io_failure, "cannot read " + manifest.string());
    manifest_text = std::move(*text);
  } else if (fs::is_regular_file(status) && tarball::looks_like_tarball(root)) {
    auto archive = tarball::read(root);
    pkg.tarball_ = true;
    pkg.warnings_ = std::move(archive.warnings);
    std::set<std::string> tops;
    for (const auto& [name, _] : archive.files) {
      auto norm = normalize_relative(name);
      if (norm) tops.insert(first_segment(*norm));
    }
    // Registry tarballs use `package/`; anything else must be a single directory.
    std::string top = tops.count("package") ? "package" : (tops.size() == 1 ? *tops.begin() : "");
    for (auto& [name, bytes] : archive.files) {
      auto norm = normalize_relative(name);
      if (!norm) {
        pkg.warnings_.push_back("skipped unsafe archive path '" + name + "'");
        continue;
      }
      if (top.empty() || first_segment(*norm) != top || norm->size() == top.size()) continue;
      pkg.archive_.emplace(norm->substr(top.size() + 1), std::move(bytes));
    }
    auto manifest = pkg.archive_.find(std::string(kManifestName));
    if (manifest == pkg.archive_.end()) {
      throw Error(ErrorKind::missing_manifest, "no package.json under a single top-level directory in " + root.string());
    }
    manifest_text = manifest->second;
  } else {
    throw Error(ErrorKind::missing_manifest, root.string() + " is neither a package directory nor a tarball");
  }

  pkg.manifest_ = parse_manifest(manifest_text, &pkg.warnings_);
  return pkg;
}

std::vector<std::string> PackageSource::list_files() const {
  std::vector<std::string> out;
  if (tarball_) {
    out.reserve(archive_.size());
    for (const auto& [name, _] : archive_) out.push_back(name);
    return out;
  }
  std::error_code ec;
  fs::recursive_directory_iterator it(root_dir_, fs::directory_options::skip_permission_denied, ec);
  for (; !ec && it != fs::recursive_directory_iterator(); it.increment(ec)) {
    const auto& entry = *it;
    std::error_code sec;
    if (entry.is_symlink(sec)) {
      if (entry.is_directory(sec)) it.disable_recursion_pending();
      continue;
    }
    if (entry.is_directory(sec)) {
      if (is_pruned_dir(entry.path().filename().string())) it.disable_recursion_pending();
      continue;
    }
    if (!entry.is_regular_file(sec)) continue;
    out.push_back(entry.path().lexically_relative(root_dir_).generic_string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<std::string> PackageSource::read_file(const std::string& relative_path) const {
  auto norm = normalize_relative(relative_path);
  if (!norm) return std::nullopt;
  if (tarball_) {
    auto it = archive_.find(*norm);
    if (it == archive_.end()) return std::nullopt;
    return it->second;
  }
  std::error_code ec;
  const fs::path full = root_dir_ / fs::path(*norm);
  if (fs::is_symlink(fs::symlink_status(full, ec))) return std::nullopt;
  return read_whole_file(full);
}

std::set<std::string> FilterOptions::default_excluded_dirs() {
  return {"test", "tests", "__tests__", "spec", "dist", "build", "out", "coverage", "example", "examples",
          "node_modules"};
}

FileKind file_kind(std::string_view path) {
  std::string_view base = path.substr(path.rfind('/') == std::string_view::npos ? 0 : path.rfind('/') + 1);
  for (std::string_view ext : {".js", ".mjs", ".cjs"}) {
    if (ends_with(base, ext) && base.size() > ext.size()) return FileKind::script;
  }
  return FileKind::other;
}

bool is_measurable_path(std::string_view path, const FilterOptions& options) {
  if (file_kind(path) != FileKind::script) return false;
  std::size_t start = 0;
  while (true) {
    std::size_t slash = path.find('/', start);
    if (slash == std::string_view::npos) break;
    if (options.excluded_dirs.count(std::string(path.substr(start, slash - start)))) return false;
    start = slash + 1;
  }
  std::string_view base = path.substr(start);
  for (std::string_view marker : {".test.", ".spec.", ".min."}) {
    for (std::string_view ext : {"js", "mjs", "cjs"}) {
      std::string suffix = std::string(marker) + std::string(ext);
      if (ends_with(base, suffix)) return false;
    }
  }
  return true;
}

std::vector<SourceFile> filter_files(const PackageSource& pkg, const FilterOptions& options,
                                     std::vector<std::string>* warnings) {
  std::vector<SourceFile> out;
  for (const auto& path : pkg.list_files()) {
    if (!is_measurable_path(path, options)) continue;
    auto bytes = pkg.read_file(path);
    if (!bytes) {
      if (warnings) warnings->push_back("unreadable file skipped: " + path);
      continue;
    }
    if (!is_valid_utf8(*bytes)) {
      if (warnings) warnings->push_back("non-UTF-8 file skipped: " + path);
      continue;
    }
    out.push_back(SourceFile{path, std::move(*bytes), FileKind::script});
  }
  return out;
}

std::vector<SourceFile> filter_files(const std::vector<SourceFile>& files, const FilterOptions& options) {
  std::vector<SourceFile> out;
  for (const auto& f : files) {
    auto norm = normalize_relative(f.relative_path);
    if (!norm || *norm != f.relative_path || !is_measurable_path(f.relative_path, options)) continue;
    SourceFile copy = f;
    copy.kind = FileKind::script;
    out.push_back(std::move(copy));
  }
  std::sort(out.begin(), out.end(),
            [](const SourceFile& a, const SourceFile& b) { return a.relative_path < b.relative_path; });
  return out;
}

bool has_measurable_source(const std::vector<SourceFile>& files) {
  return std::any_of(files.begin(), files.end(), [](const SourceFile& f) {
    return metrics::count_loc(lex::tokenize(f.content).tokens) >= 1;
  });
}

bool is_valid_utf8(std::string_view bytes) {
  std::size_t i = 0;
  while (i < bytes.size()) {
    auto c = static_cast<unsigned char>(bytes[i]);
    std::size_t extra = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      extra = 1;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      extra = 2;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      extra = 3;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + extra >= bytes.size()) return false;
    for (std::size_t k = 1; k <= extra; ++k) {
      auto cc = static_cast<unsigned char>(bytes[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    // Overlong forms, surrogates and out-of-range code points.
    if ((extra == 1 && cp < 0x80) || (extra == 2 && cp < 0x800) || (extra == 3 && cp < 0x10000) ||
        (cp >= 0xD800 && cp <= 0xDFFF) || cp > 0x10FFFF) {
      return false;
    }
    i += extra + 1;
  }
  return true;
}

}  // namespace trivscan

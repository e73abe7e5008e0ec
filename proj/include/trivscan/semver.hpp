#pragma once

// Semantic versions and npm-style range expressions.

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace trivscan::semver {

/// A prerelease identifier is numeric or alphanumeric; numeric ones sort first.
using PrereleaseId = std::variant<std::uint64_t, std::string>;

struct Version {
  std::uint64_t major = 0;
  std::uint64_t minor = 0;
  std::uint64_t patch = 0;
  std::vector<PrereleaseId> prerelease;
  std::string build;  // ignored for precedence

  bool is_prerelease() const { return !prerelease.empty(); }
  bool same_core(const Version& other) const {
    return major == other.major && minor == other.minor && patch == other.patch;
  }
  std::string to_string() const;
};

/// Precedence order; build metadata does not participate.
std::strong_ordering compare(const Version& a, const Version& b);

inline bool operator==(const Version& a, const Version& b) { return compare(a, b) == 0; }
inline std::strong_ordering operator<=>(const Version& a, const Version& b) { return compare(a, b); }

/// Parses MAJOR.MINOR.PATCH[-prerelease][+build]; a leading `v` or `=` is tolerated.
/// Throws Error(malformed_version).
Version parse_version(std::string_view text);
bool try_parse_version(std::string_view text, Version& out);

enum class Op { lt, le, gt, ge, eq };

struct Comparator {
  Op op = Op::ge;
  Version version;

  bool test(const Version& v) const;
};

/// Conjunction of primitive comparators. Empty means "any version".
using ComparatorSet = std::vector<Comparator>;

class Range {
 public:
  /// Parses exact versions, ^, ~, comparison operators, x/X/* wildcards,
  /// partial versions, hyphen ranges and `||` unions. Throws Error(malformed_range).
  static Range parse(std::string_view text);

  bool matches(const Version& v) const;

  const std::vector<ComparatorSet>& sets() const { return sets_; }
  const std::string& source() const { return source_; }

 private:
  std::vector<ComparatorSet> sets_;
  std::string source_;
};

bool matches(const Range& range, const Version& v);

}  // namespace trivscan::semver

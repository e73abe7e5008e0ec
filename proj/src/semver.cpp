#include "trivscan/semver.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <optional>

#include "trivscan/error.hpp"

namespace trivscan::semver {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

bool parse_number(std::string_view s, std::uint64_t& out) {
  if (!all_digits(s) || (s.size() > 1 && s[0] == '0')) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

bool parse_prerelease(std::string_view s, std::vector<PrereleaseId>& out) {
  out.clear();
  if (s.empty()) return false;
  std::size_t start = 0;
  while (true) {
    std::size_t dot = s.find('.', start);
    std::string_view id = s.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start);
    if (id.empty()) return false;
    for (char c : id) {
      if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-') return false;
    }
    std::uint64_t n = 0;
    if (all_digits(id) && !parse_number(id, n)) return false;  // leading zero or overflow
    if (all_digits(id)) {
      out.emplace_back(n);
    } else {
      out.emplace_back(std::string(id));
    }
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return true;
}

// Splits "core-pre+build" into its three parts.
void split_tags(std::string_view text, std::string_view& core, std::string_view& pre, std::string_view& build) {
  std::size_t plus = text.find('+');
  build = plus == std::string_view::npos ? std::string_view{} : text.substr(plus + 1);
  std::string_view rest = text.substr(0, plus);
  std::size_t dash = rest.find('-');
  pre = dash == std::string_view::npos ? std::string_view{} : rest.substr(dash + 1);
  core = rest.substr(0, dash);
}

std::string_view strip_prefix(std::string_view s) {
  s = trim(s);
  while (!s.empty() && (s.front() == 'v' || s.front() == 'V' || s.front() == '=')) {
    s.remove_prefix(1);
    s = trim(s);
  }
  return s;
}

// A version that may omit or wildcard trailing components.
struct Partial {
  std::optional<std::uint64_t> major, minor, patch;
  std::vector<PrereleaseId> prerelease;
};

bool is_wild(std::string_view s) { return s == "x" || s == "X" || s == "*"; }

bool parse_partial(std::string_view text, Partial& out) {
  out = Partial{};
  text = strip_prefix(text);
  if (text.empty()) return true;  // bare operator-less empty means any
  std::string_view core, pre, build;
  split_tags(text, core, pre, build);
  std::optional<std::uint64_t>* slots[] = {&out.major, &out.minor, &out.patch};
  std::size_t start = 0;
  bool wild = false;
  for (int i = 0; i < 3; ++i) {
    std::size_t dot = core.find('.', start);
    std::string_view part = core.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start);
    if (is_wild(part)) {
      wild = true;
    } else {
      std::uint64_t n = 0;
      if (!parse_number(part, n)) return false;
      if (!wild) *slots[i] = n;
    }
    if (dot == std::string_view::npos) {
      if (!pre.empty() || !build.empty()) {
        // Tags only make sense on a complete version.
        if (i != 2 || wild) return false;
      }
      break;
    }
    if (i == 2) return false;  // too many components
    start = dot + 1;
  }
  if (!pre.empty() && !parse_prerelease(pre, out.prerelease)) return false;
  return true;
}

Version make(std::uint64_t major, std::uint64_t minor, std::uint64_t patch, std::vector<PrereleaseId> pre = {}) {
  Version v;
  v.major = major;
  v.minor = minor;
  v.patch = patch;
  v.prerelease = std::move(pre);
  return v;
}

// Synthetic lower bound used for exclusive upper limits, e.g. `<2.0.0-0`.
std::vector<PrereleaseId> zero_pre() { return {PrereleaseId{std::uint64_t{0}}}; }

Version full(const Partial& p) { return make(*p.major, *p.minor, *p.patch, p.prerelease); }

[[noreturn]] void bad_range(std::string_view text, std::string_view why) {
  throw Error(ErrorKind::malformed_range, "'" + std::string(text) + "': " + std::string(why));
}

void expand_tilde(const Partial& p, ComparatorSet& out) {
  if (!p.major) return;
  if (!p.minor) {
    out.push_back({Op::ge, make(*p.major, 0, 0)});
    out.push_back({Op::lt, make(*p.major + 1, 0, 0, zero_pre())});
  } else if (!p.patch) {
    out.push_back({Op::ge, make(*p.major, *p.minor, 0)});
    out.push_back({Op::lt, make(*p.major, *p.minor + 1, 0, zero_pre())});
  } else {
    out.push_back({Op::ge, full(p)});
    out.push_back({Op::lt, make(*p.major, *p.minor + 1, 0, zero_pre())});
  }
}

void expand_caret(const Partial& p, ComparatorSet& out) {
  if (!p.major) return;
  const auto M = *p.major;
  if (!p.minor) {
    out.push_back({Op::ge, make(M, 0, 0)});
    out.push_back({Op::lt, make(M + 1, 0, 0, zero_pre())});
    return;
  }
  const auto m = *p.minor;
  if (!p.patch) {
    out.push_back({Op::ge, make(M, m, 0)});
    out.push_back({Op::lt, M == 0 ? make(M, m + 1, 0, zero_pre()) : make(M + 1, 0, 0, zero_pre())});
    return;
  }
  out.push_back({Op::ge, full(p)});
  if (M != 0) {
    out.push_back({Op::lt, make(M + 1, 0, 0, zero_pre())});
  } else if (m != 0) {
    out.push_back({Op::lt, make(0, m + 1, 0, zero_pre())});
  } else {
    out.push_back({Op::lt, make(0, 0, *p.patch + 1, zero_pre())});
  }
}

void expand_primitive(std::string_view op, const Partial& p, ComparatorSet& out) {
  if (!p.major) {
    // `*`, `x`, `>=*`: anything. `<*` and `>*`: nothing.
    if (op == "<" || op == ">") out.push_back({Op::lt, make(0, 0, 0, zero_pre())});
    return;
  }
  if (p.patch) {
    Op o = Op::eq;
    if (op == "<") o = Op::lt;
    else if (op == "<=") o = Op::le;
    else if (op == ">") o = Op::gt;
    else if (op == ">=") o = Op::ge;
    out.push_back({o, full(p)});
    return;
  }
  const auto M = *p.major;
  const bool minor_wild = !p.minor;
  const auto m = p.minor.value_or(0);
  if (op == ">") {
    out.push_back({Op::ge, minor_wild ? make(M + 1, 0, 0) : make(M, m + 1, 0)});
  } else if (op == ">=") {
    out.push_back({Op::ge, make(M, m, 0)});
  } else if (op == "<") {
    out.push_back({Op::lt, make(M, m, 0, zero_pre())});
  } else if (op == "<=") {
    out.push_back({Op::lt, minor_wild ? make(M + 1, 0, 0, zero_pre()) : make(M, m + 1, 0, zero_pre())});
  } else {
    out.push_back({Op::ge, make(M, m, 0)});
    out.push_back({Op::lt, minor_wild ? make(M + 1, 0, 0, zero_pre()) : make(M, m + 1, 0, zero_pre())});
  }
}

void expand_hyphen(std::string_view text, std::string_view lo, std::string_view hi, ComparatorSet& out) {
  Partial from, to;
  if (!parse_partial(lo, from) || !parse_partial(hi, to)) bad_range(text, "bad hyphen bound");
  if (from.major) {
    out.push_back({Op::ge, make(*from.major, from.minor.value_or(0), from.patch.value_or(0),
                                from.patch ? from.prerelease : std::vector<PrereleaseId>{})});
  }
  if (!to.major) return;
  if (!to.minor) {
    out.push_back({Op::lt, make(*to.major + 1, 0, 0, zero_pre())});
  } else if (!to.patch) {
    out.push_back({Op::lt, make(*to.major, *to.minor + 1, 0, zero_pre())});
  } else {
    out.push_back({Op::le, full(to)});
  }
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> parts;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) parts.push_back(s.substr(i, j - i));
    i = j;
  }
  return parts;
}

std::size_t operator_length(std::string_view tok) {
  for (std::string_view op : {">=", "<=", "~>", ">", "<", "=", "^", "~"}) {
    if (tok.substr(0, op.size()) == op) return op.size();
  }
  return 0;
}

ComparatorSet parse_set(std::string_view full_text, std::string_view text) {
  ComparatorSet out;
  auto parts = split_ws(text);
  if (parts.size() == 3 && parts[1] == "-") {
    expand_hyphen(full_text, parts[0], parts[2], out);
    return out;
  }
  // Join dangling operators with their operand (`>= 1.2.3`).
  std::vector<std::string> tokens;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    std::string tok(parts[i]);
    if (operator_length(tok) == tok.size()) {
      if (i + 1 >= parts.size()) bad_range(full_text, "dangling operator");
      tok += parts[++i];
    }
    tokens.push_back(std::move(tok));
  }
  for (const auto& tok : tokens) {
    std::size_t n = operator_length(tok);
    std::string_view op(tok.data(), n);
    Partial p;
    if (!parse_partial(std::string_view(tok).substr(n), p)) bad_range(full_text, "bad comparator '" + tok + "'");
    if (op == "^") expand_caret(p, out);
    else if (op == "~" || op == "~>") expand_tilde(p, out);
    else expand_primitive(op, p, out);
  }
  return out;
}

bool test_set(const ComparatorSet& set, const Version& v) {
  for (const auto& c : set) {
    if (!c.test(v)) return false;
  }
  if (!v.is_prerelease()) return true;
  // Prereleases only match when a comparator opts in on the same core tuple.
  return std::any_of(set.begin(), set.end(), [&](const Comparator& c) {
    return c.version.is_prerelease() && c.version.same_core(v);
  });
}

}  // namespace

std::string Version::to_string() const {
  std::string s = std::to_string(major) + "." + std::to_string(minor) + "." + std::to_string(patch);
  for (std::size_t i = 0; i < prerelease.size(); ++i) {
    s += i == 0 ? "-" : ".";
    if (const auto* n = std::get_if<std::uint64_t>(&prerelease[i])) s += std::to_string(*n);
    else s += std::get<std::string>(prerelease[i]);
  }
  if (!build.empty()) s += "+" + build;
  return s;
}

std::strong_ordering compare(const Version& a, const Version& b) {
  if (auto c = a.major <=> b.major; c != 0) return c;
  if (auto c = a.minor <=> b.minor; c != 0) return c;
  if (auto c = a.patch <=> b.patch; c != 0) return c;
  if (a.prerelease.empty() || b.prerelease.empty()) {
    // A release outranks any of its prereleases.
    return b.prerelease.size() == 0 ? (a.prerelease.empty() ? std::strong_ordering::equal : std::strong_ordering::less)
                                     : std::strong_ordering::greater;
  }
  const std::size_t n = std::min(a.prerelease.size(), b.prerelease.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto& x = a.prerelease[i];
    const auto& y = b.prerelease[i];
    if (x.index() != y.index()) {
      return x.index() == 0 ? std::strong_ordering::less : std::strong_ordering::greater;
    }
    if (auto c = x <=> y; c != 0) return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
  }
  return a.prerelease.size() <=> b.prerelease.size();
}

bool try_parse_version(std::string_view text, Version& out) {
  text = strip_prefix(text);
  std::string_view core, pre, build;
  split_tags(text, core, pre, build);
  std::uint64_t parts[3];
  std::size_t start = 0;
  for (int i = 0; i < 3; ++i) {
    std::size_t dot = core.find('.', start);
    if ((i < 2) == (dot == std::string_view::npos)) return false;
    std::string_view part = core.substr(start, i < 2 ? dot - start : std::string_view::npos);
    if (!parse_number(part, parts[i])) return false;
    start = dot + 1;
  }
  Version v = make(parts[0], parts[1], parts[2]);
  if (text.find('-') != std::string_view::npos && text.find('-') < text.find('+')) {
    if (!parse_prerelease(pre, v.prerelease)) return false;
  }
  if (text.find('+') != std::string_view::npos) {
    if (build.empty()) return false;
    v.build = std::string(build);
  }
  out = std::move(v);
  return true;
}

Version parse_version(std::string_view text) {
  Version v;
  if (!try_parse_version(text, v)) {
    throw Error(ErrorKind::malformed_version, "'" + std::string(text) + "' is not MAJOR.MINOR.PATCH");
  }
  return v;
}

bool Comparator::test(const Version& v) const {
  auto c = compare(v, version);
  switch (op) {
    case Op::lt: return c < 0;
    case Op::le: return c <= 0;
    case Op::gt: return c > 0;
    case Op::ge: return c >= 0;
    case Op::eq: return c == 0;
  }
  return false;
}

Range Range::parse(std::string_view text) {
  Range r;
  r.source_ = std::string(trim(text));
  std::string_view rest = r.source_;
  while (true) {
    std::size_t bar = rest.find("||");
    std::string_view piece = trim(rest.substr(0, bar));
    r.sets_.push_back(parse_set(text, piece));
    if (bar == std::string_view::npos) break;
    rest = rest.substr(bar + 2);
  }
  return r;
}

bool Range::matches(const Version& v) const {
  return std::any_of(sets_.begin(), sets_.end(), [&](const ComparatorSet& s) { return test_set(s, v); });
}

bool matches(const Range& range, const Version& v) { return range.matches(v); }

}  // namespace trivscan::semver

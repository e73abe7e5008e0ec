#include <filesystem>
#include <fstream>

#include <doctest.h>

#include "trivscan/depgraph.hpp"
#include "trivscan/error.hpp"

using namespace trivscan;
using namespace trivscan::deps;
namespace fs = std::filesystem;

namespace {

const fs::path registry_dir = fs::path(FIXTURES_DIR) / "registry";

std::set<std::string> node_names(const DependencyGraph& g) {
  std::set<std::string> out;
  for (auto& n : g.nodes) out.insert(n.to_string());
  return out;
}

}  // namespace

TEST_CASE("diamond: A->B->C and A->C") {
  RegistryIndex idx;
  idx.add("a", "1.0.0", {{"b", "^1.0.0"}, {"c", "^1.0.0"}});
  idx.add("b", "1.0.0", {{"c", "^1.0.0"}});
  idx.add("c", "1.0.0");
  auto g = resolve_closure("a", "1.0.0", idx);
  CHECK(node_names(g) == std::set<std::string>{"a@1.0.0", "b@1.0.0", "c@1.0.0"});
  CHECK(transitive_count(g) == 2);
  CHECK(g.edges.size() == 3);
}

TEST_CASE("no dependencies") {
  RegistryIndex idx;
  idx.add("a", "1.0.0");
  auto g = resolve_closure("a", "1.0.0", idx);
  CHECK(transitive_count(g) == 0);
  CHECK(g.nodes.size() == 1);
}

TEST_CASE("two-node cycle terminates") {
  RegistryIndex idx;
  idx.add("a", "1.0.0", {{"b", "1.0.0"}});
  idx.add("b", "1.0.0", {{"a", "1.0.0"}});
  auto g = resolve_closure("a", "1.0.0", idx);
  CHECK(node_names(g) == std::set<std::string>{"a@1.0.0", "b@1.0.0"});
  CHECK(transitive_count(g) == 1);
  CHECK(transitive_count(g, CountBy::name) == 1);
}

TEST_CASE("highest matching version wins") {
  RegistryIndex idx;
  idx.add("x", "1.0.0");
  idx.add("x", "1.9.0");
  idx.add("x", "2.0.0");
  idx.add("x", "1.10.0-beta.1");
  auto* hit = idx.highest_match("x", semver::Range::parse("^1.0.0"));
  REQUIRE(hit);
  CHECK(hit->version_text == "1.9.0");
  CHECK(idx.highest_match("x", semver::Range::parse(">3")) == nullptr);
  CHECK(idx.versions("x")->size() == 4);
  CHECK(idx.versions("nope") == nullptr);
  CHECK(idx.find("x", "2.0.0") != nullptr);
  CHECK(idx.find("x", "2.0.1") == nullptr);
}

TEST_CASE("fixture registry closure from app") {
  std::vector<std::string> warnings;
  auto idx = RegistryIndex::load(registry_dir, &warnings);
  CHECK(idx.package_count() == 10);
  CHECK(warnings.empty());
  auto g = resolve_closure("app", "1.0.0", idx);
  CHECK(node_names(g) == std::set<std::string>{"app@1.0.0", "alpha@1.2.0", "beta@2.1.5", "gamma@1.3.0", "gamma@1.1.0",
                                               "delta@1.5.0", "epsilon@1.4.2", "zeta@0.2.9", "eta@3.1.0",
                                               "theta@1.0.0", "app@0.9.0"});
  CHECK(transitive_count(g, CountBy::name_version) == 10);
  CHECK(transitive_count(g, CountBy::name) == 8);
  REQUIRE(g.unresolved.size() == 1);
  CHECK(g.unresolved[0].name == "iota");
  CHECK(g.unresolved[0].range == "^9.0.0");
  CHECK(g.unresolved[0].dependent.to_string() == "eta@3.1.0");
  // every edge endpoint is a node
  for (auto& [from, to] : g.edges) {
    CHECK(g.nodes.count(from) == 1);
    CHECK(g.nodes.count(to) == 1);
  }
  CHECK(g.nodes.count(g.root) == 1);
  // diamond: gamma@1.3.0 has two parents
  int parents = 0;
  for (auto& [from, to] : g.edges)
    if (to.to_string() == "gamma@1.3.0") ++parents;
  CHECK(parents == 2);
}

TEST_CASE("fixture registry closures from inner nodes") {
  auto idx = RegistryIndex::load(registry_dir);
  auto d = resolve_closure("delta", "1.5.0", idx);
  CHECK(transitive_count(d) == 3);
  CHECK(transitive_count(d, CountBy::name) == 3);
  auto t = resolve_closure("theta", "1.0.0", idx);
  CHECK(transitive_count(t) == 2);
  CHECK(transitive_count(t, CountBy::name) == 2);
  CHECK(t.unresolved.size() == 1);
  auto z = resolve_closure("zeta", "0.2.9", idx);
  CHECK(transitive_count(z) == 0);
}

TEST_CASE("unresolvable dependencies are recorded, not thrown") {
  RegistryIndex idx;
  idx.add("a", "1.0.0", {{"ghost", "^1.0.0"}, {"b", "not a range"}});
  idx.add("b", "1.0.0");
  auto g = resolve_closure("a", "1.0.0", idx);
  CHECK(g.unresolved.size() == 2);
  CHECK(transitive_count(g) == 0);
}

TEST_CASE("root from a manifest that is not in the index") {
  RegistryIndex idx;
  idx.add("b", "1.0.0");
  auto g = resolve_closure(NodeId{"local", "0.0.1"}, {{"b", "*"}}, idx);
  CHECK(transitive_count(g) == 1);
  CHECK(g.children(g.root).size() == 1);
}

TEST_CASE("registry loading errors and scoped names") {
  auto dir = fs::temp_directory_path() / "trivscan-registry-test";
  fs::remove_all(dir);
  fs::create_directories(dir / "@scope");
  std::ofstream(dir / "@scope" / "inner.json") << R"({"versions": {"1.0.0": {}}})";
  std::ofstream(dir / "@other%2fpkg.json") << R"({"versions": {"2.0.0": {}, "bogus": {}}})";
  std::vector<std::string> warnings;
  auto idx = RegistryIndex::load(dir, &warnings);
  CHECK(idx.find("@scope/inner", "1.0.0") != nullptr);
  CHECK(idx.find("@other/pkg", "2.0.0") != nullptr);
  CHECK(warnings.size() == 1);

  std::ofstream(dir / "broken.json") << "{";
  try {
    RegistryIndex::load(dir);
    FAIL("expected MalformedRegistry");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::malformed_registry);
  }
  fs::remove_all(dir);
  CHECK_THROWS_AS(RegistryIndex::load(dir), Error);
}

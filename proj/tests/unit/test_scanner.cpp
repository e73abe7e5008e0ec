#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <doctest.h>

#include "trivscan/scanner.hpp"

using namespace trivscan;
using scan::ConstructKind;
namespace fs = std::filesystem;

namespace {

std::vector<ConstructKind> kinds(std::string_view src) {
  std::vector<ConstructKind> out;
  for (auto& c : scan::parse_source(src).constructs) out.push_back(c.kind);
  return out;
}

std::vector<std::string> specifiers(std::string_view src) {
  std::vector<std::string> out;
  for (auto& c : scan::parse_source(src).constructs)
    if (c.specifier) out.push_back(*c.specifier);
  return out;
}

}  // namespace

TEST_CASE("decision points of an if with &&") {
  CHECK(kinds("if (a && b) {}") == std::vector{ConstructKind::if_, ConstructKind::logical_and});
}

TEST_CASE("object literal has no constructs") {
  CHECK(kinds("module.exports = {aliceblue: [240,248,255]}").empty());
}

TEST_CASE("arrow with require") {
  auto out = scan::parse_source("const f = () => require('./util')");
  REQUIRE(out.constructs.size() == 2);
  CHECK(out.constructs[0].kind == ConstructKind::arrow_function);
  CHECK(out.constructs[1].kind == ConstructKind::require_call);
  CHECK(out.constructs[1].specifier == "./util");
  CHECK_FALSE(out.constructs[0].specifier.has_value());
}

TEST_CASE("module references") {
  CHECK(specifiers("import a from 'a'; import {b} from \"b\"; import 'c'; export * from 'd';"
                   "export {e} from 'e'; import('f'); require(`g`);") ==
        std::vector<std::string>{"a", "b", "c", "d", "e", "f", "g"});
  CHECK(specifiers("require(name); import(x + 'y'); obj.require('z');").empty());
  CHECK(specifiers("const x = { require: 1 }; x.import = 2;").empty());
  CHECK(specifiers("import.meta.url").empty());
  CHECK(specifiers("export const a = 1; export default 2;").empty());
  CHECK(specifiers("import\n  foo\nfrom\n  'multi-line'") == std::vector<std::string>{"multi-line"});
}

TEST_CASE("function flavours") {
  CHECK(kinds("function f() {}") == std::vector{ConstructKind::function_decl});
  CHECK(kinds("x = function () {}") == std::vector{ConstructKind::function_expr});
  CHECK(kinds("async function f() {}") == std::vector{ConstructKind::function_decl});
  CHECK(kinds("x = async () => 1") == std::vector{ConstructKind::arrow_function});
  CHECK(kinds("x = a => a") == std::vector{ConstructKind::arrow_function});
  CHECK(kinds("x = { m() {} }") == std::vector{ConstructKind::method});
  CHECK(kinds("x = { get a() { return 1; }, set a(v) {} }") ==
        std::vector{ConstructKind::getter_setter, ConstructKind::getter_setter});
  CHECK(kinds("class A { static async *gen() {} }") == std::vector{ConstructKind::class_decl, ConstructKind::method});
  CHECK(kinds("class A { get() {} set(v) {} }") ==
        std::vector{ConstructKind::class_decl, ConstructKind::method, ConstructKind::method});
  CHECK(kinds("class A { #priv() {} }").size() == 2);
  // calls followed by blocks are not methods
  CHECK(kinds("if (a) { foo() }").size() == 1);
  CHECK(kinds("x = { a: f(1), b: 2 }").empty());
}

TEST_CASE("loops and branches") {
  CHECK(kinds("for (;;) {}") == std::vector{ConstructKind::for_});
  CHECK(kinds("for (const a of b) {}") == std::vector{ConstructKind::for_in_of});
  CHECK(kinds("for (k in o) {}") == std::vector{ConstructKind::for_in_of});
  CHECK(kinds("for await (const x of xs) {}") == std::vector{ConstructKind::for_in_of});
  CHECK(kinds("while (x) {}") == std::vector{ConstructKind::while_});
  CHECK(kinds("do { x++ } while (x < 3)") == std::vector{ConstructKind::do_while});
  CHECK(kinds("do x++; while (x < 3)") == std::vector{ConstructKind::do_while});
  CHECK(kinds("if (a) {} else if (b) {}") == std::vector{ConstructKind::if_, ConstructKind::else_if});
  CHECK(kinds("x = a ? b : c") == std::vector{ConstructKind::conditional_expr});
  CHECK(kinds("x = a?.b") .empty());
  CHECK(kinds("x = a || b ?? c") == std::vector{ConstructKind::logical_or, ConstructKind::nullish_coalesce});
  CHECK(kinds("x ||= y; x &&= z").empty());
  CHECK(kinds("switch (x) { case 1: case 2: break; default: }") ==
        std::vector{ConstructKind::case_clause, ConstructKind::case_clause});
  CHECK(kinds("try {} catch (e) {}") == std::vector{ConstructKind::catch_clause});
}

TEST_CASE("conditional inside case label is still counted") {
  auto k = kinds("switch (x) { case a ? 1 : 2: break; }");
  CHECK(k == std::vector{ConstructKind::case_clause, ConstructKind::conditional_expr});
  auto obj = kinds("switch (x) { case 1: y = { a: 1 }; }");
  CHECK(obj == std::vector{ConstructKind::case_clause});
}

TEST_CASE("typescript-ish optional params are not mistaken") {
  // plain js only; make sure a ternary over template pieces works
  CHECK(kinds("x = `${a ? b : c}`") == std::vector{ConstructKind::conditional_expr});
}

TEST_CASE("literal_value decodes simple literals") {
  auto toks = lex::tokenize(R"('a\'b' "c\\d" `e` `f${g}`)").tokens;
  std::vector<lex::Token> sig;
  for (auto& t : toks)
    if (!t.is_trivia()) sig.push_back(t);
  CHECK(scan::literal_value(sig[0]) == "a'b");
  CHECK(scan::literal_value(sig[1]) == "c\\d");
  CHECK(scan::literal_value(sig[2]) == "e");
  CHECK_FALSE(scan::literal_value(sig[3]).has_value());
}

TEST_CASE("scanner errors are recovered and reported") {
  auto out = scan::parse_source("if (a { b(); ");
  CHECK_FALSE(out.errors.empty());
  CHECK(out.constructs.front().kind == ConstructKind::if_);
  auto stray = scan::parse_source("}} if (a) {}");
  CHECK(stray.constructs.size() == 1);
}

TEST_CASE("property: inserting comments and blank lines leaves constructs unchanged") {
  std::mt19937 rng(99);
  const std::vector<std::string> fillers = {"/* c */", "// note\n", "\n\n", "/* multi\nline */"};
  for (const auto& entry : fs::directory_iterator(fs::path(FIXTURES_DIR) / "metrics")) {
    if (entry.path().extension() != ".js") continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    const auto base = scan::parse_source(ss.str());
    std::vector<ConstructKind> base_kinds;
    for (auto& c : base.constructs) base_kinds.push_back(c.kind);

    for (int round = 0; round < 20; ++round) {
      // Insert fillers between significant tokens (never inside them).
      std::string mutated;
      for (const auto& t : base.tokens) {
        if (!t.is_trivia() && rng() % 4 == 0) mutated += " " + fillers[rng() % fillers.size()] + " ";
        mutated += t.lexeme;
      }
      auto out = scan::parse_source(mutated);
      std::vector<ConstructKind> got;
      for (auto& c : out.constructs) got.push_back(c.kind);
      CAPTURE(entry.path().filename().string());
      CAPTURE(mutated);
      if (base_kinds == got) continue;
      // ASI-sensitive spots (a newline after `return`, before `(`) may legally
      // change meaning; the fixtures avoid them, so any change is a failure.
      CHECK(base_kinds == got);
    }
  }
}

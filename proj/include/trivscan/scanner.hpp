#pragma once

// Shallow construct scanner: one bracket-depth-aware pass over the token
// stream that reports decision points, function boundaries and module
// references. It is not a parser and never builds a tree.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "trivscan/lexer.hpp"

namespace trivscan::scan {

enum class ConstructKind {
  function_decl,
  function_expr,
  arrow_function,
  method,
  getter_setter,
  class_decl,
  if_,
  else_if,
  for_,
  for_in_of,
  while_,
  do_while,
  case_clause,
  catch_clause,
  conditional_expr,
  logical_and,
  logical_or,
  nullish_coalesce,
  import_decl,
  export_from,
  dynamic_import,
  require_call,
};

std::string_view to_string(ConstructKind kind);

bool is_module_reference(ConstructKind kind);
bool is_function(ConstructKind kind);

struct Construct {
  ConstructKind kind;
  std::optional<std::string> specifier;  // set exactly for module references
  int line = 0;

  friend bool operator==(const Construct&, const Construct&) = default;
};

struct ParseOutcome {
  std::vector<lex::Token> tokens;
  std::vector<Construct> constructs;
  std::vector<lex::Diagnostic> errors;  // lexer errors followed by scanner errors
};

ParseOutcome scan_constructs(lex::TokenStream stream);
ParseOutcome scan_constructs(const std::vector<lex::Token>& tokens);

/// tokenize + scan_constructs.
ParseOutcome parse_source(std::string_view source);

/// Decodes a string or no-substitution template literal lexeme. Returns
/// nullopt for anything that is not a plain literal.
std::optional<std::string> literal_value(const lex::Token& token);

}  // namespace trivscan::scan

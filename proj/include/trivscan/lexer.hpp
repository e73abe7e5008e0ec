#pragma once

// Full-fidelity ECMAScript tokenizer. Trivia (whitespace, newlines,
// comments) is kept so that concatenating all lexemes reproduces the input.

#include <string>
#include <string_view>
#include <vector>

namespace trivscan::lex {

enum class TokenKind {
  identifier,
  keyword,
  punctuator,
  string,
  template_part,  // a whole no-substitution template, or a head/middle/tail piece around `${ }`
  number,
  regex,
  line_comment,
  block_comment,
  whitespace,
  newline,
  eof,
};

std::string_view to_string(TokenKind kind);

struct Token {
  TokenKind kind = TokenKind::eof;
  std::string lexeme;
  int line = 1;    // 1-based
  int column = 0;  // 0-based byte offset within the line

  bool is_trivia() const {
    return kind == TokenKind::whitespace || kind == TokenKind::newline || kind == TokenKind::line_comment ||
           kind == TokenKind::block_comment || kind == TokenKind::eof;
  }
  bool is(TokenKind k, std::string_view text) const { return kind == k && lexeme == text; }
  bool is_punct(std::string_view text) const { return is(TokenKind::punctuator, text); }
  bool is_keyword(std::string_view text) const { return is(TokenKind::keyword, text); }
};

struct Diagnostic {
  int line = 0;
  std::string message;
};

struct TokenStream {
  std::vector<Token> tokens;  // always ends with a single eof token
  std::vector<Diagnostic> errors;
};

/// Never throws on malformed source: unterminated strings, comments,
/// templates and regexes become recovered errors.
TokenStream tokenize(std::string_view source);

bool is_reserved_word(std::string_view word);

}  // namespace trivscan::lex

#include "trivscan/lexer.hpp"

#include <array>
#include <unordered_set>

namespace trivscan::lex {

namespace {

const std::unordered_set<std::string_view>& reserved_words() {
  static const std::unordered_set<std::string_view> words = {
      "await",    "break",   "case",   "catch",  "class",     "const",      "continue", "debugger",
      "default",  "delete",  "do",     "else",   "enum",      "export",     "extends",  "false",
      "finally",  "for",     "function", "if",   "import",    "in",         "instanceof", "let",
      "new",      "null",    "return", "static", "super",     "switch",     "this",     "throw",
      "true",     "try",     "typeof", "var",    "void",      "while",      "with",     "yield",
  };
  return words;
}

// Keywords after which a `/` is a division, because they end an operand.
bool keyword_ends_operand(std::string_view word) {
  return word == "this" || word == "super" || word == "null" || word == "true" || word == "false";
}

constexpr std::array<std::string_view, 50> kPunctuators = {
    ">>>=", "...", "===", "!==", "**=", "<<=", ">>=", ">>>", "&&=", "||=", "?\?=", "=>", "==",
    "!=",   "<=",  ">=",  "&&",  "||",  "?\?",  "?.",  "++",  "--",  "+=",  "-=",  "*=",  "/=",
    "%=",   "&=",  "|=",  "^=",  "**",  "<<",  ">>",  "{",   "}",   "(",   ")",   "[",   "]",
    ";",    ",",   "<",   ">",   "+",   "-",   "*",   "/",   "%",   "&",   "|"};

constexpr std::array<std::string_view, 8> kSinglePunctuators = {"^", "!", "~", "?", ":", "=", ".", "@"};

bool is_ascii_ident_start(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '$' || c == '_';
}

bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  TokenStream run() {
    if (src_.substr(0, 2) == "#!") emit(TokenKind::line_comment, line_end(pos_));
    while (pos_ < src_.size()) step();
    out_.tokens.push_back(Token{TokenKind::eof, "", line_, col_});
    return std::move(out_);
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 0;
  TokenStream out_;
  // One entry per open `{`; true when the brace is a template `${`.
  std::vector<bool> braces_;
  std::size_t last_significant_index_ = 0;
  bool have_significant_ = false;
  std::vector<bool> parens_;
  bool closed_header_ = false;

  unsigned char at(std::size_t i) const { return i < src_.size() ? static_cast<unsigned char>(src_[i]) : 0; }

  // Length of a newline sequence at i, or 0.
  std::size_t newline_len(std::size_t i) const {
    unsigned char c = at(i);
    if (c == '\n') return 1;
    if (c == '\r') return at(i + 1) == '\n' ? 2 : 1;
    if (c == 0xE2 && at(i + 1) == 0x80 && (at(i + 2) == 0xA8 || at(i + 2) == 0xA9)) return 3;
    return 0;
  }

  std::size_t whitespace_len(std::size_t i) const {
    unsigned char c = at(i);
    if (c == ' ' || c == '\t' || c == '\v' || c == '\f') return 1;
    if (c == 0xC2 && at(i + 1) == 0xA0) return 2;
    if (c == 0xEF && at(i + 1) == 0xBB && at(i + 2) == 0xBF) return 3;
    if (c == 0xE1 && at(i + 1) == 0x9A && at(i + 2) == 0x80) return 3;
    if (c == 0xE2 && at(i + 1) == 0x80 && ((at(i + 2) >= 0x80 && at(i + 2) <= 0x8A) || at(i + 2) == 0xAF)) return 3;
    if (c == 0xE2 && at(i + 1) == 0x81 && at(i + 2) == 0x9F) return 3;
    if (c == 0xE3 && at(i + 1) == 0x80 && at(i + 2) == 0x80) return 3;
    return 0;
  }

  bool is_ident_part(std::size_t i) const {
    unsigned char c = at(i);
    if (is_ascii_ident_start(c) || is_digit(c)) return true;
    if (c == '\\' && at(i + 1) == 'u') return true;
    return c >= 0x80 && whitespace_len(i) == 0 && newline_len(i) == 0;
  }

  std::size_t line_end(std::size_t i) const {
    while (i < src_.size() && newline_len(i) == 0) ++i;
    return i;
  }

  void error(std::string message) { out_.errors.push_back(Diagnostic{line_, std::move(message)}); }

  void emit(TokenKind kind, std::size_t end) {
    Token tok{kind, std::string(src_.substr(pos_, end - pos_)), line_, col_};
    // Advance the line/column cursor across the lexeme.
    std::size_t i = pos_;
    while (i < end) {
      std::size_t nl = newline_len(i);
      if (nl) {
        i += nl;
        ++line_;
        col_ = 0;
      } else {
        ++i;
        ++col_;
      }
    }
    pos_ = end;
    out_.tokens.push_back(std::move(tok));
    if (!out_.tokens.back().is_trivia()) {
      track_parens(out_.tokens.back());
      have_significant_ = true;
      last_significant_index_ = out_.tokens.size() - 1;
    }
  }

  // `)` closing an if/while/for/with header may be followed by a regex.
  void track_parens(const Token& t) {
    if (t.is_punct("(")) {
      bool header = false;
      if (have_significant_) {
        const Token& p = out_.tokens[last_significant_index_];
        header = p.is_keyword("if") || p.is_keyword("while") || p.is_keyword("for") || p.is_keyword("with");
      }
      parens_.push_back(header);
    } else if (t.is_punct(")")) {
      closed_header_ = !parens_.empty() && parens_.back();
      if (!parens_.empty()) parens_.pop_back();
    }
  }

  bool regex_allowed() const {
    if (!have_significant_) return true;
    const Token& t = out_.tokens[last_significant_index_];
    switch (t.kind) {
      case TokenKind::punctuator:
        if (t.lexeme == ")") return closed_header_;
        return !(t.lexeme == "]" || t.lexeme == "}" || t.lexeme == "++" || t.lexeme == "--");
      case TokenKind::keyword:
        return !keyword_ends_operand(t.lexeme);
      case TokenKind::template_part:
        return t.lexeme.size() >= 2 && t.lexeme.substr(t.lexeme.size() - 2) == "${";
      default:
        return false;
    }
  }

  void step() {
    if (std::size_t n = newline_len(pos_)) return emit(TokenKind::newline, pos_ + n);
    if (whitespace_len(pos_)) {
      std::size_t end = pos_;
      while (std::size_t n = whitespace_len(end)) end += n;
      return emit(TokenKind::whitespace, end);
    }
    const unsigned char c = at(pos_);
    if (c == '/' && at(pos_ + 1) == '/') return emit(TokenKind::line_comment, line_end(pos_));
    if (c == '/' && at(pos_ + 1) == '*') return block_comment();
    if (c == '"' || c == '\'') return string_literal(c);
    if (c == '`') return template_part(pos_ + 1);
    if (c == '}' && !braces_.empty() && braces_.back()) {
      braces_.pop_back();
      return template_part(pos_ + 1);
    }
    if (is_digit(c) || (c == '.' && is_digit(at(pos_ + 1)))) return number();
    if (is_ascii_ident_start(c) || c >= 0x80 || (c == '\\' && at(pos_ + 1) == 'u') ||
        (c == '#' && is_ident_part(pos_ + 1))) {
      return identifier();
    }
    if (c == '/' && regex_allowed()) return regex();
    punctuator();
  }

  void block_comment() {
    std::size_t close = src_.find("*/", pos_ + 2);
    if (close == std::string_view::npos) {
      error("unterminated block comment");
      return emit(TokenKind::block_comment, src_.size());
    }
    emit(TokenKind::block_comment, close + 2);
  }

  void string_literal(unsigned char quote) {
    std::size_t i = pos_ + 1;
    while (i < src_.size()) {
      unsigned char c = at(i);
      if (c == quote) return emit(TokenKind::string, i + 1);
      if (c == '\\') {
        std::size_t nl = newline_len(i + 1);
        i += nl ? 1 + nl : 2;
        continue;
      }
      if (newline_len(i)) break;
      ++i;
    }
    error("unterminated string literal");
    emit(TokenKind::string, std::min(i, src_.size()));
  }

  // Scans a template piece whose body starts at `i` (just past "`" or "}").
  void template_part(std::size_t i) {
    while (i < src_.size()) {
      unsigned char c = at(i);
      if (c == '\\') {
        i += 2;
        continue;
      }
      if (c == '`') return emit(TokenKind::template_part, i + 1);
      if (c == '$' && at(i + 1) == '{') {
        braces_.push_back(true);
        return emit(TokenKind::template_part, i + 2);
      }
      ++i;
    }
    error("unterminated template literal");
    emit(TokenKind::template_part, src_.size());
  }

  void number() {
    std::size_t i = pos_;
    auto digits = [&](auto pred) {
      while (i < src_.size() && (pred(at(i)) || at(i) == '_')) ++i;
    };
    const unsigned char prefix = at(i + 1) | 0x20;
    if (at(i) == '0' && (prefix == 'x' || prefix == 'o' || prefix == 'b')) {
      i += 2;
      digits([](unsigned char c) { return is_digit(c) || ((c | 0x20) >= 'a' && (c | 0x20) <= 'f'); });
    } else {
      digits(is_digit);
      if (at(i) == '.') {
        ++i;
        digits(is_digit);
      }
      if ((at(i) | 0x20) == 'e' && (is_digit(at(i + 1)) || ((at(i + 1) == '+' || at(i + 1) == '-') && is_digit(at(i + 2))))) {
        i += 2;
        digits(is_digit);
      }
    }
    if (at(i) == 'n') ++i;
    emit(TokenKind::number, i);
  }

  void identifier() {
    std::size_t i = pos_;
    if (at(i) == '#') ++i;
    while (i < src_.size() && is_ident_part(i)) {
      if (at(i) == '\\') {
        // \uXXXX or \u{...}
        i += 2;
        if (at(i) == '{') {
          while (i < src_.size() && at(i) != '}') ++i;
          if (i < src_.size()) ++i;
        } else {
          for (int k = 0; k < 4 && i < src_.size(); ++k) ++i;
        }
      } else {
        ++i;
      }
    }
    std::string_view word = src_.substr(pos_, i - pos_);
    // `a.if` and `{ default: 1 }` style property names stay identifiers only
    // in the scanner; here reserved words are always keywords.
    emit(reserved_words().count(word) ? TokenKind::keyword : TokenKind::identifier, i);
  }

  void regex() {
    std::size_t i = pos_ + 1;
    bool in_class = false;
    while (i < src_.size()) {
      unsigned char c = at(i);
      if (newline_len(i)) break;
      if (c == '\\') {
        i += newline_len(i + 1) ? 1 : 2;
        continue;
      }
      if (c == '[') in_class = true;
      else if (c == ']') in_class = false;
      else if (c == '/' && !in_class) {
        ++i;
        while (i < src_.size() && is_ident_part(i)) ++i;
        return emit(TokenKind::regex, i);
      }
      ++i;
    }
    error("unterminated regular expression");
    emit(TokenKind::regex, std::min(i, src_.size()));
  }

  void punctuator() {
    std::string_view rest = src_.substr(pos_);
    for (std::string_view p : kPunctuators) {
      if (rest.substr(0, p.size()) != p) continue;
      // `a?.5:b` is a conditional, not optional chaining.
      if (p == "?." && is_digit(at(pos_ + 2))) continue;
      if (p == "{") braces_.push_back(false);
      if (p == "}" && !braces_.empty()) braces_.pop_back();
      return emit(TokenKind::punctuator, pos_ + p.size());
    }
    for (std::string_view p : kSinglePunctuators) {
      if (rest.substr(0, 1) == p) return emit(TokenKind::punctuator, pos_ + 1);
    }
    error(std::string("unexpected character '") + src_[pos_] + "'");
    emit(TokenKind::punctuator, pos_ + 1);
  }
};

}  // namespace

std::string_view to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::identifier: return "identifier";
    case TokenKind::keyword: return "keyword";
    case TokenKind::punctuator: return "punctuator";
    case TokenKind::string: return "string";
    case TokenKind::template_part: return "template";
    case TokenKind::number: return "number";
    case TokenKind::regex: return "regex";
    case TokenKind::line_comment: return "line-comment";
    case TokenKind::block_comment: return "block-comment";
    case TokenKind::whitespace: return "whitespace";
    case TokenKind::newline: return "newline";
    case TokenKind::eof: return "eof";
  }
  return "unknown";
}

bool is_reserved_word(std::string_view word) { return reserved_words().count(word) > 0; }

TokenStream tokenize(std::string_view source) { return Lexer(source).run(); }

}  // namespace trivscan::lex

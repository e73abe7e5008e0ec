#include "trivscan/scanner.hpp"

#include <unordered_set>

namespace trivscan::scan {

namespace {

using lex::Token;
using lex::TokenKind;

constexpr std::size_t kNone = static_cast<std::size_t>(-1);
constexpr std::size_t kImportLookahead = 256;

enum class Context { paren, bracket, block, object_literal, class_body };

struct Frame {
  Context context;
  std::size_t open;  // index of the opening token
};

char closer_for(std::string_view open) { return open == "(" ? ')' : open == "[" ? ']' : '}'; }

class Scanner {
 public:
  explicit Scanner(const std::vector<Token>& tokens) {
    for (const auto& t : tokens) {
      if (!t.is_trivia()) sig_.push_back(&t);
    }
    match_.assign(sig_.size(), kNone);
  }

  void run(ParseOutcome& out) {
    out_ = &out;
    match_brackets();
    for (std::size_t i = 0; i < sig_.size(); ++i) visit(i);
  }

 private:
  std::vector<const Token*> sig_;
  std::vector<std::size_t> match_;
  std::vector<Frame> stack_;
  std::unordered_set<std::size_t> do_tails_;
  std::size_t class_pending_depth_ = kNone;
  std::size_t case_depth_ = kNone;        // stack depth of an open `case`/`default` label
  std::size_t case_colon_ = kNone;        // index of the most recent label colon
  ParseOutcome* out_ = nullptr;

  const Token* tok(std::size_t i) const { return i < sig_.size() ? sig_[i] : nullptr; }
  const Token* prev(std::size_t i) const { return i == 0 ? nullptr : sig_[i - 1]; }
  bool punct_at(std::size_t i, std::string_view p) const { return tok(i) && tok(i)->is_punct(p); }

  void error(int line, std::string message) { out_->errors.push_back(lex::Diagnostic{line, std::move(message)}); }

  void emit(ConstructKind kind, std::size_t i, std::optional<std::string> specifier = std::nullopt) {
    out_->constructs.push_back(Construct{kind, std::move(specifier), sig_[i]->line});
  }

  void match_brackets() {
    std::vector<std::size_t> open;
    for (std::size_t i = 0; i < sig_.size(); ++i) {
      const Token& t = *sig_[i];
      if (t.kind != TokenKind::punctuator) continue;
      if (t.lexeme == "(" || t.lexeme == "[" || t.lexeme == "{") {
        open.push_back(i);
      } else if (t.lexeme == ")" || t.lexeme == "]" || t.lexeme == "}") {
        std::size_t k = open.size();
        while (k > 0 && closer_for(sig_[open[k - 1]]->lexeme) != t.lexeme[0]) --k;
        if (k == 0) {
          error(t.line, "unmatched '" + t.lexeme + "'");
          continue;
        }
        if (k != open.size()) error(t.line, "mismatched brackets before '" + t.lexeme + "'");
        match_[open[k - 1]] = i;
        match_[i] = open[k - 1];
        open.resize(k - 1);
      }
    }
    for (std::size_t i : open) error(sig_[i]->line, "unclosed '" + sig_[i]->lexeme + "'");
  }

  Context innermost() const { return stack_.empty() ? Context::block : stack_.back().context; }

  bool is_property_access(std::size_t i) const {
    const Token* p = prev(i);
    return p && (p->is_punct(".") || p->is_punct("?."));
  }

  // `{ if: 1 }` - a word used as an object key.
  bool is_object_key(std::size_t i) const { return innermost() == Context::object_literal && punct_at(i + 1, ":"); }

  Context classify_brace(std::size_t i) {
    if (class_pending_depth_ == stack_.size()) {
      class_pending_depth_ = kNone;
      return Context::class_body;
    }
    const Token* p = prev(i);
    if (!p) return Context::block;
    switch (p->kind) {
      case TokenKind::punctuator: {
        const std::string& s = p->lexeme;
        if (s == ")" || s == ";" || s == "}" || s == "{" || s == "=>") return Context::block;
        if (s == ":" && i - 1 == case_colon_) return Context::block;
        return Context::object_literal;
      }
      case TokenKind::keyword: {
        const std::string& s = p->lexeme;
        if (s == "else" || s == "do" || s == "try" || s == "finally") return Context::block;
        return Context::object_literal;
      }
      case TokenKind::identifier:
        return p->lexeme == "of" ? Context::object_literal : Context::block;
      case TokenKind::template_part:
        return Context::object_literal;
      default:
        return Context::block;
    }
  }

  void push_or_pop(std::size_t i) {
    const Token& t = *sig_[i];
    if (t.kind != TokenKind::punctuator) return;
    const std::string& s = t.lexeme;
    if (s == "(") {
      stack_.push_back({Context::paren, i});
    } else if (s == "[") {
      stack_.push_back({Context::bracket, i});
    } else if (s == "{") {
      stack_.push_back({classify_brace(i), i});
    } else if (s == ")" || s == "]" || s == "}") {
      // Pop back to the frame this closer matches; stray closers are ignored.
      if (match_[i] == kNone) return;
      while (!stack_.empty() && stack_.back().open != match_[i]) stack_.pop_back();
      if (!stack_.empty()) stack_.pop_back();
    }
  }

  static bool is_modifier(const Token& t) {
    return (t.kind == TokenKind::identifier && (t.lexeme == "get" || t.lexeme == "set" || t.lexeme == "async")) ||
           t.is_keyword("static") || t.is_punct("*");
  }

  bool is_member_start(std::size_t name_start, const Frame& owner) const {
    if (name_start == 0) return false;
    const std::size_t before = name_start - 1;
    if (before == owner.open) return true;
    const Token& p = *sig_[before];
    if (owner.context == Context::object_literal) return p.is_punct(",");
    if (p.is_punct(";") || p.is_punct("}")) return true;
    // Class fields without semicolons: the member starts on a fresh line.
    return sig_[name_start]->line > p.line && p.kind != TokenKind::punctuator;
  }

  // Detects `name(...) {` at a member position inside an object or class
  // body. Returns the method kind, or nullopt.
  std::optional<ConstructKind> method_at(std::size_t i) const {
    if (!punct_at(i + 1, "(")) return std::nullopt;
    const Token& name = *sig_[i];
    // A computed name `[...]` still has its bracket frame on the stack.
    const std::size_t depth = name.is_punct("]") ? 2 : 1;
    if (stack_.size() < depth) return std::nullopt;
    const Frame& owner = stack_[stack_.size() - depth];
    if (owner.context != Context::object_literal && owner.context != Context::class_body) return std::nullopt;
    const std::size_t close = match_[i + 1];
    if (close == kNone || !punct_at(close + 1, "{")) return std::nullopt;
    std::size_t name_start = i;
    if (name.is_punct("]")) {
      if (match_[i] == kNone) return std::nullopt;
      name_start = match_[i];
    } else if (name.kind != TokenKind::identifier && name.kind != TokenKind::keyword &&
               name.kind != TokenKind::string && name.kind != TokenKind::number) {
      return std::nullopt;
    }
    bool accessor = false;
    std::size_t start = name_start;
    while (start > 0 && start - 1 != owner.open && is_modifier(*sig_[start - 1])) {
      const Token& m = *sig_[start - 1];
      if (m.lexeme == "get" || m.lexeme == "set") accessor = true;
      --start;
    }
    if (!is_member_start(start, owner)) return std::nullopt;
    return accessor ? ConstructKind::getter_setter : ConstructKind::method;
  }

  bool statement_position(std::size_t i) const {
    const Token* p = prev(i);
    if (!p) return true;
    if (p->is_punct(";") || p->is_punct("}")) return true;
    if (p->is_punct("{")) return innermost() == Context::block;
    return p->is_keyword("export") || p->is_keyword("default");
  }

  void on_function(std::size_t i) {
    std::size_t at = i;
    if (at > 0 && sig_[at - 1]->is(TokenKind::identifier, "async")) --at;
    emit(statement_position(at) ? ConstructKind::function_decl : ConstructKind::function_expr, i);
  }

  // Index of the `(` of a loop/if header, skipping `for await`.
  std::size_t header_paren(std::size_t i) const {
    std::size_t j = i + 1;
    if (tok(j) && tok(j)->is_keyword("await")) ++j;
    return punct_at(j, "(") ? j : kNone;
  }

  void on_for(std::size_t i) {
    const std::size_t open = header_paren(i);
    if (open == kNone || match_[open] == kNone) {
      error(sig_[i]->line, "malformed for header");
      emit(ConstructKind::for_, i);
      return;
    }
    int depth = 0;
    bool iterates = false;
    for (std::size_t k = open + 1; k < match_[open]; ++k) {
      const Token& t = *sig_[k];
      if (t.is_punct("(") || t.is_punct("[") || t.is_punct("{")) ++depth;
      else if (t.is_punct(")") || t.is_punct("]") || t.is_punct("}")) --depth;
      else if (depth == 0 && t.is_punct(";")) {
        emit(ConstructKind::for_, i);
        return;
      } else if (depth == 0 && (t.is_keyword("in") || t.is(TokenKind::identifier, "of"))) {
        iterates = true;
      }
    }
    emit(iterates ? ConstructKind::for_in_of : ConstructKind::for_, i);
  }

  void on_do(std::size_t i) {
    emit(ConstructKind::do_while, i);
    std::size_t tail = kNone;
    if (punct_at(i + 1, "{") && match_[i + 1] != kNone) {
      tail = match_[i + 1] + 1;
    } else {
      int depth = 0;
      for (std::size_t k = i + 1; k < sig_.size(); ++k) {
        const Token& t = *sig_[k];
        if (t.is_punct("(") || t.is_punct("[") || t.is_punct("{")) ++depth;
        else if (t.is_punct(")") || t.is_punct("]") || t.is_punct("}")) --depth;
        else if (depth == 0 && t.is_punct(";")) {
          tail = k + 1;
          break;
        }
      }
    }
    if (tok(tail) && tok(tail)->is_keyword("while")) do_tails_.insert(tail);
  }

  // `require('x')` / `import('x')`: literal argument at i+2 closed at i+3.
  std::optional<std::string> call_literal(std::size_t i) const {
    const Token* arg = tok(i + 2);
    if (!arg || !(punct_at(i + 3, ")") || punct_at(i + 3, ","))) return std::nullopt;
    return literal_value(*arg);
  }

  void on_require(std::size_t i) {
    if (!punct_at(i + 1, "(")) return;
    const Token* p = prev(i);
    if (p && (p->is_keyword("function") || p->is_keyword("const") || p->is_keyword("let") || p->is_keyword("var"))) return;
    if (auto spec = call_literal(i)) {
      emit(ConstructKind::require_call, i, std::move(spec));
    } else {
      error(sig_[i]->line, "require() with non-literal argument skipped");
    }
  }

  // Finds `from 'x'` after position i, balancing braces; stops at `;`.
  std::optional<std::string> from_clause(std::size_t i) const {
    int depth = 0;
    for (std::size_t k = i + 1; k < sig_.size() && k < i + kImportLookahead; ++k) {
      const Token& t = *sig_[k];
      if (t.is_punct("{")) ++depth;
      else if (t.is_punct("}")) --depth;
      else if (depth == 0 && t.is_punct(";")) return std::nullopt;
      else if (depth == 0 && t.is(TokenKind::identifier, "from") && tok(k + 1)) {
        if (auto v = literal_value(*tok(k + 1))) return v;
      }
      if (depth < 0) return std::nullopt;
    }
    return std::nullopt;
  }

  void on_import(std::size_t i) {
    const Token* next = tok(i + 1);
    if (!next) return;
    if (next->is_punct("(")) {
      if (auto spec = call_literal(i)) emit(ConstructKind::dynamic_import, i, std::move(spec));
      else error(sig_[i]->line, "import() with non-literal argument skipped");
      return;
    }
    if (next->is_punct(".")) return;  // import.meta
    if (next->kind == TokenKind::string) {
      emit(ConstructKind::import_decl, i, literal_value(*next));
      return;
    }
    if (auto spec = from_clause(i)) emit(ConstructKind::import_decl, i, std::move(spec));
    else error(sig_[i]->line, "import declaration without a literal source skipped");
  }

  void on_export(std::size_t i) {
    const Token* next = tok(i + 1);
    if (!next || !(next->is_punct("*") || next->is_punct("{"))) return;
    if (auto spec = from_clause(i)) emit(ConstructKind::export_from, i, std::move(spec));
  }

  void visit(std::size_t i) {
    const Token& t = *sig_[i];
    const bool words = t.kind == TokenKind::keyword || t.kind == TokenKind::identifier;

    if (auto method = method_at(i)) {
      emit(*method, i);
      push_or_pop(i);
      return;
    }
    if (words && (is_property_access(i) || is_object_key(i))) return;

    if (t.kind == TokenKind::keyword) {
      const std::string& w = t.lexeme;
      if (w == "function") on_function(i);
      else if (w == "class") {
        emit(ConstructKind::class_decl, i);
        class_pending_depth_ = stack_.size();
      } else if (w == "if") {
        const Token* p = prev(i);
        emit(p && p->is_keyword("else") ? ConstructKind::else_if : ConstructKind::if_, i);
      } else if (w == "for") on_for(i);
      else if (w == "while") {
        if (!do_tails_.count(i)) emit(ConstructKind::while_, i);
      } else if (w == "do") on_do(i);
      else if (w == "case") {
        emit(ConstructKind::case_clause, i);
        case_depth_ = stack_.size();
      } else if (w == "default") {
        if (punct_at(i + 1, ":")) case_depth_ = stack_.size();
      } else if (w == "catch") {
        const Token* p = prev(i);
        if (p && p->is_punct("}")) emit(ConstructKind::catch_clause, i);
      } else if (w == "import") on_import(i);
      else if (w == "export") on_export(i);
      return;
    }
    if (t.kind == TokenKind::identifier) {
      if (t.lexeme == "require") on_require(i);
      return;
    }
    if (t.kind == TokenKind::punctuator) {
      const std::string& s = t.lexeme;
      if (s == "=>") emit(ConstructKind::arrow_function, i);
      else if (s == "?") emit(ConstructKind::conditional_expr, i);
      else if (s == "&&") emit(ConstructKind::logical_and, i);
      else if (s == "||") emit(ConstructKind::logical_or, i);
      else if (s == "??") emit(ConstructKind::nullish_coalesce, i);
      else if (s == ":" && case_depth_ == stack_.size()) {
        case_colon_ = i;
        case_depth_ = kNone;
      }
      push_or_pop(i);
    }
  }
};

char unescape_char(char c) {
  switch (c) {
    case 'n': return '\n';
    case 't': return '\t';
    case 'r': return '\r';
    case 'b': return '\b';
    case 'f': return '\f';
    case 'v': return '\v';
    case '0': return '\0';
    default: return c;
  }
}

}  // namespace

std::string_view to_string(ConstructKind kind) {
  switch (kind) {
    case ConstructKind::function_decl: return "function-decl";
    case ConstructKind::function_expr: return "function-expr";
    case ConstructKind::arrow_function: return "arrow-function";
    case ConstructKind::method: return "method";
    case ConstructKind::getter_setter: return "getter-setter";
    case ConstructKind::class_decl: return "class-decl";
    case ConstructKind::if_: return "if";
    case ConstructKind::else_if: return "else-if";
    case ConstructKind::for_: return "for";
    case ConstructKind::for_in_of: return "for-in-of";
    case ConstructKind::while_: return "while";
    case ConstructKind::do_while: return "do-while";
    case ConstructKind::case_clause: return "case-clause";
    case ConstructKind::catch_clause: return "catch-clause";
    case ConstructKind::conditional_expr: return "conditional-expr";
    case ConstructKind::logical_and: return "logical-and";
    case ConstructKind::logical_or: return "logical-or";
    case ConstructKind::nullish_coalesce: return "nullish-coalesce";
    case ConstructKind::import_decl: return "import-decl";
    case ConstructKind::export_from: return "export-from";
    case ConstructKind::dynamic_import: return "dynamic-import";
    case ConstructKind::require_call: return "require-call";
  }
  return "unknown";
}

bool is_module_reference(ConstructKind kind) {
  return kind == ConstructKind::import_decl || kind == ConstructKind::export_from ||
         kind == ConstructKind::dynamic_import || kind == ConstructKind::require_call;
}

bool is_function(ConstructKind kind) {
  return kind == ConstructKind::function_decl || kind == ConstructKind::function_expr ||
         kind == ConstructKind::arrow_function || kind == ConstructKind::method ||
         kind == ConstructKind::getter_setter;
}

std::optional<std::string> literal_value(const lex::Token& token) {
  const std::string& s = token.lexeme;
  if (s.size() < 2) return std::nullopt;
  if (token.kind == TokenKind::string) {
    if (s.back() != s.front()) return std::nullopt;  // unterminated
  } else if (token.kind == TokenKind::template_part) {
    if (s.front() != '`' || s.back() != '`' || s.find("${") != std::string::npos) return std::nullopt;
  } else {
    return std::nullopt;
  }
  std::string out;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    if (s[i] == '\\' && i + 2 < s.size()) {
      out += unescape_char(s[++i]);
    } else {
      out += s[i];
    }
  }
  return out;
}

ParseOutcome scan_constructs(lex::TokenStream stream) {
  ParseOutcome out;
  out.errors = std::move(stream.errors);
  out.tokens = std::move(stream.tokens);
  Scanner(out.tokens).run(out);
  return out;
}

ParseOutcome scan_constructs(const std::vector<lex::Token>& tokens) {
  return scan_constructs(lex::TokenStream{tokens, {}});
}

ParseOutcome parse_source(std::string_view source) { return scan_constructs(lex::tokenize(source)); }

}  // namespace trivscan::scan

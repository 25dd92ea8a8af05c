#pragma once

#include <cctype>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "cdf/ast.hpp"

namespace cdf {

struct ParseError {
  enum class Kind {
    SyntaxError,
    UnboundVariable,
    ArityMismatch,
    DuplicateDefinition,
    UndefinedNonterminal,
    EmptySystem,
  };
  Kind kind = Kind::SyntaxError;
  std::string message;
  int line = 1;
  int col = 1;

  std::string to_string() const {
    const char* k = "syntax error";
    switch (kind) {
      case Kind::SyntaxError: k = "syntax error"; break;
      case Kind::UnboundVariable: k = "unbound variable"; break;
      case Kind::ArityMismatch: k = "arity mismatch"; break;
      case Kind::DuplicateDefinition: k = "duplicate definition"; break;
      case Kind::UndefinedNonterminal: k = "undefined nonterminal"; break;
      case Kind::EmptySystem: k = "empty system"; break;
    }
    return std::to_string(line) + ":" + std::to_string(col) + ": " + k + ": " +
           message;
  }
};

template <class T>
using ParseResult = std::variant<T, ParseError>;

namespace detail {

struct Token {
  enum class Kind { Ident, IntNum, RealNum, Op, End };
  Kind kind = Kind::End;
  std::string text;
  int line = 1;
  int col = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) {}

  Token next() {
    skip_ws();
    Token t;
    t.line = line_;
    t.col = col_;
    if (pos_ >= src_.size()) {
      t.kind = Token::Kind::End;
      return t;
    }
    char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      t.kind = Token::Kind::Ident;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
              src_[pos_] == '_'))
        t.text += advance();
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      bool real = false;
      while (pos_ < src_.size() &&
             std::isdigit(static_cast<unsigned char>(src_[pos_])))
        t.text += advance();
      if (pos_ < src_.size() && src_[pos_] == '.' && pos_ + 1 < src_.size() &&
          std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
        real = true;
        t.text += advance();
        while (pos_ < src_.size() &&
               std::isdigit(static_cast<unsigned char>(src_[pos_])))
          t.text += advance();
      }
      if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
        size_t save = pos_;
        std::string exp;
        exp += advance();
        if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-'))
          exp += advance();
        if (pos_ < src_.size() &&
            std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
          while (pos_ < src_.size() &&
                 std::isdigit(static_cast<unsigned char>(src_[pos_])))
            exp += advance();
          t.text += exp;
          real = true;
        } else {
          rewind(save);
        }
      }
      t.kind = real ? Token::Kind::RealNum : Token::Kind::IntNum;
      return t;
    }
    // Multi-char operators first.
    for (const char* op : {"<=", ">=", "!=", "≠", "≤", "≥"}) {
      size_t n = std::string(op).size();
      if (src_.compare(pos_, n, op) == 0) {
        t.kind = Token::Kind::Op;
        t.text = op;
        for (size_t i = 0; i < n; ++i) advance();
        // Normalize unicode comparison operators.
        if (t.text == "≠") t.text = "!=";
        if (t.text == "≤") t.text = "<=";
        if (t.text == "≥") t.text = ">=";
        return t;
      }
    }
    t.kind = Token::Kind::Op;
    t.text = advance();
    return t;
  }

 private:
  void skip_ws() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '#') {  // comment to end of line
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else {
        break;
      }
    }
  }

  char advance() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
      history_.push_back({line_, col_});
    } else {
      ++col_;
      history_.push_back({line_, col_});
    }
    return c;
  }

  void rewind(size_t to) {
    while (pos_ > to) {
      --pos_;
      history_.pop_back();
      if (!history_.empty()) {
        line_ = history_.back().first;
        col_ = history_.back().second;
      } else {
        line_ = 1;
        col_ = 1;
      }
    }
  }

  const std::string& src_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  std::vector<std::pair<int, int>> history_;
};

struct ParseFail {
  ParseError err;
};

class FunctionParser {
 public:
  explicit FunctionParser(const std::string& src) : lex_(src) { bump(); }

  FunctionDef parse_def() {
    FunctionDef f;
    f.name = expect_ident("function name");
    expect_op("(", "'(' after function name");
    f.params.push_back(expect_ident("parameter name"));
    while (at_op(",")) {
      bump();
      f.params.push_back(expect_ident("parameter name"));
    }
    expect_op(")", "')' after parameters");
    expect_op("=", "'=' after parameter list");
    f.body = parse_expr();
    if (cur_.kind != Token::Kind::End)
      fail(ParseError::Kind::SyntaxError,
           "unexpected trailing input '" + cur_.text + "'");
    validate(f);
    f.domain_tag = has_real_literal(f.body) ? Domain::Real : Domain::Integer;
    return f;
  }

 private:
  // expr := "if" cond "then" expr "else" expr | arith
  Expr parse_expr() {
    if (at_keyword("if")) {
      bump();
      Expr cond = parse_cond();
      if (!at_keyword("then"))
        fail(ParseError::Kind::SyntaxError, "expected 'then'");
      bump();
      Expr then_e = parse_expr();
      if (!at_keyword("else"))
        fail(ParseError::Kind::SyntaxError, "expected 'else'");
      bump();
      Expr else_e = parse_expr();
      return Expr::if_(std::move(cond), std::move(then_e), std::move(else_e));
    }
    return parse_arith();
  }

  // cond := arith (cmp arith)?   -- comparisons legal only here
  Expr parse_cond() {
    Expr lhs = parse_arith();
    static const std::pair<const char*, CmpOp> cmps[] = {
        {"=", CmpOp::Eq},  {"!=", CmpOp::Ne}, {"<=", CmpOp::Le},
        {">=", CmpOp::Ge}, {"<", CmpOp::Lt},  {">", CmpOp::Gt},
    };
    for (const auto& [txt, op] : cmps) {
      if (at_op(txt)) {
        bump();
        Expr rhs = parse_arith();
        return Expr::compare(op, std::move(lhs), std::move(rhs));
      }
    }
    fail(ParseError::Kind::SyntaxError, "expected comparison in condition");
    return lhs;  // unreachable
  }

  Expr parse_arith() { return parse_additive(); }

  Expr parse_additive() {
    Expr lhs = parse_term();
    while (true) {
      if (at_op("+")) {
        bump();
        lhs = Expr::binop(BinOp::Add, std::move(lhs), parse_term());
      } else if (at_op("-")) {
        bump();
        lhs = Expr::binop(BinOp::Sub, std::move(lhs), parse_term());
      } else {
        return lhs;
      }
    }
  }

  Expr parse_term() {
    Expr lhs = parse_unary();
    while (true) {
      if (at_op("*")) {
        bump();
        lhs = Expr::binop(BinOp::Mul, std::move(lhs), parse_unary());
      } else if (at_op("/")) {
        bump();
        lhs = Expr::binop(BinOp::Div, std::move(lhs), parse_unary());
      } else if (at_keyword("mod")) {
        bump();
        lhs = Expr::binop(BinOp::Mod, std::move(lhs), parse_unary());
      } else {
        return lhs;
      }
    }
  }

  Expr parse_unary() {
    if (at_op("-")) {
      bump();
      return Expr::neg(parse_unary());
    }
    return parse_power();
  }

  // Right-associative; the exponent may itself be negated.
  Expr parse_power() {
    Expr base = parse_atom();
    if (at_op("^")) {
      bump();
      return Expr::binop(BinOp::Pow, std::move(base), parse_unary());
    }
    return base;
  }

  Expr parse_atom() {
    if (at_op("(")) {
      bump();
      Expr e = parse_expr();
      expect_op(")", "')'");
      return e;
    }
    if (cur_.kind == Token::Kind::IntNum) {
      Expr e = Expr::int_lit(Int(cur_.text));
      bump();
      return e;
    }
    if (cur_.kind == Token::Kind::RealNum) {
      Expr e = Expr::real_lit(std::strtod(cur_.text.c_str(), nullptr));
      bump();
      return e;
    }
    if (cur_.kind == Token::Kind::Ident) {
      if (cur_.text == "if" || cur_.text == "then" || cur_.text == "else" ||
          cur_.text == "mod")
        fail(ParseError::Kind::SyntaxError,
             "unexpected keyword '" + cur_.text + "'");
      std::string name = cur_.text;
      bump();
      if (at_op("(")) {
        bump();
        std::vector<Expr> args;
        if (!at_op(")")) {
          args.push_back(parse_expr());
          while (at_op(",")) {
            bump();
            args.push_back(parse_expr());
          }
        }
        expect_op(")", "')' after call arguments");
        return Expr::call(std::move(name), std::move(args));
      }
      return Expr::var(std::move(name));
    }
    fail(ParseError::Kind::SyntaxError, "unexpected '" + cur_.text + "'");
    return Expr::int_lit(0);  // unreachable
  }

  void validate(const FunctionDef& f) {
    std::set<std::string> params(f.params.begin(), f.params.end());
    if (params.size() != f.params.size())
      fail(ParseError::Kind::DuplicateDefinition,
           "duplicate parameter name in '" + f.name + "'");
    check_bindings(f, f.body, params);
  }

  void check_bindings(const FunctionDef& f, const Expr& e,
                      const std::set<std::string>& params) {
    if (e.kind == Expr::Kind::Var) {
      if (!params.count(e.name))
        fail(ParseError::Kind::UnboundVariable,
             "variable '" + e.name + "' is not a parameter");
    } else if (e.kind == Expr::Kind::Call) {
      if (e.name != f.name)
        fail(ParseError::Kind::UnboundVariable,
             "call to undefined function '" + e.name + "'");
      if (e.children.size() != f.params.size())
        fail(ParseError::Kind::ArityMismatch,
             "call to '" + e.name + "' with " +
                 std::to_string(e.children.size()) + " argument(s), expected " +
                 std::to_string(f.params.size()));
    }
    for (const auto& c : e.children) check_bindings(f, c, params);
  }

  static bool has_real_literal(const Expr& e) {
    if (e.kind == Expr::Kind::RealLit) return true;
    for (const auto& c : e.children)
      if (has_real_literal(c)) return true;
    return false;
  }

  bool at_op(const std::string& t) const {
    return cur_.kind == Token::Kind::Op && cur_.text == t;
  }
  bool at_keyword(const std::string& t) const {
    return cur_.kind == Token::Kind::Ident && cur_.text == t;
  }

  std::string expect_ident(const std::string& what) {
    if (cur_.kind != Token::Kind::Ident)
      fail(ParseError::Kind::SyntaxError, "expected " + what);
    std::string t = cur_.text;
    bump();
    return t;
  }

  void expect_op(const std::string& op, const std::string& what) {
    if (!at_op(op)) fail(ParseError::Kind::SyntaxError, "expected " + what);
    bump();
  }

  [[noreturn]] void fail(ParseError::Kind kind, const std::string& msg) {
    throw ParseFail{ParseError{kind, msg, cur_.line, cur_.col}};
  }

  void bump() { cur_ = lex_.next(); }

  Lexer lex_;
  Token cur_;
};

}  // namespace detail

/// Parse one function definition, e.g. `f(n) = if n = 0 then 1 else n * f(n - 1)`.
/// The domain tag is Real iff the body contains a real literal.
inline ParseResult<FunctionDef> parse_function(const std::string& text) {
  try {
    detail::FunctionParser p(text);
    return p.parse_def();
  } catch (const detail::ParseFail& f) {
    return f.err;
  } catch (const std::exception& e) {
    return ParseError{ParseError::Kind::SyntaxError, e.what(), 1, 1};
  }
}

/// Parse a rewrite system, one rule per line:
///   Nonterminal -> sym sym ... | sym ... | ...
/// Terminals are double-quoted ("" is the empty string); bare identifiers are
/// nonterminals. The first rule's left-hand side is the start symbol.
inline ParseResult<RewriteSystem> parse_rewrite_system(const std::string& text) {
  RewriteSystem g;
  int line_no = 0;
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find('\n', start);
    std::string line = text.substr(
        start, end == std::string::npos ? std::string::npos : end - start);
    start = end == std::string::npos ? text.size() + 1 : end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    // Strip comments.
    if (size_t h = line.find('#'); h != std::string::npos) line = line.substr(0, h);
    bool blank = line.find_first_not_of(" \t") == std::string::npos;
    if (blank) continue;

    size_t arrow = line.find("->");
    if (arrow == std::string::npos)
      return ParseError{ParseError::Kind::SyntaxError, "expected '->' in rule",
                        line_no, 1};
    std::string lhs = line.substr(0, arrow);
    // trim
    size_t a = lhs.find_first_not_of(" \t");
    size_t b = lhs.find_last_not_of(" \t");
    if (a == std::string::npos)
      return ParseError{ParseError::Kind::SyntaxError,
                        "missing nonterminal before '->'", line_no, 1};
    lhs = lhs.substr(a, b - a + 1);
    for (char c : lhs)
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_'))
        return ParseError{ParseError::Kind::SyntaxError,
                          "invalid nonterminal name '" + lhs + "'", line_no,
                          static_cast<int>(a) + 1};
    if (g.find(lhs))
      return ParseError{ParseError::Kind::DuplicateDefinition,
                        "nonterminal '" + lhs + "' already defined", line_no, 1};

    std::vector<std::vector<Symbol>> alts;
    std::vector<Symbol> cur;
    size_t i = arrow + 2;
    auto col = [&](size_t p) { return static_cast<int>(p) + 1; };
    while (i < line.size()) {
      char c = line[i];
      if (c == ' ' || c == '\t') {
        ++i;
      } else if (c == '|') {
        alts.push_back(cur);
        cur.clear();
        ++i;
      } else if (c == '"') {
        size_t close = line.find('"', i + 1);
        if (close == std::string::npos)
          return ParseError{ParseError::Kind::SyntaxError,
                            "unterminated terminal", line_no, col(i)};
        std::string t = line.substr(i + 1, close - i - 1);
        // The empty terminal "" is epsilon: it contributes no symbol.
        if (!t.empty()) cur.push_back(Symbol{t, true});
        i = close + 1;
      } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
        size_t j = i;
        while (j < line.size() &&
               (std::isalnum(static_cast<unsigned char>(line[j])) ||
                line[j] == '_'))
          ++j;
        cur.push_back(Symbol{line.substr(i, j - i), false});
        i = j;
      } else {
        return ParseError{ParseError::Kind::SyntaxError,
                          std::string("unexpected character '") + c + "'",
                          line_no, col(i)};
      }
    }
    alts.push_back(cur);
    g.rules.emplace_back(lhs, std::move(alts));
  }

  if (g.rules.empty())
    return ParseError{ParseError::Kind::EmptySystem, "no rules", 1, 1};
  g.start_symbol = g.rules.front().first;

  for (const auto& [name, alts] : g.rules)
    for (const auto& alt : alts)
      for (const auto& sym : alt)
        if (!sym.terminal && !g.find(sym.text))
          return ParseError{ParseError::Kind::UndefinedNonterminal,
                            "nonterminal '" + sym.text + "' has no rule", 1, 1};
  return g;
}

/// Heuristic used by the CLI: a `->` outside quotes marks a rewrite system.
inline bool looks_like_rewrite_system(const std::string& text) {
  bool in_quotes = false;
  for (size_t i = 0; i + 1 < text.size(); ++i) {
    if (text[i] == '"') in_quotes = !in_quotes;
    if (!in_quotes && text[i] == '-' && text[i + 1] == '>') return true;
  }
  return false;
}

}  // namespace cdf

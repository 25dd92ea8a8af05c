#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "cdf/value.hpp"

namespace cdf {

enum class BinOp { Add, Sub, Mul, Div, Mod, Pow };
enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };

inline const char* binop_name(BinOp op) {
  switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "/";
    case BinOp::Mod: return "mod";
    case BinOp::Pow: return "^";
  }
  return "?";
}

inline const char* cmpop_name(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return "=";
    case CmpOp::Ne: return "!=";
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
  }
  return "?";
}

/// One node of an expression tree. A flat tagged struct rather than a class
/// hierarchy; children are owned by value, so the tree is finite and acyclic
/// by construction.
struct Expr {
  enum class Kind { IntLit, RealLit, Var, BinOp, Compare, If, Call, Neg };

  Kind kind = Kind::IntLit;
  Int int_val;           // IntLit
  double real_val = 0;   // RealLit
  std::string name;      // Var, Call
  BinOp bin_op = BinOp::Add;
  CmpOp cmp_op = CmpOp::Eq;
  // BinOp/Compare: {lhs, rhs}; If: {cond, then, else}; Call: args; Neg: {operand}
  std::vector<Expr> children;

  static Expr int_lit(Int v) {
    Expr e;
    e.kind = Kind::IntLit;
    e.int_val = std::move(v);
    return e;
  }
  static Expr real_lit(double v) {
    Expr e;
    e.kind = Kind::RealLit;
    e.real_val = v;
    return e;
  }
  static Expr var(std::string n) {
    Expr e;
    e.kind = Kind::Var;
    e.name = std::move(n);
    return e;
  }
  static Expr binop(BinOp op, Expr lhs, Expr rhs) {
    Expr e;
    e.kind = Kind::BinOp;
    e.bin_op = op;
    e.children = {std::move(lhs), std::move(rhs)};
    return e;
  }
  static Expr compare(CmpOp op, Expr lhs, Expr rhs) {
    Expr e;
    e.kind = Kind::Compare;
    e.cmp_op = op;
    e.children = {std::move(lhs), std::move(rhs)};
    return e;
  }
  static Expr if_(Expr cond, Expr then_e, Expr else_e) {
    Expr e;
    e.kind = Kind::If;
    e.children = {std::move(cond), std::move(then_e), std::move(else_e)};
    return e;
  }
  static Expr call(std::string n, std::vector<Expr> args) {
    Expr e;
    e.kind = Kind::Call;
    e.name = std::move(n);
    e.children = std::move(args);
    return e;
  }
  static Expr neg(Expr operand) {
    Expr e;
    e.kind = Kind::Neg;
    e.children = {std::move(operand)};
    return e;
  }

  bool operator==(const Expr& o) const {
    if (kind != o.kind) return false;
    switch (kind) {
      case Kind::IntLit: return int_val == o.int_val;
      case Kind::RealLit: return real_val == o.real_val;
      case Kind::Var: return name == o.name;
      case Kind::BinOp:
        if (bin_op != o.bin_op) return false;
        break;
      case Kind::Compare:
        if (cmp_op != o.cmp_op) return false;
        break;
      case Kind::Call:
        if (name != o.name) return false;
        break;
      default: break;
    }
    return children == o.children;
  }
};

/// A single self-recursive function definition `name(params...) = body`.
struct FunctionDef {
  std::string name;
  std::vector<std::string> params;
  Expr body;
  Domain domain_tag = Domain::Integer;

  bool is_unary() const { return params.size() == 1; }

  /// True when the body contains a call to the function itself.
  bool is_recursive() const { return contains_self_call(body); }

 private:
  bool contains_self_call(const Expr& e) const {
    if (e.kind == Expr::Kind::Call && e.name == name) return true;
    for (const auto& c : e.children)
      if (contains_self_call(c)) return true;
    return false;
  }
};

/// One symbol of a sentential form.
struct Symbol {
  std::string text;
  bool terminal = false;

  bool operator==(const Symbol&) const = default;
};

/// A nondeterministic rewrite system: ordered alternatives per nonterminal.
struct RewriteSystem {
  std::string start_symbol;
  // Insertion-ordered rule list plus a lookup index.
  std::vector<std::pair<std::string, std::vector<std::vector<Symbol>>>> rules;

  const std::vector<std::vector<Symbol>>* find(const std::string& nt) const {
    for (const auto& [name, alts] : rules)
      if (name == nt) return &alts;
    return nullptr;
  }
};

// ---- Pretty printing (round-trips through the parser) ----

namespace detail {

// Precedence levels: 0 compare, 1 add/sub, 2 mul/div/mod, 3 unary neg, 4 pow.
inline int precedence(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Compare: return 0;
    case Expr::Kind::BinOp:
      switch (e.bin_op) {
        case BinOp::Add:
        case BinOp::Sub: return 1;
        case BinOp::Mul:
        case BinOp::Div:
        case BinOp::Mod: return 2;
        case BinOp::Pow: return 4;
      }
      return 1;
    case Expr::Kind::Neg: return 3;
    case Expr::Kind::If: return -1;
    default: return 100;
  }
}

inline void print_expr(const Expr& e, int parent_prec, std::string& out) {
  int prec = precedence(e);
  bool paren = prec < parent_prec;
  if (paren) out += "(";
  switch (e.kind) {
    case Expr::Kind::IntLit:
      out += e.int_val.get_str();
      break;
    case Expr::Kind::RealLit: {
      std::string s = Value::format_real(e.real_val);
      out += s;
      // Keep the literal recognizably real so re-parsing preserves the domain.
      if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
          s.find("inf") == std::string::npos && s.find("nan") == std::string::npos)
        out += ".0";
      break;
    }
    case Expr::Kind::Var:
      out += e.name;
      break;
    case Expr::Kind::BinOp: {
      // Left-associative except pow (right-associative).
      bool right_assoc = e.bin_op == BinOp::Pow;
      print_expr(e.children[0], right_assoc ? prec + 1 : prec, out);
      out += " ";
      out += binop_name(e.bin_op);
      out += " ";
      print_expr(e.children[1], right_assoc ? prec : prec + 1, out);
      break;
    }
    case Expr::Kind::Compare:
      print_expr(e.children[0], 1, out);
      out += " ";
      out += cmpop_name(e.cmp_op);
      out += " ";
      print_expr(e.children[1], 1, out);
      break;
    case Expr::Kind::If:
      out += "if ";
      print_expr(e.children[0], 0, out);
      out += " then ";
      print_expr(e.children[1], 0, out);
      out += " else ";
      print_expr(e.children[2], 0, out);
      break;
    case Expr::Kind::Call: {
      out += e.name;
      out += "(";
      for (size_t i = 0; i < e.children.size(); ++i) {
        if (i) out += ", ";
        print_expr(e.children[i], 0, out);
      }
      out += ")";
      break;
    }
    case Expr::Kind::Neg:
      out += "-";
      print_expr(e.children[0], prec + 1, out);
      break;
  }
  if (paren) out += ")";
}

}  // namespace detail

inline std::string to_string(const Expr& e) {
  std::string out;
  detail::print_expr(e, -1, out);
  return out;
}

inline std::string to_string(const FunctionDef& f) {
  std::string out = f.name + "(";
  for (size_t i = 0; i < f.params.size(); ++i) {
    if (i) out += ", ";
    out += f.params[i];
  }
  out += ") = ";
  out += to_string(f.body);
  return out;
}

inline std::string to_string(const std::vector<Symbol>& form) {
  std::string out;
  for (size_t i = 0; i < form.size(); ++i) {
    if (i) out += " ";
    if (form[i].terminal) {
      out += "\"" + form[i].text + "\"";
    } else {
      out += form[i].text;
    }
  }
  if (out.empty()) out = "ε";
  return out;
}

}  // namespace cdf

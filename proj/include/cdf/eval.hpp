#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "cdf/ast.hpp"
#include "cdf/value.hpp"

namespace cdf {

/// Resource limits standing in for undecidable halting questions.
struct Budget {
  std::uint64_t max_call_depth = 10'000;
  std::uint64_t max_eval_steps = 1'000'000;
  double magnitude_bound = 1e12;  // Real domain only

  bool valid() const {
    return max_call_depth > 0 && max_eval_steps > 0 && magnitude_bound > 0;
  }
};

struct EvalError {
  enum class Kind {
    DepthExceeded,
    StepsExceeded,
    MagnitudeExceeded,
    DivisionByZero,
    DomainMismatch,
  };
  Kind kind = Kind::DepthExceeded;
  std::string message;

  const char* name() const {
    switch (kind) {
      case Kind::DepthExceeded: return "DepthExceeded";
      case Kind::StepsExceeded: return "StepsExceeded";
      case Kind::MagnitudeExceeded: return "MagnitudeExceeded";
      case Kind::DivisionByZero: return "DivisionByZero";
      case Kind::DomainMismatch: return "DomainMismatch";
    }
    return "?";
  }
};

/// One node of a computation tree. CallNode children are the recursive calls
/// made while evaluating the body, in evaluation order.
struct DerivTree {
  enum class Kind { CallNode, OpNode, LeafNode };
  Kind kind = Kind::LeafNode;
  std::string function;  // CallNode
  Value argument;        // CallNode
  std::string op;        // OpNode
  Value result;
  std::vector<DerivTree> children;

  static DerivTree leaf(Value v) {
    DerivTree t;
    t.kind = Kind::LeafNode;
    t.result = std::move(v);
    return t;
  }

  std::string label() const {
    switch (kind) {
      case Kind::CallNode:
        return function + "(" + argument.str() + ")=" + result.str();
      case Kind::OpNode:
        return op + "=" + result.str();
      case Kind::LeafNode:
        return result.str();
    }
    return "";
  }
};

/// Ordered-labeled-tree equality (same kinds, labels, results, child order).
inline bool same_structure(const DerivTree& a, const DerivTree& b) {
  if (a.kind != b.kind || !(a.result == b.result)) return false;
  if (a.kind == DerivTree::Kind::CallNode &&
      (a.function != b.function || !(a.argument == b.argument)))
    return false;
  if (a.kind == DerivTree::Kind::OpNode && a.op != b.op) return false;
  if (a.children.size() != b.children.size()) return false;
  for (size_t i = 0; i < a.children.size(); ++i)
    if (!same_structure(a.children[i], b.children[i])) return false;
  return true;
}

struct TreeMetrics {
  std::uint64_t depth = 0;
  std::uint64_t node_count = 0;
  std::uint64_t max_branching = 0;
};

/// depth = nodes on the longest root-to-leaf path; max_branching = most
/// CallNode children under any single CallNode.
inline TreeMetrics tree_metrics(const DerivTree& t) {
  TreeMetrics m;
  m.node_count = 1;
  std::uint64_t deepest_child = 0;
  std::uint64_t call_children = 0;
  for (const auto& c : t.children) {
    TreeMetrics cm = tree_metrics(c);
    m.node_count += cm.node_count;
    deepest_child = std::max(deepest_child, cm.depth);
    m.max_branching = std::max(m.max_branching, cm.max_branching);
    if (c.kind == DerivTree::Kind::CallNode) ++call_children;
  }
  if (t.kind == DerivTree::Kind::CallNode)
    m.max_branching = std::max(m.max_branching, call_children);
  m.depth = deepest_child + 1;
  return m;
}

/// Evaluation statistics returned alongside each result.
struct EvalStats {
  std::uint64_t steps = 0;      // Expr nodes visited
  std::uint64_t max_depth = 0;  // deepest call nesting reached
};

struct EvalOutcome {
  std::variant<Value, EvalError> result;
  EvalStats stats;

  bool ok() const { return std::holds_alternative<Value>(result); }
  const Value& value() const { return std::get<Value>(result); }
  const EvalError& error() const { return std::get<EvalError>(result); }
};

struct TraceOutcome {
  std::variant<DerivTree, EvalError> result;
  EvalStats stats;

  bool ok() const { return std::holds_alternative<DerivTree>(result); }
  const DerivTree& tree() const { return std::get<DerivTree>(result); }
  const EvalError& error() const { return std::get<EvalError>(result); }
};

namespace detail {

struct EvalAbort {
  EvalError err;
};

class Interp {
 public:
  Interp(const FunctionDef& f, const Budget& budget, bool trace, bool memo)
      : f_(f), budget_(budget), trace_(trace), memo_(memo) {}

  Value run_call(const std::vector<Value>& args, std::uint64_t depth,
                 std::vector<DerivTree>* parent_calls) {
    if (depth > budget_.max_call_depth)
      throw EvalAbort{{EvalError::Kind::DepthExceeded,
                       "call depth exceeded " +
                           std::to_string(budget_.max_call_depth)}};
    stats_.max_depth = std::max(stats_.max_depth, depth);

    if (memo_ && args.size() == 1) {
      auto it = memo_table_.find(args[0]);
      if (it != memo_table_.end()) {
        if (parent_calls) record_call(args, it->second, *parent_calls, {});
        return it->second;
      }
    }

    std::vector<DerivTree> my_calls;
    Value result = eval(f_.body, args, depth,
                        trace_ ? &my_calls : nullptr);
    if (memo_ && args.size() == 1) memo_table_.emplace(args[0], result);
    if (parent_calls) record_call(args, result, *parent_calls, std::move(my_calls));
    return result;
  }

  const EvalStats& stats() const { return stats_; }

 private:
  void record_call(const std::vector<Value>& args, const Value& result,
                   std::vector<DerivTree>& into,
                   std::vector<DerivTree> children) {
    DerivTree node;
    node.kind = DerivTree::Kind::CallNode;
    node.function = f_.name;
    node.argument = args.empty() ? Value() : args[0];
    node.result = result;
    node.children = std::move(children);
    into.push_back(std::move(node));
  }

  Value eval(const Expr& e, const std::vector<Value>& args, std::uint64_t depth,
             std::vector<DerivTree>* calls) {
    if (++stats_.steps > budget_.max_eval_steps)
      throw EvalAbort{{EvalError::Kind::StepsExceeded,
                       "step budget exceeded " +
                           std::to_string(budget_.max_eval_steps)}};
    switch (e.kind) {
      case Expr::Kind::IntLit:
        return f_.domain_tag == Domain::Real ? Value(e.int_val.get_d())
                                             : Value(e.int_val);
      case Expr::Kind::RealLit:
        return Value(e.real_val);
      case Expr::Kind::Var: {
        for (size_t i = 0; i < f_.params.size(); ++i)
          if (f_.params[i] == e.name) return args[i];
        throw EvalAbort{{EvalError::Kind::DomainMismatch,
                         "unbound variable '" + e.name + "'"}};
      }
      case Expr::Kind::Neg: {
        Value v = eval(e.children[0], args, depth, calls);
        return v.is_int() ? Value(Int(-v.as_int())) : check(Value(-v.as_real()));
      }
      case Expr::Kind::BinOp: {
        Value a = eval(e.children[0], args, depth, calls);
        Value b = eval(e.children[1], args, depth, calls);
        return apply_binop(e.bin_op, a, b);
      }
      case Expr::Kind::Compare:
        // The type invariant keeps Compare inside If conditions.
        throw EvalAbort{{EvalError::Kind::DomainMismatch,
                         "comparison outside condition position"}};
      case Expr::Kind::If: {
        bool c = eval_cond(e.children[0], args, depth, calls);
        return eval(e.children[c ? 1 : 2], args, depth, calls);
      }
      case Expr::Kind::Call: {
        std::vector<Value> call_args;
        call_args.reserve(e.children.size());
        for (const auto& a : e.children)
          call_args.push_back(eval(a, args, depth, calls));
        return run_call(call_args, depth + 1, calls);
      }
    }
    throw EvalAbort{{EvalError::Kind::DomainMismatch, "unreachable"}};
  }

  bool eval_cond(const Expr& e, const std::vector<Value>& args,
                 std::uint64_t depth, std::vector<DerivTree>* calls) {
    if (e.kind != Expr::Kind::Compare)
      throw EvalAbort{{EvalError::Kind::DomainMismatch,
                       "condition is not a comparison"}};
    Value a = eval(e.children[0], args, depth, calls);
    Value b = eval(e.children[1], args, depth, calls);
    int cmp;
    if (a.is_int() && b.is_int())
      cmp = ::cmp(a.as_int(), b.as_int());
    else
      cmp = a.to_double() < b.to_double()   ? -1
            : a.to_double() > b.to_double() ? 1
                                            : 0;
    switch (e.cmp_op) {
      case CmpOp::Eq: return cmp == 0;
      case CmpOp::Ne: return cmp != 0;
      case CmpOp::Lt: return cmp < 0;
      case CmpOp::Le: return cmp <= 0;
      case CmpOp::Gt: return cmp > 0;
      case CmpOp::Ge: return cmp >= 0;
    }
    return false;
  }

  Value apply_binop(BinOp op, const Value& a, const Value& b) {
    if (a.is_int() && b.is_int()) {
      const Int& x = a.as_int();
      const Int& y = b.as_int();
      switch (op) {
        case BinOp::Add: return Value(Int(x + y));
        case BinOp::Sub: return Value(Int(x - y));
        case BinOp::Mul: return Value(Int(x * y));
        case BinOp::Div: {
          if (y == 0)
            throw EvalAbort{{EvalError::Kind::DivisionByZero, "division by zero"}};
          Int q;
          mpz_fdiv_q(q.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t());  // floor
          return Value(q);
        }
        case BinOp::Mod: {
          if (y == 0)
            throw EvalAbort{{EvalError::Kind::DivisionByZero, "mod zero"}};
          Int r;
          // Floor convention: result takes the sign of the divisor.
          mpz_fdiv_r(r.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t());
          return Value(r);
        }
        case BinOp::Pow: {
          if (y < 0)
            throw EvalAbort{{EvalError::Kind::DomainMismatch,
                             "negative integer exponent"}};
          if (!y.fits_ulong_p())
            throw EvalAbort{{EvalError::Kind::MagnitudeExceeded,
                             "exponent too large"}};
          Int r;
          mpz_pow_ui(r.get_mpz_t(), x.get_mpz_t(), y.get_ui());
          return Value(r);
        }
      }
    }
    double x = a.to_double();
    double y = b.to_double();
    switch (op) {
      case BinOp::Add: return check(Value(x + y));
      case BinOp::Sub: return check(Value(x - y));
      case BinOp::Mul: return check(Value(x * y));
      case BinOp::Div:
        if (y == 0)
          throw EvalAbort{{EvalError::Kind::DivisionByZero, "division by zero"}};
        return check(Value(x / y));
      case BinOp::Mod:
        if (y == 0)
          throw EvalAbort{{EvalError::Kind::DivisionByZero, "mod zero"}};
        return check(Value(std::fmod(x, y)));
      case BinOp::Pow: return check(Value(std::pow(x, y)));
    }
    throw EvalAbort{{EvalError::Kind::DomainMismatch, "unreachable"}};
  }

  // Real-domain overflow guard; exact integers are never bounded.
  Value check(Value v) {
    if (v.is_real() &&
        (!std::isfinite(v.as_real()) ||
         std::fabs(v.as_real()) > budget_.magnitude_bound))
      throw EvalAbort{{EvalError::Kind::MagnitudeExceeded,
                       "|value| exceeds magnitude bound"}};
    return v;
  }

  const FunctionDef& f_;
  const Budget& budget_;
  bool trace_;
  bool memo_;
  EvalStats stats_;
  std::map<Value, Value> memo_table_;
};

}  // namespace detail

/// Evaluate f(arg). Tracing is off; every recursive call is re-evaluated.
inline EvalOutcome evaluate(const FunctionDef& f, const Value& arg,
                            const Budget& budget = {}) {
  if (!f.is_unary())
    return {EvalError{EvalError::Kind::DomainMismatch,
                      "analysis entry point requires a unary function"},
            {}};
  if ((f.domain_tag == Domain::Integer) != arg.is_int())
    return {EvalError{EvalError::Kind::DomainMismatch,
                      "argument domain does not match function domain"},
            {}};
  detail::Interp interp(f, budget, /*trace=*/false, /*memo=*/false);
  try {
    Value v = interp.run_call({arg}, 1, nullptr);
    if (v.is_real() && std::fabs(v.as_real()) > budget.magnitude_bound)
      return {EvalError{EvalError::Kind::MagnitudeExceeded,
                        "|result| exceeds magnitude bound"},
              interp.stats()};
    return {v, interp.stats()};
  } catch (const detail::EvalAbort& a) {
    return {a.err, interp.stats()};
  }
}

/// Evaluate f(arg) recording the computation tree: one CallNode per call,
/// children are the recursive calls made by that call's body.
inline TraceOutcome evaluate_traced(const FunctionDef& f, const Value& arg,
                                    const Budget& budget = {}) {
  if (!f.is_unary())
    return {EvalError{EvalError::Kind::DomainMismatch,
                      "analysis entry point requires a unary function"},
            {}};
  if ((f.domain_tag == Domain::Integer) != arg.is_int())
    return {EvalError{EvalError::Kind::DomainMismatch,
                      "argument domain does not match function domain"},
            {}};
  detail::Interp interp(f, budget, /*trace=*/true, /*memo=*/false);
  try {
    std::vector<DerivTree> roots;
    interp.run_call({arg}, 1, &roots);
    return {std::move(roots.front()), interp.stats()};
  } catch (const detail::EvalAbort& a) {
    return {a.err, interp.stats()};
  }
}

/// Memoized evaluation; reference timings for the growth fitter only. Node
/// counts differ from the traced semantics, so this never feeds a trace.
inline EvalOutcome evaluate_memoized(const FunctionDef& f, const Value& arg,
                                     const Budget& budget = {}) {
  detail::Interp interp(f, budget, /*trace=*/false, /*memo=*/true);
  try {
    Value v = interp.run_call({arg}, 1, nullptr);
    return {v, interp.stats()};
  } catch (const detail::EvalAbort& a) {
    return {a.err, interp.stats()};
  }
}

}  // namespace cdf

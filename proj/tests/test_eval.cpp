#include <doctest.h>

#include "cdf/eval.hpp"
#include "cdf/parse.hpp"

using namespace cdf;

namespace {

FunctionDef fn(const std::string& text) {
  auto r = parse_function(text);
  REQUIRE(std::holds_alternative<FunctionDef>(r));
  return std::get<FunctionDef>(r);
}

const FunctionDef& factorial() {
  static FunctionDef f = fn("f(n) = if n = 0 then 1 else n * f(n - 1)");
  return f;
}

const FunctionDef& fib() {
  static FunctionDef f = fn("fib(n) = if n < 2 then n else fib(n - 1) + fib(n - 2)");
  return f;
}

// Independent iterative Fibonacci oracle.
Int fib_oracle(long n) {
  Int a = 0, b = 1;
  for (long i = 0; i < n; ++i) {
    Int next = a + b;
    a = b;
    b = next;
  }
  return a;
}

// Independent call counter: recursively count fib call instances.
long fib_call_count(long n) {
  if (n < 2) return 1;
  return 1 + fib_call_count(n - 1) + fib_call_count(n - 2);
}

long count_call_nodes(const DerivTree& t) {
  long c = t.kind == DerivTree::Kind::CallNode ? 1 : 0;
  for (const auto& child : t.children) c += count_call_nodes(child);
  return c;
}

}  // namespace

TEST_CASE("factorial(3) = 6") {
  EvalOutcome out = evaluate(factorial(), Value(Int(3)));
  REQUIRE(out.ok());
  CHECK(out.value().as_int() == 6);
}

TEST_CASE("identity returns its argument") {
  EvalOutcome out = evaluate(fn("f(x) = x"), Value(Int(42)));
  REQUIRE(out.ok());
  CHECK(out.value().as_int() == 42);
}

TEST_CASE("fib(10) = 55 against the iterative oracle") {
  EvalOutcome out = evaluate(fib(), Value(Int(10)));
  REQUIRE(out.ok());
  CHECK(out.value().as_int() == 55);
  CHECK(out.value().as_int() == fib_oracle(10));
}

TEST_CASE("exact big-integer arithmetic: factorial(25)") {
  EvalOutcome out = evaluate(factorial(), Value(Int(25)));
  REQUIRE(out.ok());
  CHECK(out.value().as_int().get_str() == "15511210043330985984000000");
}

TEST_CASE("traced factorial(3): linear call chain, root result 6") {
  TraceOutcome out = evaluate_traced(factorial(), Value(Int(3)));
  REQUIRE(out.ok());
  const DerivTree& t = out.tree();
  CHECK(t.kind == DerivTree::Kind::CallNode);
  CHECK(t.argument.as_int() == 3);
  CHECK(t.result.as_int() == 6);
  TreeMetrics m = tree_metrics(t);
  CHECK(m.depth == 4);  // f(3) -> f(2) -> f(1) -> f(0)
  CHECK(m.node_count == 4);
  CHECK(m.max_branching == 1);
  // walk the chain
  const DerivTree* cur = &t;
  for (long expect = 3; expect >= 0; --expect) {
    CHECK(cur->argument.as_int() == expect);
    if (expect > 0) {
      REQUIRE(cur->children.size() == 1);
      cur = &cur->children[0];
    } else {
      CHECK(cur->children.empty());
    }
  }
}

TEST_CASE("traced factorial(0): single node, no recursive children") {
  TraceOutcome out = evaluate_traced(factorial(), Value(Int(0)));
  REQUIRE(out.ok());
  CHECK(out.tree().result.as_int() == 1);
  CHECK(out.tree().children.empty());
  CHECK(tree_metrics(out.tree()).node_count == 1);
}

TEST_CASE("traced fib(5): 15 call nodes, branching 2, root result 5") {
  TraceOutcome out = evaluate_traced(fib(), Value(Int(5)));
  REQUIRE(out.ok());
  CHECK(out.tree().result.as_int() == 5);
  CHECK(count_call_nodes(out.tree()) == 15);
  CHECK(count_call_nodes(out.tree()) == fib_call_count(5));
  CHECK(tree_metrics(out.tree()).max_branching == 2);
}

TEST_CASE("tree_metrics on a bare leaf") {
  TreeMetrics m = tree_metrics(DerivTree::leaf(Value(Int(7))));
  CHECK(m.depth == 1);
  CHECK(m.node_count == 1);
  CHECK(m.max_branching == 0);
}

TEST_CASE("factorial chain shape for n in 0..12") {
  for (long n = 0; n <= 12; ++n) {
    TraceOutcome out = evaluate_traced(factorial(), Value(Int(n)));
    REQUIRE(out.ok());
    TreeMetrics m = tree_metrics(out.tree());
    CHECK(m.depth == static_cast<std::uint64_t>(n) + 1);
    CHECK(m.max_branching <= 1);
  }
}

TEST_CASE("trace/value coherence") {
  for (long n : {0L, 1L, 5L, 9L}) {
    EvalOutcome plain = evaluate(fib(), Value(Int(n)));
    TraceOutcome traced = evaluate_traced(fib(), Value(Int(n)));
    REQUIRE(plain.ok());
    REQUIRE(traced.ok());
    CHECK(plain.value() == traced.tree().result);
    CHECK(plain.stats.steps == traced.stats.steps);
  }
}

TEST_CASE("budget monotonicity") {
  Budget small{20, 2'000, 1e12};
  EvalOutcome a = evaluate(fib(), Value(Int(8)), small);
  REQUIRE(a.ok());
  Budget big{10'000, 1'000'000, 1e15};
  EvalOutcome b = evaluate(fib(), Value(Int(8)), big);
  REQUIRE(b.ok());
  CHECK(a.value() == b.value());
  CHECK(a.stats.steps == b.stats.steps);
}

TEST_CASE("determinism of values, traces, and step counts") {
  EvalOutcome a = evaluate(factorial(), Value(Int(7)));
  EvalOutcome b = evaluate(factorial(), Value(Int(7)));
  CHECK(a.value() == b.value());
  CHECK(a.stats.steps == b.stats.steps);
  CHECK(a.stats.max_depth == b.stats.max_depth);
  TraceOutcome ta = evaluate_traced(factorial(), Value(Int(7)));
  TraceOutcome tb = evaluate_traced(factorial(), Value(Int(7)));
  CHECK(same_structure(ta.tree(), tb.tree()));
}

TEST_CASE("error paths") {
  SUBCASE("division by zero is an evaluation-time error") {
    EvalOutcome out = evaluate(fn("f(x) = 1 / (x - x)"), Value(Int(3)));
    REQUIRE_FALSE(out.ok());
    CHECK(out.error().kind == EvalError::Kind::DivisionByZero);
  }
  SUBCASE("mod zero") {
    EvalOutcome out = evaluate(fn("f(x) = x mod 0"), Value(Int(3)));
    REQUIRE_FALSE(out.ok());
    CHECK(out.error().kind == EvalError::Kind::DivisionByZero);
  }
  SUBCASE("non-terminating recursion hits the depth budget") {
    Budget b{100, 1'000'000, 1e12};
    EvalOutcome out = evaluate(fn("f(n) = f(n + 1)"), Value(Int(0)), b);
    REQUIRE_FALSE(out.ok());
    CHECK(out.error().kind == EvalError::Kind::DepthExceeded);
  }
  SUBCASE("step budget") {
    Budget b{10'000, 50, 1e12};
    EvalOutcome out = evaluate(factorial(), Value(Int(100)), b);
    REQUIRE_FALSE(out.ok());
    CHECK(out.error().kind == EvalError::Kind::StepsExceeded);
  }
  SUBCASE("Real magnitude bound") {
    Budget b{10'000, 1'000'000, 1e6};
    EvalOutcome out = evaluate(fn("f(x) = x * 10.0"), Value(1e6), b);
    REQUIRE_FALSE(out.ok());
    CHECK(out.error().kind == EvalError::Kind::MagnitudeExceeded);
  }
  SUBCASE("domain mismatch is rejected up front") {
    EvalOutcome out = evaluate(fn("f(x) = x + 1"), Value(0.5));
    REQUIRE_FALSE(out.ok());
    CHECK(out.error().kind == EvalError::Kind::DomainMismatch);
  }
}

TEST_CASE("memoized evaluation matches plain values with fewer steps") {
  EvalOutcome plain = evaluate(fib(), Value(Int(18)));
  EvalOutcome memo = evaluate_memoized(fib(), Value(Int(18)));
  REQUIRE(plain.ok());
  REQUIRE(memo.ok());
  CHECK(plain.value() == memo.value());
  CHECK(memo.stats.steps < plain.stats.steps);
}

TEST_CASE("integer division floors and mod follows the divisor sign") {
  EvalOutcome q = evaluate(fn("f(x) = x / 2"), Value(Int(-7)));
  REQUIRE(q.ok());
  CHECK(q.value().as_int() == -4);
  EvalOutcome r = evaluate(fn("f(x) = x mod 6"), Value(Int(-2)));
  REQUIRE(r.ok());
  CHECK(r.value().as_int() == 4);
}

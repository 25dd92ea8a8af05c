#include <doctest.h>

#include <cmath>

#include "cdf/classify.hpp"
#include "cdf/parse.hpp"

using namespace cdf;

namespace {

FunctionDef fn(const std::string& text) {
  auto r = parse_function(text);
  REQUIRE(std::holds_alternative<FunctionDef>(r));
  return std::get<FunctionDef>(r);
}

RewriteSystem gram(const std::string& text) {
  auto r = parse_rewrite_system(text);
  REQUIRE(std::holds_alternative<RewriteSystem>(r));
  return std::get<RewriteSystem>(r);
}

CdfReport classify_fn(const std::string& text, long x0,
                      std::uint64_t max_steps = 100) {
  CdfSpace s = build_space(fn(text), Value(Int(x0)), max_steps);
  return classify(s);
}

// Counting oracle for the factorial body: each call with n > 0 visits 9
// expression nodes plus the recursive body; the base case visits 4.
std::uint64_t factorial_steps_oracle(long n) { return 9 * n + 4; }

// Counting oracle for the naive Fibonacci body.
std::uint64_t fib_steps_oracle(long n) {
  if (n < 2) return 4;
  return fib_steps_oracle(n - 1) + fib_steps_oracle(n - 2) + 12;
}

}  // namespace

TEST_CASE("evaluator step counts match the independent counting oracles") {
  FunctionDef fact = fn("f(n) = if n = 0 then 1 else n * f(n - 1)");
  for (long n = 0; n <= 12; ++n) {
    EvalOutcome out = evaluate(fact, Value(Int(n)));
    REQUIRE(out.ok());
    CHECK(out.stats.steps == factorial_steps_oracle(n));
  }
  FunctionDef fib = fn("fib(n) = if n < 2 then n else fib(n - 1) + fib(n - 2)");
  for (long n = 0; n <= 15; ++n) {
    EvalOutcome out = evaluate(fib, Value(Int(n)));
    REQUIRE(out.ok());
    CHECK(out.stats.steps == fib_steps_oracle(n));
  }
}

TEST_CASE("successor: Linear shape at level 0, StableLike") {
  CdfReport r = classify_fn("f(x) = x + 1", 0, 10);
  CHECK(r.shape == Shape::Linear);
  CHECK(r.hierarchy_level == 0);
  CHECK(r.observed_max_branching <= 1);
  REQUIRE(r.heuristic_logic_tags.size() == 1);
  CHECK(r.heuristic_logic_tags[0].name == "StableLike");
  CHECK_FALSE(r.heuristic_logic_tags[0].justification.empty());
}

TEST_CASE("factorial: linear chain, recursive expansion, level 0 with the "
          "alternative-reading note") {
  CdfReport r = classify_fn("f(n) = if n = 0 then 1 else n * f(n - 1)", 3);
  CHECK(r.shape == Shape::Linear);
  CHECK(r.expandability == Expandability::RecursiveExpansion);
  CHECK(r.hierarchy_level == 0);
  CHECK(r.growth.kind == GrowthClass::Kind::Linear);
  bool noted = false;
  for (const auto& n : r.notes)
    if (n.find("level 2") != std::string::npos) noted = true;
  CHECK(noted);
}

TEST_CASE("naive Fibonacci: branching shape at level 2, TreeLike") {
  CdfReport r = classify_fn(
      "fib(n) = if n < 2 then n else fib(n - 1) + fib(n - 2)", 10);
  CHECK(r.shape == Shape::Branching);
  CHECK(r.expandability == Expandability::RecursiveExpansion);
  CHECK(r.hierarchy_level == 2);
  CHECK(r.observed_max_branching == 2);
  bool treelike = false;
  for (const auto& t : r.heuristic_logic_tags)
    if (t.name == "TreeLike") treelike = true;
  CHECK(treelike);
}

TEST_CASE("rotation mod 6: Cyclic, ClosedPeriodic, level 0") {
  CdfReport r = classify_fn("f(x) = (x + 2) mod 6", 0);
  CHECK(r.shape == Shape::Cyclic);
  CHECK(r.expandability == Expandability::ClosedPeriodic);
  CHECK(r.hierarchy_level == 0);
}

TEST_CASE("identity: FixedPoint, ClosedPeriodic") {
  CdfReport r = classify_fn("f(x) = x", 7);
  CHECK(r.shape == Shape::FixedPoint);
  CHECK(r.expandability == Expandability::ClosedPeriodic);
  CHECK(r.hierarchy_level == 0);
}

TEST_CASE("rewrite systems") {
  SUBCASE("finite grammar: Branching at level 1, no witnesses") {
    CdfSpace s = build_space(gram("S -> \"x\" | \"y\""), 50, 100000);
    RecursionCheck rec = is_recursive(gram("S -> \"x\" | \"y\""));
    CdfReport r = classify(s, {}, &rec);
    CHECK(r.shape == Shape::Branching);
    CHECK(r.expandability == Expandability::Unresolved);
    CHECK(r.hierarchy_level == 1);
    CHECK(r.recursion_witnesses.empty());
  }
  SUBCASE("balanced parens: InfiniteBranching at level 2, witness S") {
    RewriteSystem g = gram("S -> \"(\" S \")\" | \"\"");
    CdfSpace s = build_space(g, 50, 100000);
    RecursionCheck rec = is_recursive(g);
    CdfReport r = classify(s, {}, &rec);
    CHECK(r.shape == Shape::Branching);
    CHECK(r.expandability == Expandability::InfiniteBranching);
    CHECK(r.hierarchy_level == 2);
    CHECK(r.recursion_witnesses == std::vector<std::string>{"S"});
  }
}

TEST_CASE("Lyapunov: f(x) = 0.5x equals ln 0.5 within 1e-9") {
  auto r = estimate_lyapunov(fn("f(x) = 0.5 * x"), Value(0.37));
  REQUIRE(std::holds_alternative<double>(r));
  CHECK(std::fabs(std::get<double>(r) - std::log(0.5)) < 1e-9);
}

TEST_CASE("Lyapunov: logistic r=4 matches the exact-derivative orbit-average "
          "oracle and ln 2") {
  LyapunovParams p;
  Budget b;
  auto r = estimate_lyapunov(fn("f(x) = 4.0 * x * (1 - x)"), Value(0.37), p, b);
  REQUIRE(std::holds_alternative<double>(r));
  double est = std::get<double>(r);

  // Oracle: same orbit, derivative 4 - 8x taken analytically.
  double x = 0.37;
  for (std::uint64_t i = 0; i < p.n_transient; ++i) x = 4.0 * x * (1.0 - x);
  double sum = 0;
  for (std::uint64_t i = 0; i < p.n_sample; ++i) {
    sum += std::log(std::fabs(4.0 - 8.0 * x));
    x = 4.0 * x * (1.0 - x);
  }
  double oracle = sum / static_cast<double>(p.n_sample);

  CHECK(std::fabs(est - oracle) < 1e-6);
  CHECK(std::fabs(est - std::log(2.0)) < 0.05);
}

TEST_CASE("Lyapunov: tent map averages ln 2; the slope is ±2 a.e.") {
  auto r = estimate_lyapunov(
      fn("f(x) = if x < 0.5 then 2 * x else 2 - 2 * x"), Value(0.37));
  REQUIRE(std::holds_alternative<double>(r));
  CHECK(std::fabs(std::get<double>(r) - std::log(2.0)) < 0.05);
}

TEST_CASE("Lyapunov requires the Real domain") {
  auto r = estimate_lyapunov(fn("f(x) = x + 1"), Value(Int(0)));
  REQUIRE(std::holds_alternative<LyapunovError>(r));
  CHECK(std::get<LyapunovError>(r).kind == LyapunovError::Kind::WrongDomain);
}

TEST_CASE("logistic r=4: classified Chaotic with a reported exponent") {
  CdfSpace s = build_space(fn("f(x) = 4.0 * x * (1 - x)"), Value(0.37), 2000);
  CdfReport r = classify(s);
  CHECK(r.expandability == Expandability::Chaotic);
  REQUIRE(r.lyapunov);
  CHECK(std::fabs(*r.lyapunov - std::log(2.0)) < 0.05);
}

TEST_CASE("logistic r=2: epsilon fixed point, ClosedPeriodic, noted") {
  CdfSpace s = build_space(fn("f(x) = 2.0 * x * (1 - x)"), Value(0.37), 10000);
  REQUIRE(s.orbit);
  CHECK(s.orbit->status == Orbit::StatusKind::CycleFound);
  CHECK(s.orbit->cycle.lambda == 1);
  CHECK(s.orbit->eps_cycle);
  CdfReport r = classify(s);
  CHECK(r.expandability == Expandability::ClosedPeriodic);
  bool noted = false;
  for (const auto& n : r.notes)
    if (n.find("cycle") != std::string::npos) noted = true;
  CHECK(noted);
}

TEST_CASE("divergent real doubling map") {
  Budget b{10'000, 1'000'000, 1e6};
  CdfSpace s = build_space(fn("f(x) = 2.0 * x"), Value(1.0), 1000, 1e-9, b);
  CdfReport r = classify(s);
  CHECK(r.expandability == Expandability::Divergent);
}

TEST_CASE("growth fitting") {
  FunctionDef fact = fn("f(n) = if n = 0 then 1 else n * f(n - 1)");
  FunctionDef fib = fn("fib(n) = if n < 2 then n else fib(n - 1) + fib(n - 2)");
  std::vector<Int> p10, p20;
  for (long n = 1; n <= 10; ++n) p10.emplace_back(n);
  for (long n = 1; n <= 20; ++n) p20.emplace_back(n);

  SUBCASE("factorial on probes 1..10 is Linear") {
    auto g = fit_growth_class(fact, p10);
    REQUIRE(std::holds_alternative<GrowthClass>(g));
    CHECK(std::get<GrowthClass>(g).kind == GrowthClass::Kind::Linear);
  }
  SUBCASE("naive Fibonacci on probes 1..20 is Exponential") {
    auto g = fit_growth_class(fib, p20);
    REQUIRE(std::holds_alternative<GrowthClass>(g));
    CHECK(std::get<GrowthClass>(g).kind == GrowthClass::Kind::Exponential);
    CHECK(std::get<GrowthClass>(g).raw_exponent > 0);
  }
  SUBCASE("constant step profiles resolve to Constant via the nested tie-break") {
    auto g = fit_growth_class(fn("f(x) = x + 1"), p10);
    REQUIRE(std::holds_alternative<GrowthClass>(g));
    CHECK(std::get<GrowthClass>(g).kind == GrowthClass::Kind::Constant);
  }
  SUBCASE("doubling recursion is Exponential") {
    std::vector<Int> p12;
    for (long n = 1; n <= 12; ++n) p12.emplace_back(n);
    auto g = fit_growth_class(
        fn("f(n) = if n <= 0 then 0 else f(n - 1) + f(n - 1)"), p12);
    REQUIRE(std::holds_alternative<GrowthClass>(g));
    CHECK(std::get<GrowthClass>(g).kind == GrowthClass::Kind::Exponential);
  }
  SUBCASE("too few probes is an error, not a class") {
    std::vector<Int> p3{Int(1), Int(2), Int(3)};
    auto g = fit_growth_class(fact, p3);
    REQUIRE(std::holds_alternative<GrowthError>(g));
    CHECK(std::get<GrowthError>(g).kind == GrowthError::Kind::InsufficientProbes);
  }
  SUBCASE("non-increasing probes are rejected") {
    std::vector<Int> bad{Int(1), Int(3), Int(2), Int(4)};
    auto g = fit_growth_class(fact, bad);
    REQUIRE(std::holds_alternative<GrowthError>(g));
  }
}

TEST_CASE("every report lists its out-of-scope axes") {
  CdfReport r = classify_fn("f(x) = x + 1", 0, 10);
  CHECK_FALSE(r.not_assessed.empty());
  bool levels = false;
  for (const auto& s : r.not_assessed)
    if (s.find("3-4") != std::string::npos) levels = true;
  CHECK(levels);
}

TEST_CASE("classification is deterministic") {
  for (int i = 0; i < 2; ++i) {
    CdfReport a = classify_fn("f(n) = if n = 0 then 1 else n * f(n - 1)", 3);
    CdfReport b = classify_fn("f(n) = if n = 0 then 1 else n * f(n - 1)", 3);
    CHECK(a.shape == b.shape);
    CHECK(a.expandability == b.expandability);
    CHECK(a.hierarchy_level == b.hierarchy_level);
    CHECK(a.growth.kind == b.growth.kind);
    CHECK(a.notes == b.notes);
  }
}

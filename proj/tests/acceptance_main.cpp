// Acceptance gate: one pass/fail line per criterion, nonzero exit when any
// criterion fails. argv[1] (optional) is the path to the built CLI binary,
// used for the end-to-end determinism check.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "cdf/analyze.hpp"
#include "cdf/stacklimit.hpp"
#include "gen.hpp"

using namespace cdf;

namespace {

int g_failures = 0;
std::ostringstream g_detail;

void criterion(int num, const std::string& what, bool ok) {
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << num << ": " << what
            << "\n";
  if (!ok) {
    ++g_failures;
    std::string d = g_detail.str();
    if (!d.empty()) std::cout << "     detail: " << d << "\n";
  }
  g_detail.str("");
}

bool expect(bool cond, const std::string& msg) {
  if (!cond) g_detail << msg << "; ";
  return cond;
}

FunctionDef fn(const std::string& text) {
  return std::get<FunctionDef>(parse_function(text));
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::filesystem::path kDataDir = CDF_DATA_DIR;

// --- criterion 1: successor worked example ---
bool successor_reproduction() {
  RunConfig cfg;
  cfg.basepoint = "0";
  cfg.max_steps = 10;
  auto r = analyze_text(read_file(kDataDir / "succ.fn"), cfg);
  if (!expect(std::holds_alternative<ReportDocument>(r), "parse failed"))
    return false;
  const ReportDocument& doc = std::get<ReportDocument>(r);
  bool ok = true;
  ok &= expect(doc.space.seq.size() == 11, "orbit length != 11");
  for (long k = 0; k <= 10 && ok; ++k)
    ok &= expect(doc.space.seq[k] == Value(Int(k)), "orbit point mismatch");
  ok &= expect(doc.space.semantic.pairs.size() == 10, "expected 10 pairs");
  for (const auto& [x, y] : doc.space.semantic.pairs)
    ok &= expect(y.as_int() == x.as_int() + 1, "pair violates y = x + 1");
  for (std::uint64_t n = 1; n < doc.space.seq.size(); ++n) {
    TreeMetrics m = tree_metrics(gamma(doc.space, n));
    ok &= expect(m.max_branching <= 1, "tree not a 1-branch chain");
  }
  ok &= expect(doc.report.shape == Shape::Linear, "shape not Linear");
  ok &= expect(doc.report.hierarchy_level == 0, "level not 0");
  ok &= expect(doc.mappings_check.holds, "commutativity fails");
  json j = json::parse(to_canonical_json(doc));
  ok &= expect(j["space_summary"]["orbit"]["points"] ==
                   json::parse(
                       R"(["0","1","2","3","4","5","6","7","8","9","10"])"),
               "canonical orbit JSON mismatch");
  ok &= expect(j["report"]["shape"] == "Linear", "canonical shape mismatch");
  return ok;
}

// --- criterion 2: factorial worked example ---
bool factorial_reproduction() {
  RunConfig cfg;
  cfg.basepoint = "3";
  auto r = analyze_text(read_file(kDataDir / "fact.fn"), cfg);
  if (!expect(std::holds_alternative<ReportDocument>(r), "parse failed"))
    return false;
  const ReportDocument& doc = std::get<ReportDocument>(r);
  bool ok = true;
  ok &= expect(doc.space.seq_kind == CdfSpace::SeqKind::CallChain,
               "expected call-chain sequence");
  json j = json::parse(to_canonical_json(doc));
  ok &= expect(j["space_summary"]["call_chain"] ==
                   json::array({"3", "2", "1", "0"}),
               "call chain != [3,2,1,0]");
  ok &= expect(j["space_summary"]["semantic"]["pairs"] ==
                   json::parse(R"([["0","1"],["1","1"],["2","2"],["3","6"]])"),
               "semantic pairs mismatch");
  const DerivTree& t3 = doc.space.tree_for(Value(Int(3)));
  TreeMetrics m = tree_metrics(t3);
  ok &= expect(m.depth == 4, "T3 depth != 4");
  ok &= expect(t3.result == Value(Int(6)), "T3 root result != 6");
  ok &= expect(doc.mappings_check.holds && doc.mappings_check.checked == 3,
               "commutativity mismatch");
  return ok;
}

// --- criterion 3: cycle-detection oracle equivalence ---
bool cycle_oracle_equivalence() {
  std::mt19937 rng(424242);
  for (int trial = 0; trial < 100; ++trial) {
    long m = std::uniform_int_distribution<long>(2, 50)(rng);
    long a = std::uniform_int_distribution<long>(0, m - 1)(rng);
    long b = std::uniform_int_distribution<long>(0, m - 1)(rng);
    long x0 = std::uniform_int_distribution<long>(0, m - 1)(rng);
    // 4m + 4 iterates cover Brent's search (~2(mu + lambda)) plus its replay.
    Orbit o = build_orbit(cdf_test::affine_mod_function(a, b, m),
                          Value(Int(x0)), 4 * static_cast<std::uint64_t>(m) + 4);
    if (!expect(o.status == Orbit::StatusKind::CycleFound, "no cycle found"))
      return false;
    auto oracle = detect_cycle_bruteforce(o.points, 1e-9);
    if (!expect(oracle.has_value(), "oracle found no cycle")) return false;
    if (!expect(o.cycle.mu == oracle->mu && o.cycle.lambda == oracle->lambda,
                "Brent (mu,lambda) != oracle on a=" + std::to_string(a) +
                    " b=" + std::to_string(b) + " m=" + std::to_string(m)))
      return false;
  }
  return true;
}

// --- criterion 4: Lyapunov checks ---
bool lyapunov_checks() {
  bool ok = true;

  CdfSpace s4 = build_space(fn(read_file(kDataDir / "logistic4.fn")),
                            Value(0.37), 2000);
  CdfReport r4 = classify(s4);
  ok &= expect(r4.expandability == Expandability::Chaotic,
               "logistic r=4 not Chaotic");
  ok &= expect(r4.lyapunov.has_value() &&
                   std::fabs(*r4.lyapunov - 0.693) < 0.05,
               "logistic r=4 exponent outside 0.693 +/- 0.05");

  CdfSpace s2 = build_space(fn(read_file(kDataDir / "logistic2.fn")),
                            Value(0.37), 10000);
  CdfReport r2 = classify(s2);
  ok &= expect(s2.orbit->status == Orbit::StatusKind::CycleFound &&
                   s2.orbit->cycle.lambda == 1 && s2.orbit->eps_cycle,
               "logistic r=2 not an epsilon fixed point");
  ok &= expect(r2.expandability == Expandability::ClosedPeriodic,
               "logistic r=2 not ClosedPeriodic");

  auto half = estimate_lyapunov(fn(read_file(kDataDir / "halfx.fn")),
                                Value(0.37));
  ok &= expect(std::holds_alternative<double>(half) &&
                   std::fabs(std::get<double>(half) - std::log(0.5)) < 1e-9,
               "0.5x exponent outside ln 0.5 +/- 1e-9");
  return ok;
}

// --- criterion 5: hierarchy assignment ---
bool hierarchy_assignment() {
  bool ok = true;
  RunConfig cfg;
  cfg.max_steps = 10;
  auto succ = analyze_text(read_file(kDataDir / "succ.fn"), cfg);
  ok &= expect(std::get<ReportDocument>(succ).report.hierarchy_level == 0,
               "successor not level 0");
  auto xy = analyze_text(read_file(kDataDir / "xy.gram"), {});
  ok &= expect(std::get<ReportDocument>(xy).report.hierarchy_level == 1,
               "finite grammar not level 1");
  auto paren = analyze_text(read_file(kDataDir / "paren.gram"), {});
  const CdfReport& pr = std::get<ReportDocument>(paren).report;
  ok &= expect(pr.hierarchy_level == 2, "paren grammar not level 2");
  ok &= expect(pr.recursion_witnesses == std::vector<std::string>{"S"},
               "paren witness != [S]");
  return ok;
}

// --- criterion 6: growth-class fitting + step-count oracle ---
std::uint64_t fact_steps_oracle(long n) { return 9 * n + 4; }
std::uint64_t fib_steps_oracle(long n) {
  if (n < 2) return 4;
  return fib_steps_oracle(n - 1) + fib_steps_oracle(n - 2) + 12;
}

bool growth_fitting() {
  bool ok = true;
  FunctionDef fact = fn(read_file(kDataDir / "fact.fn"));
  FunctionDef fib = fn(read_file(kDataDir / "fib.fn"));

  // Step counts agree exactly with an independent counting interpreter.
  for (long n = 0; n <= 12; ++n)
    ok &= expect(evaluate(fact, Value(Int(n))).stats.steps ==
                     fact_steps_oracle(n),
                 "factorial step count != oracle at n=" + std::to_string(n));
  for (long n = 0; n <= 15; ++n)
    ok &= expect(evaluate(fib, Value(Int(n))).stats.steps == fib_steps_oracle(n),
                 "fibonacci step count != oracle at n=" + std::to_string(n));

  std::vector<Int> p10, p20;
  for (long n = 1; n <= 10; ++n) p10.emplace_back(n);
  for (long n = 1; n <= 20; ++n) p20.emplace_back(n);

  auto gf = fit_growth_class(fact, p10);
  ok &= expect(std::holds_alternative<GrowthClass>(gf) &&
                   std::get<GrowthClass>(gf).kind == GrowthClass::Kind::Linear,
               "factorial probes 1..10 not Linear");
  auto gb = fit_growth_class(fib, p20);
  ok &= expect(
      std::holds_alternative<GrowthClass>(gb) &&
          std::get<GrowthClass>(gb).kind == GrowthClass::Kind::Exponential,
      "fibonacci probes 1..20 not Exponential");
  auto gc = fit_growth_class(fn("f(x) = 7"), p10);
  ok &= expect(std::holds_alternative<GrowthClass>(gc) &&
                   std::get<GrowthClass>(gc).kind == GrowthClass::Kind::Constant,
               "constant function not Constant");
  return ok;
}

// --- criterion 7: commutativity property suite ---
bool commutativity_suite() {
  std::mt19937 rng(20240821);
  for (int trial = 0; trial < 25; ++trial) {
    FunctionDef f = cdf_test::random_terminating_recursive(rng);
    CdfSpace s = build_space(f, Value(Int(7)), 2);
    CommutativityResult c = check_commutativity(s);
    if (!expect(c.holds && c.checked == s.seq.size() - 1,
                "commutativity failed for " + to_string(f)))
      return false;
  }
  return true;
}

// --- criterion 8: corpus determinism ---
json parse_without_timestamps(const std::string& text) {
  json j = json::parse(text);
  j.erase("timestamps");
  return j;
}

bool corpus_determinism(const char* cli_path) {
  RunConfig cfg;
  BatchResult run1 = run_batch(kDataDir, cfg);
  BatchResult run2 = run_batch(kDataDir, cfg);
  bool ok = expect(run1.entries.size() == run2.entries.size() &&
                       !run1.entries.empty(),
                   "batch sizes differ or batch empty");
  for (std::size_t i = 0; ok && i < run1.entries.size(); ++i) {
    const BatchEntry& a = run1.entries[i];
    const BatchEntry& b = run2.entries[i];
    ok &= expect(a.path == b.path, "batch ordering differs");
    ok &= expect(a.doc.has_value() == b.doc.has_value(),
                 "status differs for " + a.path);
    if (a.doc && b.doc)
      ok &= expect(to_canonical_json(*a.doc) == to_canonical_json(*b.doc),
                   "canonical JSON differs for " + a.path);
  }
  ok &= expect(run1.index == run2.index, "batch index differs");

  if (cli_path && *cli_path) {
    // End-to-end: the CLI's JSON output is identical modulo timestamps.
    auto tmp = std::filesystem::temp_directory_path();
    auto out1 = tmp / "cdf_acc_1.json";
    auto out2 = tmp / "cdf_acc_2.json";
    std::string base = std::string("\"") + cli_path + "\" analyze \"" +
                       (kDataDir / "fact.fn").string() +
                       "\" --basepoint 3 --out ";
    ok &= expect(std::system((base + "\"" + out1.string() + "\"").c_str()) == 0,
                 "CLI run 1 failed");
    ok &= expect(std::system((base + "\"" + out2.string() + "\"").c_str()) == 0,
                 "CLI run 2 failed");
    if (ok)
      ok &= expect(parse_without_timestamps(read_file(out1)) ==
                       parse_without_timestamps(read_file(out2)),
                   "CLI outputs differ beyond timestamps");
    std::filesystem::remove(out1);
    std::filesystem::remove(out2);
  }
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  raise_stack_limit();
  const char* cli = argc > 1 ? argv[1] : nullptr;

  auto guard = [](bool (*f)()) {
    try {
      return f();
    } catch (const std::exception& e) {
      g_detail << "exception: " << e.what();
      return false;
    }
  };

  criterion(1, "successor worked example (orbit 0..10, Linear, level 0)",
            guard(successor_reproduction));
  criterion(2, "factorial worked example (chain 3,2,1,0; T3 depth 4 = 6)",
            guard(factorial_reproduction));
  criterion(3, "Brent equals brute-force oracle on 100 affine maps mod m",
            guard(cycle_oracle_equivalence));
  criterion(4, "Lyapunov exponents (logistic r=4, r=2, f(x)=0.5x)",
            guard(lyapunov_checks));
  criterion(5, "hierarchy levels (successor 0, finite grammar 1, parens 2)",
            guard(hierarchy_assignment));
  criterion(6, "growth classes (Linear, Exponential, Constant) + step oracle",
            guard(growth_fitting));
  criterion(7, "commutativity on 25 random terminating recursive functions",
            guard(commutativity_suite));
  bool c8;
  try {
    c8 = corpus_determinism(cli);
  } catch (const std::exception& e) {
    g_detail << "exception: " << e.what();
    c8 = false;
  }
  criterion(8, "byte-identical canonical JSON across two corpus runs", c8);

  if (g_failures) {
    std::cout << g_failures << " criterion(s) failed\n";
    return 1;
  }
  std::cout << "all criteria passed\n";
  return 0;
}

// cdf: analyze the structural space generated by a recursive function or a
// rewrite system, and report shape/expandability/hierarchy classifications.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "cdf/analyze.hpp"
#include "cdf/stacklimit.hpp"

namespace {

std::vector<cdf::Int> parse_probes(const std::string& spec) {
  std::vector<cdf::Int> probes;
  if (spec.empty()) return probes;
  auto dots = spec.find("..");
  if (dots != std::string::npos) {
    cdf::Int lo(spec.substr(0, dots));
    cdf::Int hi(spec.substr(dots + 2));
    for (cdf::Int n = lo; n <= hi; ++n) probes.push_back(n);
    return probes;
  }
  for (const auto& part : cdf::detail::split(spec, ','))
    probes.emplace_back(part);
  return probes;
}

void write_output(const std::string& content, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  out << content;
}

struct CommonOpts {
  cdf::RunConfig cfg;
  std::string probes_spec;
  std::string kind = "auto";
  std::string format = "json";
  std::string dot_component = "orbit";
  std::size_t tree_index = 0;
  bool tree_given = false;
  std::string out_path;
  bool strict = false;
};

void add_common_flags(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--basepoint", o.cfg.basepoint,
                  "iteration basepoint x0 (default 0)");
  cmd->add_option("--max-steps", o.cfg.max_steps, "orbit length budget");
  cmd->add_option("--depth-cap", o.cfg.depth_cap, "expansion depth cap");
  cmd->add_option("--node-cap", o.cfg.node_cap, "expansion node cap");
  cmd->add_option("--max-call-depth", o.cfg.budget.max_call_depth,
                  "evaluator recursion depth budget");
  cmd->add_option("--max-eval-steps", o.cfg.budget.max_eval_steps,
                  "evaluator step budget per call");
  cmd->add_option("--magnitude-bound", o.cfg.budget.magnitude_bound,
                  "Real-domain magnitude bound");
  cmd->add_option("--float-eps", o.cfg.float_eps,
                  "relative tolerance for Real-domain cycle equality");
  cmd->add_option("--lyapunov-threshold", o.cfg.lyapunov_threshold,
                  "Lyapunov exponent threshold for the Chaotic class");
  cmd->add_option("--lyap-transient", o.cfg.lyapunov.n_transient,
                  "Lyapunov transient steps");
  cmd->add_option("--lyap-sample", o.cfg.lyapunov.n_sample,
                  "Lyapunov sample steps");
  cmd->add_option("--fd-step", o.cfg.lyapunov.fd_step,
                  "finite-difference step for the derivative");
  cmd->add_option("--probes", o.probes_spec,
                  "growth probes, e.g. 1..20 or 1,2,4,8");
  cmd->add_option("--range", o.cfg.int_range,
                  "Integer semantic domain lo:hi[:step]");
  cmd->add_option("--grid", o.cfg.real_grid, "Real semantic domain lo:hi:n");
  cmd->add_option("--kind", o.kind, "input kind: auto|fn|gram")
      ->check(CLI::IsMember({"auto", "fn", "gram"}));
  cmd->add_option("--format", o.format, "output format: json|dot|text")
      ->check(CLI::IsMember({"json", "dot", "text"}));
  cmd->add_option("--dot", o.dot_component,
                  "dot component: orbit|tree|expansion")
      ->check(CLI::IsMember({"orbit", "tree", "expansion"}));
  auto* tree = cmd->add_option("--tree", o.tree_index,
                               "derivation tree index for --format dot");
  cmd->callback([&o, tree] { o.tree_given = tree->count() > 0; });
  cmd->add_option("--out", o.out_path, "write output to a file");
  cmd->add_flag("--strict", o.strict,
                "exit 2 when the analysis exhausted a budget");
}

void finish_config(CommonOpts& o) {
  o.cfg.growth_probes = parse_probes(o.probes_spec);
  o.cfg.kind = o.kind == "fn"     ? cdf::RunConfig::Kind::Function
               : o.kind == "gram" ? cdf::RunConfig::Kind::RewriteSystem
                                  : cdf::RunConfig::Kind::Auto;
}

int run_analyze(const std::string& path, CommonOpts& o) {
  finish_config(o);
  auto result = cdf::analyze_file(path, o.cfg);
  if (auto* err = std::get_if<cdf::ParseError>(&result)) {
    std::cerr << path << ":" << err->to_string() << "\n";
    return 1;
  }
  const cdf::ReportDocument& doc = std::get<cdf::ReportDocument>(result);

  std::string rendered;
  if (o.format == "json") {
    rendered = cdf::to_json(doc);
  } else if (o.format == "text") {
    rendered = cdf::to_text(doc);
  } else {
    cdf::DotSelector sel;
    if (o.tree_given) {
      sel.which = cdf::DotSelector::Which::DerivTree;
      sel.tree_index = o.tree_index;
    } else if (o.dot_component == "tree") {
      sel.which = cdf::DotSelector::Which::DerivTree;
    } else if (o.dot_component == "expansion") {
      sel.which = cdf::DotSelector::Which::Expansion;
    }
    if (doc.space.expansion) sel.which = cdf::DotSelector::Which::Expansion;
    try {
      rendered = cdf::to_dot(doc.space, sel);
    } catch (const cdf::DotError& e) {
      std::cerr << "dot: " << e.what() << "\n";
      return 1;
    }
  }
  write_output(rendered, o.out_path);
  if (o.strict && cdf::budget_exhausted(doc)) return 2;
  return 0;
}

int run_batch_cmd(const std::string& dir, const std::string& out_dir,
                  CommonOpts& o) {
  finish_config(o);
  cdf::BatchResult batch;
  try {
    batch = cdf::run_batch(dir, o.cfg);
  } catch (const std::exception& e) {
    std::cerr << "batch: " << e.what() << "\n";
    return 1;
  }
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    for (const auto& entry : batch.entries) {
      if (!entry.doc) continue;
      std::ofstream out(std::filesystem::path(out_dir) /
                            (entry.path + ".report.json"),
                        std::ios::binary);
      out << cdf::to_json(*entry.doc);
    }
  }
  write_output(batch.index.dump(2) + "\n", o.out_path);
  bool exhausted = false;
  for (const auto& entry : batch.entries)
    if (entry.doc && cdf::budget_exhausted(*entry.doc)) exhausted = true;
  if (o.strict && exhausted) return 2;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  cdf::raise_stack_limit();
  CLI::App app{"structural-space analyzer for recursive functions and rewrite "
               "systems"};
  app.require_subcommand(1);
  app.set_config("--config", "", "config file (flags win over file values)")
      ->envname("CDF_CONFIG");

  CommonOpts analyze_opts;
  std::string analyze_path;
  auto* analyze = app.add_subcommand("analyze", "analyze a single file");
  analyze->add_option("path", analyze_path, "input file (.fn or .gram)")
      ->required();
  add_common_flags(analyze, analyze_opts);

  CommonOpts batch_opts;
  std::string batch_dir, batch_out_dir;
  auto* batch = app.add_subcommand("batch", "analyze every file in a directory");
  batch->add_option("dir", batch_dir, "input directory")->required();
  batch->add_option("--out-dir", batch_out_dir,
                    "write one report JSON per input file");
  add_common_flags(batch, batch_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (analyze->parsed()) return run_analyze(analyze_path, analyze_opts);
    return run_batch_cmd(batch_dir, batch_out_dir, batch_opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "cdf/parse.hpp"
#include "cdf/report.hpp"

namespace cdf {

/// Everything tunable about one analysis run. Defaults are desk scale: well
/// under a second per example input.
struct RunConfig {
  std::string basepoint = "0";  // parsed per the function's domain
  std::uint64_t max_steps = 10'000;
  std::uint64_t depth_cap = 50;
  std::uint64_t node_cap = 100'000;
  Budget budget;
  double float_eps = 1e-9;
  double lyapunov_threshold = 0.01;
  LyapunovParams lyapunov;
  std::vector<Int> growth_probes;  // empty: defaults apply
  // Optional semantic domain override: "lo:hi[:step]" (Integer) or
  // "lo:hi:n" (Real grid). Empty: the mapping sequence's ground points.
  std::string int_range;
  std::string real_grid;
  enum class Kind { Auto, Function, RewriteSystem };
  Kind kind = Kind::Auto;

  ClassifyConfig classify_config() const {
    ClassifyConfig c;
    c.lyapunov_threshold = lyapunov_threshold;
    c.lyapunov = lyapunov;
    c.growth_probes = growth_probes;
    return c;
  }

  json echo() const {
    json j;
    j["basepoint"] = basepoint;
    j["max_steps"] = max_steps;
    j["depth_cap"] = depth_cap;
    j["node_cap"] = node_cap;
    j["budget"] = {{"max_call_depth", budget.max_call_depth},
                   {"max_eval_steps", budget.max_eval_steps},
                   {"magnitude_bound", budget.magnitude_bound}};
    j["float_eps"] = float_eps;
    j["lyapunov"] = {{"threshold", lyapunov_threshold},
                     {"n_transient", lyapunov.n_transient},
                     {"n_sample", lyapunov.n_sample},
                     {"fd_step", lyapunov.fd_step}};
    json probes = json::array();
    for (const auto& p : growth_probes) probes.push_back(p.get_str());
    j["growth_probes"] = std::move(probes);
    if (!int_range.empty()) j["int_range"] = int_range;
    if (!real_grid.empty()) j["real_grid"] = real_grid;
    return j;
  }
};

namespace detail {

inline std::string iso_timestamp() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

inline std::optional<DomainSpec> domain_from_config(const RunConfig& cfg,
                                                    Domain domain) {
  if (domain == Domain::Integer && !cfg.int_range.empty()) {
    auto parts = split(cfg.int_range, ':');
    if (parts.size() < 2 || parts.size() > 3)
      throw std::invalid_argument("int range must be lo:hi[:step]");
    IntRange r{Int(parts[0]), Int(parts[1]),
               parts.size() == 3 ? Int(parts[2]) : Int(1)};
    return DomainSpec{r};
  }
  if (domain == Domain::Real && !cfg.real_grid.empty()) {
    auto parts = split(cfg.real_grid, ':');
    if (parts.size() != 3)
      throw std::invalid_argument("real grid must be lo:hi:n");
    RealGrid g{std::stod(parts[0]), std::stod(parts[1]),
               std::stoull(parts[2])};
    return DomainSpec{g};
  }
  return std::nullopt;
}

}  // namespace detail

/// Analyze one source text: parse, build the space, run the mappings check,
/// classify, and assemble the document.
inline std::variant<ReportDocument, ParseError> analyze_text(
    const std::string& text, const RunConfig& cfg) {
  bool rewrite = cfg.kind == RunConfig::Kind::RewriteSystem ||
                 (cfg.kind == RunConfig::Kind::Auto &&
                  looks_like_rewrite_system(text));

  ReportDocument doc;
  doc.config_echo = cfg.echo();
  doc.input_digest = fnv1a64_hex(text);
  doc.timestamp = detail::iso_timestamp();

  if (rewrite) {
    auto parsed = parse_rewrite_system(text);
    if (auto* err = std::get_if<ParseError>(&parsed)) return *err;
    const RewriteSystem& g = std::get<RewriteSystem>(parsed);
    doc.input_kind = "rewrite_system";
    doc.input_name = g.start_symbol;
    doc.space = build_space(g, cfg.depth_cap, cfg.node_cap);
    RecursionCheck rec = is_recursive(g);
    doc.report = classify(doc.space, cfg.classify_config(), &rec);
    return doc;
  }

  auto parsed = parse_function(text);
  if (auto* err = std::get_if<ParseError>(&parsed)) return *err;
  const FunctionDef& f = std::get<FunctionDef>(parsed);
  if (!f.is_unary())
    return ParseError{ParseError::Kind::ArityMismatch,
                      "analysis requires a unary function", 1, 1};
  doc.input_kind = "function";
  doc.input_name = f.name;

  Value x0 = f.domain_tag == Domain::Integer
                 ? Value(Int(cfg.basepoint))
                 : Value(std::stod(cfg.basepoint));
  std::optional<DomainSpec> domain =
      detail::domain_from_config(cfg, f.domain_tag);
  doc.space = build_space(f, x0, cfg.max_steps, cfg.float_eps, cfg.budget,
                          domain);
  doc.mappings_check = check_commutativity(doc.space);
  doc.report = classify(doc.space, cfg.classify_config());
  return doc;
}

inline std::variant<ReportDocument, ParseError> analyze_file(
    const std::filesystem::path& path, const RunConfig& cfg) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    return ParseError{ParseError::Kind::SyntaxError,
                      "cannot open file " + path.string(), 1, 1};
  std::stringstream ss;
  ss << in.rdbuf();
  return analyze_text(ss.str(), cfg);
}

/// True when the analysis hit a budget somewhere (--strict exit path).
inline bool budget_exhausted(const ReportDocument& doc) {
  if (doc.space.orbit &&
      (doc.space.orbit->status == Orbit::StatusKind::BudgetExhausted ||
       doc.space.orbit->status == Orbit::StatusKind::EvalFailed))
    return true;
  if (doc.space.expansion &&
      doc.space.expansion->caps_hit != ExpansionTree::CapsHit::None)
    return true;
  return false;
}

struct BatchEntry {
  std::string path;  // relative to the batch directory
  std::optional<ReportDocument> doc;
  std::optional<ParseError> error;
};

struct BatchResult {
  std::vector<BatchEntry> entries;  // sorted by path
  json index;
};

/// Analyze every regular file in a directory; per-file failures never abort
/// the batch. Each entry's document is identical to a standalone analysis.
inline BatchResult run_batch(const std::filesystem::path& dir,
                             const RunConfig& cfg) {
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file()) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (files.empty())
    throw std::runtime_error("batch directory contains no analyzable files");

  BatchResult result;
  json index_files = json::object();
  for (const auto& p : files) {
    BatchEntry entry;
    entry.path = p.filename().string();
    auto r = analyze_file(p, cfg);
    json row;
    if (auto* err = std::get_if<ParseError>(&r)) {
      entry.error = *err;
      row["status"] = "parse_error";
      row["error"] = err->to_string();
    } else {
      entry.doc = std::move(std::get<ReportDocument>(r));
      row["status"] = "ok";
      row["shape"] = shape_name(entry.doc->report.shape);
      row["expandability"] =
          expandability_name(entry.doc->report.expandability);
      row["hierarchy_level"] =
          entry.doc->report.hierarchy_level == kLevelNotAssessed
              ? json("NotAssessed")
              : json(entry.doc->report.hierarchy_level);
    }
    index_files[entry.path] = std::move(row);
    result.entries.push_back(std::move(entry));
  }
  result.index = json{{"schema", "batch_index.v1"},
                      {"tool_version", kToolVersion},
                      {"files", std::move(index_files)}};
  return result;
}

/// Plain-text one-screen summary.
inline std::string to_text(const ReportDocument& doc) {
  std::ostringstream out;
  out << "input: " << doc.input_name << " (" << doc.input_kind << ")\n";
  out << "digest: " << doc.input_digest << "\n";
  const CdfReport& r = doc.report;
  out << "shape: " << shape_name(r.shape) << "\n";
  out << "expandability: " << expandability_name(r.expandability) << "\n";
  if (r.lyapunov) out << "lyapunov: " << Value::format_real(*r.lyapunov) << "\n";
  out << "growth class: " << r.growth.kind_name();
  if (r.growth.kind == GrowthClass::Kind::Polynomial)
    out << " (degree " << r.growth.degree << ")";
  out << "\n";
  out << "hierarchy level: ";
  if (r.hierarchy_level == kLevelNotAssessed)
    out << "NotAssessed";
  else
    out << r.hierarchy_level;
  out << "\n";
  if (!r.recursion_witnesses.empty()) {
    out << "recursion witnesses:";
    for (const auto& w : r.recursion_witnesses) out << " " << w;
    out << "\n";
  }
  if (doc.space.orbit) {
    const Orbit& o = *doc.space.orbit;
    out << "orbit: " << o.points.size() << " points, " << o.status_name();
    if (o.status == Orbit::StatusKind::CycleFound)
      out << " (mu=" << o.cycle.mu << ", lambda=" << o.cycle.lambda << ")";
    out << "\n";
  }
  if (doc.space.call_chain) {
    out << "call chain:";
    for (const auto& v : *doc.space.call_chain) out << " " << v.str();
    out << "\n";
  }
  if (doc.space.expansion)
    out << "expansion: " << doc.space.expansion->nodes.size() << " nodes, depth "
        << doc.space.expansion->depth() << ", caps "
        << doc.space.expansion->caps_hit_name() << "\n";
  if (doc.space.orbit_backed())
    out << "commutativity: "
        << (doc.mappings_check.holds ? "holds" : "fails") << " ("
        << doc.mappings_check.checked << " indices)\n";
  for (const auto& t : r.heuristic_logic_tags)
    out << "tag: " << t.name << " [" << t.justification
        << "] (heuristic proxy - not model theory)\n";
  for (const auto& n : r.notes) out << "note: " << n << "\n";
  return out.str();
}

}  // namespace cdf

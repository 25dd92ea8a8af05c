#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "cdf/classify.hpp"
#include "cdf/space.hpp"

namespace cdf {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kReportSchema = "report.v1";

// nlohmann::json keeps object keys in std::map order, which is exactly the
// lexicographic canonical order the document format requires.
using json = nlohmann::json;

/// FNV-1a 64-bit content hash, rendered as 16 hex digits.
inline std::string fnv1a64_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline json value_json(const Value& v) {
  // Big integers as decimal strings: no 53-bit precision loss downstream.
  if (v.is_int()) return v.as_int().get_str();
  return v.as_real();
}

inline json tree_json(const DerivTree& t) {
  json j;
  switch (t.kind) {
    case DerivTree::Kind::CallNode:
      j["kind"] = "call";
      j["function"] = t.function;
      j["argument"] = value_json(t.argument);
      break;
    case DerivTree::Kind::OpNode:
      j["kind"] = "op";
      j["op"] = t.op;
      break;
    case DerivTree::Kind::LeafNode:
      j["kind"] = "leaf";
      break;
  }
  j["result"] = value_json(t.result);
  j["children"] = json::array();
  for (const auto& c : t.children) j["children"].push_back(tree_json(c));
  return j;
}

inline json orbit_json(const Orbit& o) {
  json j;
  j["basepoint"] = value_json(o.basepoint);
  j["length"] = o.points.size();
  j["status"] = o.status_name();
  json pts = json::array();
  for (const auto& p : o.points) pts.push_back(value_json(p));
  j["points"] = std::move(pts);
  if (o.status == Orbit::StatusKind::CycleFound) {
    j["cycle"] = {{"mu", o.cycle.mu},
                  {"lambda", o.cycle.lambda},
                  {"epsilon_cycle", o.eps_cycle}};
  }
  if (o.status == Orbit::StatusKind::Diverged ||
      o.status == Orbit::StatusKind::EvalFailed)
    j["at_step"] = o.at_step;
  if (o.error) j["error"] = o.error->name();
  return j;
}

inline json expansion_json(const ExpansionTree& t) {
  json j;
  j["caps_hit"] = t.caps_hit_name();
  j["node_count"] = t.nodes.size();
  j["depth"] = t.depth();
  json nodes = json::array();
  for (const auto& n : t.nodes) {
    json nj;
    nj["form"] = to_string(n.form);
    nj["depth"] = n.depth;
    if (n.via_alt >= 0) {
      nj["via_nonterminal"] = n.via_nonterminal;
      nj["via_alt"] = n.via_alt;
    }
    nj["children"] = n.children;
    nodes.push_back(std::move(nj));
  }
  j["nodes"] = std::move(nodes);
  return j;
}

inline json semantic_json(const RelationSample& r) {
  json pairs = json::array();
  for (const auto& [x, y] : r.pairs)
    pairs.push_back(json::array({value_json(x), value_json(y)}));
  json failures = json::array();
  for (const auto& [x, e] : r.failures)
    failures.push_back(json::array({value_json(x), e.name()}));
  return json{{"pairs", std::move(pairs)}, {"failures", std::move(failures)}};
}

inline json descriptive_json(const DescriptiveProperties& d) {
  json j;
  j["injective_on_sample"] = d.injective_on_sample;
  j["surjective_onto_sample_image_domain"] = d.surjective_onto_sample_image_domain;
  j["monotone_on_sample"] = monotonicity_name(d.monotone_on_sample);
  if (d.lipschitz_estimate) j["lipschitz_estimate"] = *d.lipschitz_estimate;
  if (d.max_jump) j["max_jump_indicative"] = *d.max_jump;
  if (d.max_second_difference)
    j["max_second_difference_indicative"] = *d.max_second_difference;
  return j;
}

inline json report_json(const CdfReport& r) {
  json j;
  j["shape"] = shape_name(r.shape);
  j["expandability"] = expandability_name(r.expandability);
  if (r.lyapunov) j["lyapunov"] = *r.lyapunov;
  json growth;
  growth["class"] = r.growth.kind_name();
  if (r.growth.kind == GrowthClass::Kind::Polynomial) {
    growth["degree"] = r.growth.degree;
    growth["raw_exponent"] = r.growth.raw_exponent;
  }
  if (r.growth.kind == GrowthClass::Kind::Exponential)
    growth["raw_exponent"] = r.growth.raw_exponent;
  if (!r.growth.detail.empty()) growth["detail"] = r.growth.detail;
  j["growth_class"] = std::move(growth);
  j["hierarchy_level"] =
      r.hierarchy_level == kLevelNotAssessed ? json("NotAssessed")
                                             : json(r.hierarchy_level);
  if (r.descriptive) j["descriptive"] = descriptive_json(*r.descriptive);
  json tags = json::array();
  for (const auto& t : r.heuristic_logic_tags)
    tags.push_back({{"tag", t.name},
                    {"justification", t.justification},
                    {"status", "heuristic proxy - not model theory"}});
  j["heuristic_logic_tags"] = std::move(tags);
  j["notes"] = r.notes;
  j["not_assessed"] = r.not_assessed;
  if (!r.recursion_witnesses.empty())
    j["recursion_witnesses"] = r.recursion_witnesses;
  j["observed_max_branching"] = r.observed_max_branching;
  j["observed_max_tree_depth"] = r.observed_max_tree_depth;
  return j;
}

inline json space_summary_json(const CdfSpace& space) {
  json j;
  if (space.orbit) j["orbit"] = orbit_json(*space.orbit);
  if (space.call_chain) {
    json chain = json::array();
    for (const auto& v : *space.call_chain) chain.push_back(value_json(v));
    j["call_chain"] = std::move(chain);
  }
  if (space.expansion) j["expansion"] = expansion_json(*space.expansion);
  if (!space.expansion) j["semantic"] = semantic_json(space.semantic);
  j["sequence_kind"] = space.seq_kind == CdfSpace::SeqKind::CallChain
                           ? "call_chain"
                           : "orbit";
  return j;
}

/// The full serializable analysis result.
struct ReportDocument {
  CdfSpace space;
  CdfReport report;
  CommutativityResult mappings_check;
  json config_echo;           // every tunable that influenced the run
  std::string input_digest;   // content hash of the source text
  std::string input_kind;     // "function" | "rewrite_system"
  std::string input_name;     // function name or start symbol
  std::string timestamp;      // excluded from the canonical region
};

/// The canonical region: everything except timestamps.
inline json canonical_document_json(const ReportDocument& doc) {
  json j;
  j["schema"] = kReportSchema;
  j["tool_version"] = kToolVersion;
  j["config_echo"] = doc.config_echo;
  j["input_digest"] = doc.input_digest;
  j["input_kind"] = doc.input_kind;
  j["input_name"] = doc.input_name;
  j["space_summary"] = space_summary_json(doc.space);
  j["report"] = report_json(doc.report);
  if (doc.space.orbit_backed())
    j["mappings_check"] = {
        {"holds", doc.mappings_check.holds},
        {"checked", doc.mappings_check.checked},
        {"first_failure", doc.mappings_check.first_failure
                              ? json(*doc.mappings_check.first_failure)
                              : json(nullptr)}};
  return j;
}

/// Canonical JSON: sorted keys, big integers as strings, reals as shortest
/// round-trip decimals; byte-identical across runs on identical input.
inline std::string to_canonical_json(const ReportDocument& doc) {
  return canonical_document_json(doc).dump(2) + "\n";
}

/// Full JSON including timestamps and the digest of the canonical region.
inline std::string to_json(const ReportDocument& doc) {
  json j = canonical_document_json(doc);
  j["canonical_digest"] = fnv1a64_hex(to_canonical_json(doc));
  j["timestamps"] = {{"generated", doc.timestamp}};
  return j.dump(2) + "\n";
}

// ---- DOT rendering ----

struct DotError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

inline void tree_to_dot(const DerivTree& t, std::size_t& next_id,
                        std::string& out) {
  std::size_t my_id = next_id++;
  out += "  n" + std::to_string(my_id) + " [label=\"" + dot_escape(t.label()) +
         "\"];\n";
  for (const auto& c : t.children) {
    std::size_t child_id = next_id;  // preorder: child gets the next id
    tree_to_dot(c, next_id, out);
    out += "  n" + std::to_string(my_id) + " -> n" + std::to_string(child_id) +
           ";\n";
  }
}

}  // namespace detail

inline std::string orbit_to_dot(const Orbit& o) {
  std::string out = "digraph orbit {\n";
  std::size_t shown = o.points.size();
  bool cycle = o.status == Orbit::StatusKind::CycleFound;
  if (cycle) shown = o.cycle.mu + o.cycle.lambda;  // distinct points only
  for (std::size_t i = 0; i < shown; ++i)
    out += "  n" + std::to_string(i) + " [label=\"" +
           detail::dot_escape(o.points[i].str()) + "\"];\n";
  for (std::size_t i = 1; i < shown; ++i)
    out += "  n" + std::to_string(i - 1) + " -> n" + std::to_string(i) + ";\n";
  if (cycle)
    out += "  n" + std::to_string(shown - 1) + " -> n" +
           std::to_string(o.cycle.mu) + ";\n";
  out += "}\n";
  return out;
}

inline std::string tree_to_dot(const DerivTree& t) {
  std::string out = "digraph deriv_tree {\n";
  std::size_t next_id = 0;
  detail::tree_to_dot(t, next_id, out);
  out += "}\n";
  return out;
}

inline std::string expansion_to_dot(const ExpansionTree& t) {
  std::string out = "digraph expansion {\n";
  for (std::size_t i = 0; i < t.nodes.size(); ++i)
    out += "  n" + std::to_string(i) + " [label=\"" +
           detail::dot_escape(to_string(t.nodes[i].form)) + "\"];\n";
  for (std::size_t i = 0; i < t.nodes.size(); ++i)
    for (std::size_t c : t.nodes[i].children)
      out += "  n" + std::to_string(i) + " -> n" + std::to_string(c) + ";\n";
  out += "}\n";
  return out;
}

struct DotSelector {
  enum class Which { Orbit, DerivTree, Expansion };
  Which which = Which::Orbit;
  std::size_t tree_index = 0;
};

inline std::string to_dot(const CdfSpace& space, const DotSelector& sel) {
  switch (sel.which) {
    case DotSelector::Which::Orbit:
      if (!space.orbit) throw DotError("orbit component not materialized");
      return orbit_to_dot(*space.orbit);
    case DotSelector::Which::DerivTree: {
      if (!space.orbit_backed())
        throw DotError("derivation trees not materialized");
      if (sel.tree_index >= space.seq_length())
        throw DotError("tree index out of range");
      return tree_to_dot(space.tree_for(space.seq[sel.tree_index]));
    }
    case DotSelector::Which::Expansion:
      if (!space.expansion)
        throw DotError("expansion component not materialized");
      return expansion_to_dot(*space.expansion);
  }
  throw DotError("unknown component");
}

}  // namespace cdf

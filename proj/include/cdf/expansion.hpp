#pragma once

#include <cstdint>
#include <deque>
#include <set>
#include <string>
#include <vector>

#include "cdf/ast.hpp"

namespace cdf {

/// Breadth-first derivation tree of sentential forms. Nodes live in a flat
/// vector; children are indices, ordered by rule source order.
struct ExpansionTree {
  enum class CapsHit { None, DepthCap, NodeCap };

  struct Node {
    std::vector<Symbol> form;
    std::string via_nonterminal;  // nonterminal rewritten to reach this node
    int via_alt = -1;             // alternative index within its rule
    std::uint64_t depth = 1;      // root = 1
    std::vector<std::size_t> children;

    bool all_terminal() const {
      for (const auto& s : form)
        if (!s.terminal) return false;
      return true;
    }
  };

  std::vector<Node> nodes;  // nodes[0] is the root
  CapsHit caps_hit = CapsHit::None;

  const Node& root() const { return nodes.front(); }

  std::uint64_t depth() const {
    std::uint64_t d = 0;
    for (const auto& n : nodes) d = std::max(d, n.depth);
    return d;
  }

  const char* caps_hit_name() const {
    switch (caps_hit) {
      case CapsHit::None: return "none";
      case CapsHit::DepthCap: return "depth_cap";
      case CapsHit::NodeCap: return "node_cap";
    }
    return "?";
  }
};

namespace detail {

inline int leftmost_nonterminal(const std::vector<Symbol>& form) {
  for (std::size_t i = 0; i < form.size(); ++i)
    if (!form[i].terminal) return static_cast<int>(i);
  return -1;
}

}  // namespace detail

/// Expand from [start_symbol], replacing the leftmost nonterminal of each
/// form by every alternative in source order, breadth first, until every
/// frontier form is all-terminal or a cap trips.
inline ExpansionTree build_expansion(const RewriteSystem& g,
                                     std::uint64_t depth_cap,
                                     std::uint64_t node_cap) {
  ExpansionTree t;
  ExpansionTree::Node root;
  root.form = {Symbol{g.start_symbol, false}};
  t.nodes.push_back(std::move(root));

  std::deque<std::size_t> queue{0};
  while (!queue.empty()) {
    std::size_t idx = queue.front();
    queue.pop_front();
    int pos = detail::leftmost_nonterminal(t.nodes[idx].form);
    if (pos < 0) continue;  // all-terminal leaf
    if (t.nodes[idx].depth >= depth_cap) {
      t.caps_hit = ExpansionTree::CapsHit::DepthCap;
      continue;
    }
    const auto* alts = g.find(t.nodes[idx].form[pos].text);
    if (!alts) continue;  // unreachable for validated systems
    for (std::size_t a = 0; a < alts->size(); ++a) {
      if (t.nodes.size() >= node_cap) {
        t.caps_hit = ExpansionTree::CapsHit::NodeCap;
        return t;
      }
      ExpansionTree::Node child;
      const auto& parent_form = t.nodes[idx].form;
      child.form.assign(parent_form.begin(), parent_form.begin() + pos);
      child.form.insert(child.form.end(), (*alts)[a].begin(), (*alts)[a].end());
      child.form.insert(child.form.end(), parent_form.begin() + pos + 1,
                        parent_form.end());
      child.via_nonterminal = parent_form[pos].text;
      child.via_alt = static_cast<int>(a);
      child.depth = t.nodes[idx].depth + 1;
      std::size_t child_idx = t.nodes.size();
      t.nodes.push_back(std::move(child));
      t.nodes[idx].children.push_back(child_idx);
      queue.push_back(child_idx);
    }
  }
  return t;
}

struct RecursionCheck {
  bool recursive = false;
  std::vector<std::string> witnesses;  // nonterminals reachable from themselves
};

/// Reachability over the rule graph: nonterminal A references B when B occurs
/// in one of A's alternatives.
inline RecursionCheck is_recursive(const RewriteSystem& g) {
  const std::size_t n = g.rules.size();
  auto index_of = [&](const std::string& name) -> std::size_t {
    for (std::size_t i = 0; i < n; ++i)
      if (g.rules[i].first == name) return i;
    return n;
  };

  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& alt : g.rules[i].second)
      for (const auto& sym : alt)
        if (!sym.terminal) reach[i][index_of(sym.text)] = true;

  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (reach[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (reach[k][j]) reach[i][j] = true;

  RecursionCheck r;
  for (std::size_t i = 0; i < n; ++i)
    if (reach[i][i]) {
      r.recursive = true;
      r.witnesses.push_back(g.rules[i].first);
    }
  return r;
}

}  // namespace cdf

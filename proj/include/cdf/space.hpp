#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "cdf/expansion.hpp"
#include "cdf/orbit.hpp"
#include "cdf/semantic.hpp"

namespace cdf {

struct MappingError : std::runtime_error {
  enum class Kind { IndexOutOfRange, UndefinedAtZero, PairNotInRelation,
                    ComponentMissing };
  Kind kind;
  explicit MappingError(Kind k, const std::string& msg)
      : std::runtime_error(msg), kind(k) {}
};

/// The structural space of one analyzed function: syntactic component (orbit
/// or expansion tree, plus the call-instance chain for recursive functions),
/// sampled relation, and derivation trees.
///
/// For mapping purposes the space carries one indexed sequence:
///  - iterate orbit: seq[k] = f^k(x0); step n is the application
///    seq[n-1] -> seq[n], its tree derives seq[n] from seq[n-1];
///  - call chain: seq[k] = argument of the k-th recursive call instance;
///    step n is grounded at seq[n], its tree is the full trace of f(seq[n]).
/// Index 0 is excluded from all three mappings in both cases.
class CdfSpace {
 public:
  enum class SeqKind { IterateOrbit, CallChain };

  FunctionDef function;
  Budget budget;
  SeqKind seq_kind = SeqKind::IterateOrbit;
  std::vector<Value> seq;

  std::optional<Orbit> orbit;
  std::optional<std::vector<Value>> call_chain;  // recursive functions only
  std::optional<ExpansionTree> expansion;        // rewrite systems only
  RelationSample semantic;

  bool orbit_backed() const { return !seq.empty(); }
  std::size_t seq_length() const { return seq.size(); }

  /// Trees indexed like the sequence; built lazily, cached by argument.
  /// Safe under concurrent readers (insert holds the cache lock; entries are
  /// never mutated after insertion, so returned references stay valid).
  const DerivTree& tree_for(const Value& x) const {
    {
      std::lock_guard<std::mutex> lock(cache_->mutex);
      auto it = cache_->trees.find(x);
      if (it != cache_->trees.end()) return it->second;
    }
    TraceOutcome out = evaluate_traced(function, x, budget);
    if (!out.ok())
      throw MappingError(MappingError::Kind::ComponentMissing,
                         "trace failed at " + x.str() + ": " +
                             out.error().message);
    std::lock_guard<std::mutex> lock(cache_->mutex);
    return cache_->trees.emplace(x, out.tree()).first->second;
  }

  /// Test hook: replace the cached tree for x (fault injection).
  void override_tree(const Value& x, DerivTree t) const {
    std::lock_guard<std::mutex> lock(cache_->mutex);
    cache_->trees.insert_or_assign(x, std::move(t));
  }

 private:
  struct Cache {
    std::map<Value, DerivTree> trees;
    std::mutex mutex;
  };
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

namespace detail {

inline void check_index(const CdfSpace& space, std::uint64_t n) {
  if (!space.orbit_backed())
    throw MappingError(MappingError::Kind::ComponentMissing,
                       "space has no indexed sequence");
  if (n == 0)
    throw MappingError(MappingError::Kind::UndefinedAtZero,
                       "mappings are undefined at n = 0");
  if (n >= space.seq_length())
    throw MappingError(MappingError::Kind::IndexOutOfRange,
                       "index " + std::to_string(n) + " out of range [1, " +
                           std::to_string(space.seq_length()) + ")");
}

}  // namespace detail

/// Step n of the sequence as a semantic pair (x, f(x)).
inline std::pair<Value, Value> alpha(const CdfSpace& space, std::uint64_t n) {
  detail::check_index(space, n);
  if (space.seq_kind == CdfSpace::SeqKind::IterateOrbit)
    return {space.seq[n - 1], space.seq[n]};
  // Call chain: step n is grounded at the n-th call argument.
  const Value& x = space.seq[n];
  auto it = space.semantic.pairs.find(x);
  if (it == space.semantic.pairs.end())
    throw MappingError(MappingError::Kind::PairNotInRelation,
                       "call-chain point " + x.str() + " not in relation");
  return {x, it->second};
}

/// The derivation tree T(x |- y) for a pair of the sampled relation.
inline const DerivTree& beta(const CdfSpace& space,
                             const std::pair<Value, Value>& pair) {
  if (!space.semantic.contains(pair.first, pair.second))
    throw MappingError(MappingError::Kind::PairNotInRelation,
                       "pair (" + pair.first.str() + ", " + pair.second.str() +
                           ") not in relation");
  return space.tree_for(pair.first);
}

/// The derivation tree of step n, directly from the sequence.
inline const DerivTree& gamma(const CdfSpace& space, std::uint64_t n) {
  detail::check_index(space, n);
  const Value& x = space.seq_kind == CdfSpace::SeqKind::IterateOrbit
                       ? space.seq[n - 1]
                       : space.seq[n];
  return space.tree_for(x);
}

struct CommutativityResult {
  bool holds = true;
  std::optional<std::uint64_t> first_failure;
  std::uint64_t checked = 0;
};

/// For every valid index n, gamma(n) must be structurally identical to
/// beta(alpha(n)).
inline CommutativityResult check_commutativity(const CdfSpace& space) {
  CommutativityResult r;
  if (!space.orbit_backed()) return r;
  for (std::uint64_t n = 1; n < space.seq_length(); ++n) {
    try {
      const auto pair = alpha(space, n);
      const DerivTree& via_beta = beta(space, pair);
      const DerivTree& direct = gamma(space, n);
      ++r.checked;
      if (!same_structure(via_beta, direct)) {
        r.holds = false;
        r.first_failure = n;
        return r;
      }
    } catch (const MappingError&) {
      r.holds = false;
      r.first_failure = n;
      return r;
    }
  }
  return r;
}

/// Arguments of every call instance in a trace, preorder. For the factorial
/// chain at basepoint 3 this yields [3, 2, 1, 0].
inline std::vector<Value> call_instance_chain(const DerivTree& t) {
  std::vector<Value> out;
  auto walk = [&](auto&& self, const DerivTree& node) -> void {
    if (node.kind == DerivTree::Kind::CallNode) out.push_back(node.argument);
    for (const auto& c : node.children) self(self, c);
  };
  walk(walk, t);
  return out;
}

/// Assemble the space for a deterministic function. Recursive functions use
/// the call chain from the basepoint trace as the mapping sequence; others use
/// the iterate orbit. The semantic sample defaults to the sequence's ground
/// points when no domain spec is given.
inline CdfSpace build_space(const FunctionDef& f, const Value& x0,
                            std::uint64_t max_steps, double float_eps = 1e-9,
                            const Budget& budget = {},
                            std::optional<DomainSpec> domain = std::nullopt) {
  CdfSpace space;
  space.function = f;
  space.budget = budget;
  space.orbit = build_orbit(f, x0, max_steps, float_eps, budget);

  if (f.is_recursive()) {
    TraceOutcome t = evaluate_traced(f, x0, budget);
    if (t.ok()) space.call_chain = call_instance_chain(t.tree());
  }

  if (space.call_chain) {
    space.seq_kind = CdfSpace::SeqKind::CallChain;
    space.seq = *space.call_chain;
  } else {
    space.seq_kind = CdfSpace::SeqKind::IterateOrbit;
    space.seq = space.orbit->points;
  }

  DomainSpec dom;
  if (domain) {
    dom = *domain;
  } else {
    // Ground points of the mapping sequence: the points whose evaluation the
    // mappings reference.
    ExplicitList pts;
    if (space.seq_kind == CdfSpace::SeqKind::CallChain) {
      pts.values = space.seq;
    } else {
      pts.values.assign(space.seq.begin(),
                        space.seq.size() > 1 ? space.seq.end() - 1
                                             : space.seq.end());
    }
    dom = pts;
  }
  space.semantic = build_semantic(f, dom, budget);
  return space;
}

/// Assemble the space for a rewrite system: expansion tree only.
inline CdfSpace build_space(const RewriteSystem& g, std::uint64_t depth_cap,
                            std::uint64_t node_cap) {
  CdfSpace space;
  space.expansion = build_expansion(g, depth_cap, node_cap);
  return space;
}

}  // namespace cdf

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cdf/space.hpp"

namespace cdf {

enum class Shape { Linear, Cyclic, Branching, FixedPoint, Unresolved };
enum class Expandability {
  ClosedPeriodic,
  RecursiveExpansion,
  InfiniteBranching,
  Divergent,
  Chaotic,
  Unresolved,
};

inline const char* shape_name(Shape s) {
  switch (s) {
    case Shape::Linear: return "Linear";
    case Shape::Cyclic: return "Cyclic";
    case Shape::Branching: return "Branching";
    case Shape::FixedPoint: return "FixedPoint";
    case Shape::Unresolved: return "Unresolved";
  }
  return "?";
}

inline const char* expandability_name(Expandability e) {
  switch (e) {
    case Expandability::ClosedPeriodic: return "ClosedPeriodic";
    case Expandability::RecursiveExpansion: return "RecursiveExpansion";
    case Expandability::InfiniteBranching: return "InfiniteBranching";
    case Expandability::Divergent: return "Divergent";
    case Expandability::Chaotic: return "Chaotic";
    case Expandability::Unresolved: return "Unresolved";
  }
  return "?";
}

struct GrowthClass {
  enum class Kind { Constant, Linear, Polynomial, Exponential, Unresolved };
  Kind kind = Kind::Unresolved;
  int degree = 0;            // Polynomial only, rounded
  double raw_exponent = 0;   // Polynomial: fitted exponent; Exponential: fitted rate
  std::string detail;

  const char* kind_name() const {
    switch (kind) {
      case Kind::Constant: return "Constant";
      case Kind::Linear: return "Linear";
      case Kind::Polynomial: return "Polynomial";
      case Kind::Exponential: return "Exponential";
      case Kind::Unresolved: return "Unresolved";
    }
    return "?";
  }
};

struct GrowthError {
  enum class Kind { InsufficientProbes, AllProbesFailed };
  Kind kind;
  std::string message;
};

struct LyapunovError {
  enum class Kind { DerivativeUndefined, OrbitEscaped, EvalFailed, WrongDomain };
  Kind kind;
  std::string message;
};

struct LyapunovParams {
  std::uint64_t n_transient = 1000;
  std::uint64_t n_sample = 10'000;
  double fd_step = 1e-7;
};

struct LogicTag {
  std::string name;  // "StableLike" | "TreeLike"
  std::string justification;
};

/// Hierarchy levels 0..2; -1 means NotAssessed (levels 3-4 are out of scope).
constexpr int kLevelNotAssessed = -1;

struct CdfReport {
  Shape shape = Shape::Unresolved;
  Expandability expandability = Expandability::Unresolved;
  std::optional<double> lyapunov;
  GrowthClass growth;
  int hierarchy_level = kLevelNotAssessed;
  std::optional<DescriptiveProperties> descriptive;
  std::vector<LogicTag> heuristic_logic_tags;
  std::vector<std::string> notes;
  std::vector<std::string> not_assessed;
  std::vector<std::string> recursion_witnesses;  // rewrite systems
  // Observed tree statistics backing the classification.
  std::uint64_t observed_max_branching = 0;
  std::uint64_t observed_max_tree_depth = 0;
};

struct ClassifyConfig {
  double lyapunov_threshold = 0.01;
  LyapunovParams lyapunov;
  std::vector<Int> growth_probes;  // empty: 1..10 when applicable
  std::uint64_t tree_sample_limit = 64;  // ground points traced for metrics
};

/// Mean of ln|f'| along the post-transient orbit; f' by central finite
/// difference. Real domain only.
inline std::variant<double, LyapunovError> estimate_lyapunov(
    const FunctionDef& f, const Value& x0, const LyapunovParams& p = {},
    const Budget& budget = {}) {
  if (f.domain_tag != Domain::Real || !x0.is_real())
    return LyapunovError{LyapunovError::Kind::WrongDomain,
                         "Lyapunov estimation requires the Real domain"};
  double x = x0.as_real();
  auto step = [&](double v) -> std::optional<double> {
    EvalOutcome out = evaluate(f, Value(v), budget);
    if (!out.ok()) return std::nullopt;
    return out.value().as_real();
  };

  for (std::uint64_t i = 0; i < p.n_transient; ++i) {
    auto nx = step(x);
    if (!nx)
      return LyapunovError{LyapunovError::Kind::OrbitEscaped,
                           "orbit left the computable region during transient"};
    x = *nx;
    if (std::fabs(x) > budget.magnitude_bound)
      return LyapunovError{LyapunovError::Kind::OrbitEscaped,
                           "orbit magnitude exceeded bound during transient"};
  }

  double sum = 0;
  const double h = p.fd_step;
  for (std::uint64_t i = 0; i < p.n_sample; ++i) {
    auto fp = step(x + h);
    auto fm = step(x - h);
    if (!fp || !fm)
      return LyapunovError{LyapunovError::Kind::EvalFailed,
                           "evaluation failed at sample point " + std::to_string(x)};
    double deriv = (*fp - *fm) / (2 * h);
    if (std::fabs(deriv) > budget.magnitude_bound)
      return LyapunovError{LyapunovError::Kind::DerivativeUndefined,
                           "finite-difference derivative exceeds magnitude bound"};
    sum += std::log(std::fabs(deriv));
    auto nx = step(x);
    if (!nx)
      return LyapunovError{LyapunovError::Kind::OrbitEscaped,
                           "orbit evaluation failed during sampling"};
    x = *nx;
    if (std::fabs(x) > budget.magnitude_bound)
      return LyapunovError{LyapunovError::Kind::OrbitEscaped,
                           "orbit magnitude exceeded bound during sampling"};
  }
  return sum / static_cast<double>(p.n_sample);
}

namespace detail {

struct TreeStats {
  std::uint64_t max_branching = 0;
  std::uint64_t max_depth = 0;
  std::uint64_t traced = 0;
};

/// Metrics over the traces of the first `limit` ground points of the sequence.
inline TreeStats observed_tree_stats(const CdfSpace& space,
                                     std::uint64_t limit) {
  TreeStats s;
  if (!space.orbit_backed()) return s;
  std::uint64_t upto = std::min<std::uint64_t>(space.seq_length(), limit);
  for (std::uint64_t i = 0; i < upto; ++i) {
    // In the orbit reading the last point has no outgoing application.
    if (space.seq_kind == CdfSpace::SeqKind::IterateOrbit &&
        i + 1 == space.seq_length() && space.seq_length() > 1)
      break;
    try {
      TreeMetrics m = tree_metrics(space.tree_for(space.seq[i]));
      s.max_branching = std::max(s.max_branching, m.max_branching);
      s.max_depth = std::max(s.max_depth, m.depth);
      ++s.traced;
    } catch (const MappingError&) {
      break;
    }
  }
  return s;
}

inline bool strictly_monotone(const std::vector<Value>& xs) {
  if (xs.size() < 2) return true;
  bool inc = true, dec = true;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i - 1] < xs[i])) inc = false;
    if (!(xs[i] < xs[i - 1])) dec = false;
  }
  return inc || dec;
}

/// Probe call depths at increasing inputs; unbounded growth is read off a
/// monotone, strictly increasing depth profile.
inline bool unbounded_call_depth_growth(const FunctionDef& f,
                                        const Budget& budget) {
  if (!f.is_recursive() || f.domain_tag != Domain::Integer) return false;
  std::vector<std::uint64_t> depths;
  for (long n : {1L, 2L, 4L, 6L, 8L}) {
    EvalOutcome out = evaluate(f, Value(Int(n)), budget);
    if (!out.ok()) return false;
    depths.push_back(out.stats.max_depth);
  }
  for (std::size_t i = 1; i < depths.size(); ++i)
    if (depths[i] < depths[i - 1]) return false;
  return depths.back() > depths.front();
}

}  // namespace detail

inline Shape classify_shape(const CdfSpace& space,
                            const ClassifyConfig& cfg = {}) {
  const bool cycle = space.orbit &&
                     space.seq_kind == CdfSpace::SeqKind::IterateOrbit &&
                     space.orbit->status == Orbit::StatusKind::CycleFound;
  if (cycle && space.orbit->cycle.lambda == 1 && space.orbit->cycle.mu == 0)
    return Shape::FixedPoint;
  if (cycle && space.orbit->cycle.lambda >= 2) return Shape::Cyclic;

  if (space.expansion) return Shape::Branching;
  detail::TreeStats ts = detail::observed_tree_stats(space, cfg.tree_sample_limit);
  if (ts.max_branching >= 2) return Shape::Branching;

  if (space.orbit_backed() && !cycle && detail::strictly_monotone(space.seq)) {
    // Iterate orbits must additionally have run to their budget without an
    // evaluation failure; call chains are complete by construction.
    if (space.seq_kind == CdfSpace::SeqKind::CallChain ||
        (space.orbit && space.orbit->status == Orbit::StatusKind::BudgetExhausted))
      return Shape::Linear;
  }
  // A mu > 0 tail still ends in a cycle.
  if (cycle) return Shape::Cyclic;
  return Shape::Unresolved;
}

inline Expandability classify_expandability(
    const CdfSpace& space, double lyapunov_threshold = 0.01,
    const LyapunovParams& lp = {},
    std::optional<double>* lyapunov_out = nullptr,
    const RecursionCheck* rewrite_recursion = nullptr) {
  // Decision order is fixed: cycle, divergence, Lyapunov, branching, recursion.
  if (space.orbit && space.orbit->status == Orbit::StatusKind::CycleFound)
    return Expandability::ClosedPeriodic;
  if (space.orbit && space.orbit->status == Orbit::StatusKind::Diverged)
    return Expandability::Divergent;
  if (space.function.domain_tag == Domain::Real && space.orbit) {
    auto lam = estimate_lyapunov(space.function, space.orbit->basepoint, lp,
                                 space.budget);
    if (const double* v = std::get_if<double>(&lam)) {
      if (lyapunov_out) *lyapunov_out = *v;
      if (*v > lyapunov_threshold) return Expandability::Chaotic;
    }
  }
  if (space.expansion && rewrite_recursion && rewrite_recursion->recursive)
    return Expandability::InfiniteBranching;
  if (!space.expansion &&
      detail::unbounded_call_depth_growth(space.function, space.budget))
    return Expandability::RecursiveExpansion;
  return Expandability::Unresolved;
}

/// Fit evaluator step counts against constant, affine, power-law, and
/// exponential models; nested ties resolve to the simpler model, non-nested
/// ties are Unresolved.
inline std::variant<GrowthClass, GrowthError> fit_growth_class(
    const FunctionDef& f, const std::vector<Int>& probe_inputs,
    const Budget& budget = {}) {
  if (probe_inputs.size() < 4)
    return GrowthError{GrowthError::Kind::InsufficientProbes,
                       "need at least 4 probe inputs"};
  for (std::size_t i = 1; i < probe_inputs.size(); ++i)
    if (!(probe_inputs[i - 1] < probe_inputs[i]))
      return GrowthError{GrowthError::Kind::InsufficientProbes,
                         "probe inputs must be strictly increasing"};

  std::vector<double> ns, ss;
  for (const Int& n : probe_inputs) {
    EvalOutcome out = evaluate(f, Value(n), budget);
    if (!out.ok()) continue;
    ns.push_back(n.get_d());
    ss.push_back(static_cast<double>(out.stats.steps));
  }
  if (ns.empty())
    return GrowthError{GrowthError::Kind::AllProbesFailed,
                       "every probe evaluation failed"};
  if (ns.size() < 4)
    return GrowthError{GrowthError::Kind::InsufficientProbes,
                       "fewer than 4 probes evaluated successfully"};

  auto ols = [](const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      sx += x[i];
      sy += y[i];
      sxx += x[i] * x[i];
      sxy += x[i] * y[i];
    }
    double denom = n * sxx - sx * sx;
    double a = denom != 0 ? (n * sxy - sx * sy) / denom : 0;
    double b = (sy - a * sx) / n;
    return std::pair<double, double>{a, b};
  };
  auto rel_rms = [&](auto&& predict) {
    double acc = 0;
    for (std::size_t i = 0; i < ns.size(); ++i) {
      double p = predict(ns[i]);
      double denom = std::max(1.0, std::fabs(ss[i]));
      double e = (p - ss[i]) / denom;
      acc += e * e;
    }
    return std::sqrt(acc / static_cast<double>(ns.size()));
  };

  struct Candidate {
    GrowthClass::Kind kind;
    double rr;
    double param = 0;
  };
  std::vector<Candidate> cands;

  {  // Constant
    double mean = 0;
    for (double s : ss) mean += s;
    mean /= static_cast<double>(ss.size());
    cands.push_back({GrowthClass::Kind::Constant,
                     rel_rms([&](double) { return mean; })});
  }
  {  // Linear
    auto [a, b] = ols(ns, ss);
    cands.push_back({GrowthClass::Kind::Linear,
                     rel_rms([&, a = a, b = b](double n) { return a * n + b; })});
  }
  bool log_ok = true;
  for (std::size_t i = 0; i < ns.size(); ++i)
    if (ns[i] <= 0 || ss[i] <= 0) log_ok = false;
  if (log_ok) {  // Polynomial: ln s vs ln n
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < ns.size(); ++i) {
      lx.push_back(std::log(ns[i]));
      ly.push_back(std::log(ss[i]));
    }
    auto [d, c] = ols(lx, ly);
    cands.push_back(
        {GrowthClass::Kind::Polynomial,
         rel_rms([&, d = d, c = c](double n) { return std::exp(c) * std::pow(n, d); }),
         d});
  }
  if (log_ok) {  // Exponential: ln s vs n
    std::vector<double> ly;
    for (double s : ss) ly.push_back(std::log(s));
    auto [a, b] = ols(ns, ly);
    cands.push_back(
        {GrowthClass::Kind::Exponential,
         rel_rms([&, a = a, b = b](double n) { return std::exp(b + a * n); }), a});
  }

  std::sort(cands.begin(), cands.end(),
            [](const Candidate& a, const Candidate& b) { return a.rr < b.rr; });

  auto complexity = [](GrowthClass::Kind k) {
    switch (k) {
      case GrowthClass::Kind::Constant: return 0;
      case GrowthClass::Kind::Linear: return 1;
      case GrowthClass::Kind::Polynomial: return 2;
      case GrowthClass::Kind::Exponential: return 3;
      default: return 4;
    }
  };
  auto nested = [](GrowthClass::Kind simple, GrowthClass::Kind complex) {
    using K = GrowthClass::Kind;
    if (simple == K::Constant) return true;  // constant is a special case of all
    return simple == K::Linear && complex == K::Polynomial;
  };

  const Candidate& best = cands.front();
  // Candidates statistically indistinguishable from the best.
  std::vector<Candidate> close;
  for (const auto& c : cands)
    if (c.rr - best.rr < 0.1 * std::max(best.rr, 1e-9)) close.push_back(c);

  const Candidate* chosen = &best;
  if (close.size() > 1) {
    // Pick the simplest if it is nested in every other close model.
    std::sort(close.begin(), close.end(),
              [&](const Candidate& a, const Candidate& b) {
                return complexity(a.kind) < complexity(b.kind);
              });
    for (std::size_t i = 1; i < close.size(); ++i)
      if (!nested(close.front().kind, close[i].kind)) {
        GrowthClass g;
        g.kind = GrowthClass::Kind::Unresolved;
        g.detail = "indistinguishable fits (relative residual gap < 10%)";
        return g;
      }
    chosen = &close.front();
  }

  GrowthClass g;
  g.kind = chosen->kind;
  if (g.kind == GrowthClass::Kind::Polynomial) {
    g.raw_exponent = chosen->param;
    g.degree = static_cast<int>(std::lround(chosen->param));
  } else if (g.kind == GrowthClass::Kind::Exponential) {
    g.raw_exponent = chosen->param;
  }
  g.detail = "relative residual " + Value::format_real(chosen->rr);
  return g;
}

inline int assign_hierarchy_level(CdfReport& report, const CdfSpace& space,
                                  const RecursionCheck* rewrite_recursion) {
  const bool level0 =
      (report.shape == Shape::Linear || report.shape == Shape::Cyclic ||
       report.shape == Shape::FixedPoint) &&
      report.observed_max_branching <= 1 && !space.expansion;
  const bool level2 =
      report.expandability == Expandability::InfiniteBranching ||
      report.expandability == Expandability::RecursiveExpansion;
  const bool level1 =
      report.shape == Shape::Branching &&
      ((space.expansion && rewrite_recursion && !rewrite_recursion->recursive) ||
       (!space.expansion && report.observed_max_branching >= 2));

  if (level0) {
    if (level2)
      report.notes.push_back(
          "level 0 assigned from the linear call-chain reading; the recursive-"
          "expansion reading would assign level 2");
    return 0;
  }
  if (level2) return 2;
  if (level1) return 1;
  return kLevelNotAssessed;
}

inline std::vector<LogicTag> heuristic_logic_tags(const CdfReport& report) {
  std::vector<LogicTag> tags;
  if ((report.shape == Shape::Linear || report.shape == Shape::Cyclic ||
       report.shape == Shape::FixedPoint) &&
      report.hierarchy_level == 0)
    tags.push_back({"StableLike",
                    "shape " + std::string(shape_name(report.shape)) +
                        " at hierarchy level 0 (max branching " +
                        std::to_string(report.observed_max_branching) + ")"});
  if (report.hierarchy_level == 2 || report.observed_max_branching >= 2)
    tags.push_back({"TreeLike",
                    report.hierarchy_level == 2
                        ? "hierarchy level 2"
                        : "observed max branching " +
                              std::to_string(report.observed_max_branching)});
  return tags;
}

inline bool contains_if(const Expr& e) {
  if (e.kind == Expr::Kind::If) return true;
  for (const auto& c : e.children)
    if (contains_if(c)) return true;
  return false;
}

/// Full classification pass over a built space.
inline CdfReport classify(const CdfSpace& space, const ClassifyConfig& cfg = {},
                          const RecursionCheck* rewrite_recursion = nullptr) {
  CdfReport r;
  detail::TreeStats ts = detail::observed_tree_stats(space, cfg.tree_sample_limit);
  r.observed_max_branching = ts.max_branching;
  r.observed_max_tree_depth = ts.max_depth;
  if (space.expansion) {
    for (const auto& n : space.expansion->nodes)
      r.observed_max_branching =
          std::max(r.observed_max_branching,
                   static_cast<std::uint64_t>(n.children.size()));
    r.observed_max_tree_depth =
        std::max(r.observed_max_tree_depth, space.expansion->depth());
  }

  r.shape = classify_shape(space, cfg);
  std::optional<double> lyap;
  r.expandability = classify_expandability(space, cfg.lyapunov_threshold,
                                           cfg.lyapunov, &lyap,
                                           rewrite_recursion);
  if (lyap && space.function.domain_tag == Domain::Real) {
    r.lyapunov = lyap;
    if (contains_if(space.function.body))
      r.notes.push_back(
          "lyapunov uses finite differences across a conditional body; "
          "derivative is piecewise only");
  }

  if (!space.expansion && space.function.domain_tag == Domain::Integer &&
      space.function.is_recursive()) {
    std::vector<Int> probes = cfg.growth_probes;
    if (probes.empty())
      for (long n = 1; n <= 10; ++n) probes.emplace_back(n);
    auto fit = fit_growth_class(space.function, probes, space.budget);
    if (const GrowthClass* g = std::get_if<GrowthClass>(&fit)) r.growth = *g;
  }

  if (!space.semantic.pairs.empty())
    r.descriptive = descriptive_properties(space.semantic);

  if (rewrite_recursion) r.recursion_witnesses = rewrite_recursion->witnesses;

  r.hierarchy_level = assign_hierarchy_level(r, space, rewrite_recursion);
  r.heuristic_logic_tags = heuristic_logic_tags(r);

  if (space.orbit && space.orbit->eps_cycle &&
      space.orbit->status == Orbit::StatusKind::CycleFound)
    r.notes.push_back("Real-domain cycle is an ε-cycle (tolerance-based)");
  if (space.seq_kind == CdfSpace::SeqKind::CallChain)
    r.notes.push_back(
        "mappings indexed over the call chain: step n is grounded at the n-th "
        "call argument, and index 0 is excluded");
  if (r.descriptive)
    r.notes.push_back("descriptive flags are sample-relative, not global claims");

  r.not_assessed = {
      "axis C model theory (stability, simplicity, NIP, TP1/TP2) - heuristic "
      "tags only",
      "hierarchy levels 3-4",
      "integrability",
      "analyticity",
      "algebraic vs transcendental",
      "continuity/differentiability verdicts (finite-difference diagnostics "
      "only)",
  };
  return r;
}

}  // namespace cdf

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cdf/eval.hpp"

namespace cdf {

struct CycleInfo {
  std::uint64_t mu = 0;      // tail length before the cycle
  std::uint64_t lambda = 1;  // minimal cycle length
};

/// The iterate sequence x0, f(x0), f^2(x0), ... with its detected tail/cycle
/// decomposition.
struct Orbit {
  enum class StatusKind { CycleFound, BudgetExhausted, Diverged, EvalFailed };

  Value basepoint;
  std::vector<Value> points;  // points[0] = basepoint, points[k] = f^k(basepoint)
  StatusKind status = StatusKind::BudgetExhausted;
  CycleInfo cycle;                 // CycleFound only
  std::uint64_t at_step = 0;       // Diverged / EvalFailed
  std::optional<EvalError> error;  // EvalFailed
  bool eps_cycle = false;          // Real-domain cycle (tolerance-based equality)

  const char* status_name() const {
    switch (status) {
      case StatusKind::CycleFound: return "CycleFound";
      case StatusKind::BudgetExhausted: return "BudgetExhausted";
      case StatusKind::Diverged: return "Diverged";
      case StatusKind::EvalFailed: return "EvalFailed";
    }
    return "?";
  }
};

/// Brent cycle search over a stored iterate prefix. Equality is exact for
/// integers, relative-epsilon for reals.
inline std::optional<CycleInfo> detect_cycle_brent(
    const std::vector<Value>& xs, double float_eps) {
  if (xs.size() < 2) return std::nullopt;
  const std::uint64_t last = xs.size() - 1;
  auto eq = [&](std::uint64_t i, std::uint64_t j) {
    return values_equal(xs[i], xs[j], float_eps);
  };

  std::uint64_t power = 1, lambda = 1;
  std::uint64_t tortoise = 0, hare = 1;
  while (!eq(tortoise, hare)) {
    if (power == lambda) {
      tortoise = hare;
      power *= 2;
      lambda = 0;
    }
    ++hare;
    ++lambda;
    if (hare > last) return std::nullopt;
  }

  // Replay phase: two cursors lambda apart find the cycle entry point.
  std::uint64_t mu = 0;
  std::uint64_t front = lambda;
  while (!eq(mu, front)) {
    ++mu;
    ++front;
    if (front > last) return std::nullopt;
  }
  return CycleInfo{mu, lambda};
}

/// Exhaustive pairwise-comparison oracle: minimal lambda over all equal pairs,
/// then minimal mu for that lambda. Independent of the Brent path.
inline std::optional<CycleInfo> detect_cycle_bruteforce(
    const std::vector<Value>& points, double float_eps) {
  std::optional<CycleInfo> best;
  for (std::uint64_t i = 0; i < points.size(); ++i) {
    for (std::uint64_t j = i + 1; j < points.size(); ++j) {
      if (!values_equal(points[i], points[j], float_eps)) continue;
      std::uint64_t lambda = j - i;
      if (!best || lambda < best->lambda ||
          (lambda == best->lambda && i < best->mu))
        best = CycleInfo{i, lambda};
    }
  }
  return best;
}

/// Iterate f from x0, storing the full prefix, then classify the orbit.
/// A MagnitudeExceeded evaluation maps to Diverged; other evaluation errors
/// map to EvalFailed at the step they occurred.
inline Orbit build_orbit(const FunctionDef& f, const Value& x0,
                         std::uint64_t max_steps, double float_eps = 1e-9,
                         const Budget& budget = {}) {
  Orbit o;
  o.basepoint = x0;
  o.points.push_back(x0);
  for (std::uint64_t k = 1; k <= max_steps; ++k) {
    EvalOutcome out = evaluate(f, o.points.back(), budget);
    if (!out.ok()) {
      if (out.error().kind == EvalError::Kind::MagnitudeExceeded &&
          f.domain_tag == Domain::Real) {
        o.status = Orbit::StatusKind::Diverged;
        o.at_step = k;
      } else {
        o.status = Orbit::StatusKind::EvalFailed;
        o.at_step = k;
        o.error = out.error();
      }
      return o;
    }
    o.points.push_back(out.value());
  }
  if (auto c = detect_cycle_brent(o.points, float_eps)) {
    o.status = Orbit::StatusKind::CycleFound;
    o.cycle = *c;
    o.eps_cycle = f.domain_tag == Domain::Real;
  } else {
    o.status = Orbit::StatusKind::BudgetExhausted;
  }
  return o;
}

}  // namespace cdf

#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "cdf/eval.hpp"

namespace cdf {

/// Finite description of the sample domain for the input-output relation.
struct IntRange {
  Int lo, hi;
  Int step = 1;
};
struct RealGrid {
  double lo, hi;
  std::uint64_t n_points;
};
struct ExplicitList {
  std::vector<Value> values;
};
using DomainSpec = std::variant<IntRange, RealGrid, ExplicitList>;

inline std::vector<Value> enumerate_domain(const DomainSpec& spec) {
  std::vector<Value> xs;
  if (const auto* r = std::get_if<IntRange>(&spec)) {
    if (r->step <= 0) throw std::invalid_argument("IntRange step must be positive");
    for (Int x = r->lo; x <= r->hi; x += r->step) xs.emplace_back(x);
  } else if (const auto* g = std::get_if<RealGrid>(&spec)) {
    if (g->n_points == 0) throw std::invalid_argument("RealGrid needs >= 1 point");
    if (g->n_points == 1) {
      xs.emplace_back(g->lo);
    } else {
      for (std::uint64_t i = 0; i < g->n_points; ++i)
        xs.emplace_back(g->lo + (g->hi - g->lo) * static_cast<double>(i) /
                                    static_cast<double>(g->n_points - 1));
    }
  } else {
    xs = std::get<ExplicitList>(spec).values;
  }
  if (xs.empty()) throw std::invalid_argument("domain spec is empty");
  return xs;
}

/// Sampled input-output relation: at most one y per x, failures kept apart.
struct RelationSample {
  std::map<Value, Value> pairs;
  DomainSpec domain_spec;
  std::map<Value, EvalError> failures;

  bool contains(const Value& x, const Value& y) const {
    auto it = pairs.find(x);
    return it != pairs.end() && it->second == y;
  }
};

/// Evaluate f over every point of the domain spec. Per-point failures are
/// recorded, never fatal; pairs and failures partition the domain.
inline RelationSample build_semantic(const FunctionDef& f,
                                     const DomainSpec& domain_spec,
                                     const Budget& budget = {}) {
  RelationSample r;
  r.domain_spec = domain_spec;
  for (const Value& x : enumerate_domain(domain_spec)) {
    if (r.pairs.count(x) || r.failures.count(x)) continue;  // dedupe
    EvalOutcome out = evaluate(f, x, budget);
    if (out.ok())
      r.pairs.emplace(x, out.value());
    else
      r.failures.emplace(x, out.error());
  }
  return r;
}

enum class Monotonicity { Increasing, Decreasing, None };

inline const char* monotonicity_name(Monotonicity m) {
  switch (m) {
    case Monotonicity::Increasing: return "increasing";
    case Monotonicity::Decreasing: return "decreasing";
    case Monotonicity::None: return "none";
  }
  return "?";
}

/// Axis-E style flags, all sample-relative; no global claims.
struct DescriptiveProperties {
  bool injective_on_sample = false;
  bool surjective_onto_sample_image_domain = false;
  Monotonicity monotone_on_sample = Monotonicity::None;
  std::optional<double> lipschitz_estimate;  // Real domain only
  // Finite-difference diagnostics on Real grids; indicative, never verdicts.
  std::optional<double> max_jump;
  std::optional<double> max_second_difference;
};

inline DescriptiveProperties descriptive_properties(const RelationSample& r) {
  if (r.pairs.empty())
    throw std::invalid_argument("descriptive_properties: empty sample");

  DescriptiveProperties d;
  // Injectivity: no two x share a y.
  std::map<Value, std::uint64_t> image_counts;
  for (const auto& [x, y] : r.pairs) ++image_counts[y];
  d.injective_on_sample = true;
  for (const auto& [y, c] : image_counts)
    if (c > 1) d.injective_on_sample = false;

  // Surjectivity, sample-relative: every sampled domain point is attained as
  // an output by some sampled input. Global surjectivity is not decidable from
  // a sample; the report qualifies this flag accordingly.
  d.surjective_onto_sample_image_domain = true;
  for (const auto& [x, y] : r.pairs) {
    (void)y;
    if (!image_counts.count(x)) d.surjective_onto_sample_image_domain = false;
  }

  // Monotonicity over sorted x (the map is already ordered).
  bool inc = true, dec = true;
  const Value* prev = nullptr;
  for (const auto& [x, y] : r.pairs) {
    if (prev) {
      if (!(*prev < y)) inc = false;
      if (!(y < *prev)) dec = false;
    }
    prev = &y;
  }
  if (r.pairs.size() >= 2)
    d.monotone_on_sample = inc   ? Monotonicity::Increasing
                           : dec ? Monotonicity::Decreasing
                                 : Monotonicity::None;

  // Real-domain finite-difference diagnostics.
  bool real_domain = r.pairs.begin()->first.is_real();
  if (real_domain && r.pairs.size() >= 2) {
    double lip = 0, jump = 0;
    std::vector<std::pair<double, double>> pts;
    for (const auto& [x, y] : r.pairs) pts.emplace_back(x.as_real(), y.as_real());
    std::vector<double> slopes;
    for (std::size_t i = 1; i < pts.size(); ++i) {
      double dx = pts[i].first - pts[i - 1].first;
      double dy = pts[i].second - pts[i - 1].second;
      if (dx != 0) slopes.push_back(dy / dx);
      lip = std::max(lip, dx != 0 ? std::fabs(dy / dx) : 0.0);
      jump = std::max(jump, std::fabs(dy));
    }
    d.lipschitz_estimate = lip;
    d.max_jump = jump;
    if (slopes.size() >= 2) {
      double second = 0;
      for (std::size_t i = 1; i < slopes.size(); ++i)
        second = std::max(second, std::fabs(slopes[i] - slopes[i - 1]));
      d.max_second_difference = second;
    }
  }
  return d;
}

}  // namespace cdf

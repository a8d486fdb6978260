#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "etm/genome.hpp"

namespace etm {

// ---------------------------------------------------------------------------
// Problem-specific objectives (f3). All values are nonnegative reals and all
// problems are minimization; the classic OneMax is therefore encoded as the
// count of zero bits.

struct OneMaxMin {
  std::uint32_t n = 0;

  bool operator==(const OneMaxMin&) const = default;
};

struct Sphere {
  std::uint32_t d = 0;

  bool operator==(const Sphere&) const = default;
};

struct TspTour {
  std::vector<std::vector<double>> matrix; // square, symmetric, zero diagonal

  bool operator==(const TspTour&) const = default;
};

// Negated subset value plus capacity-violation penalty, shifted by the sum of
// all item values so the whole space maps to nonnegative reals.
struct KnapsackPenalty {
  std::vector<double> weights;
  std::vector<double> values;
  double capacity = 0.0;
  double penalty_coefficient = 0.0;

  double shift() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }

  bool operator==(const KnapsackPenalty&) const = default;
};

using ObjectiveSpec = std::variant<OneMaxMin, Sphere, TspTour, KnapsackPenalty>;

inline void validate_objective(const ObjectiveSpec& spec) {
  if (const auto* om = std::get_if<OneMaxMin>(&spec)) {
    if (om->n == 0) throw ConfigError("onemax_min: n must be positive");
  } else if (const auto* sp = std::get_if<Sphere>(&spec)) {
    if (sp->d == 0) throw ConfigError("sphere: d must be positive");
  } else if (const auto* tsp = std::get_if<TspTour>(&spec)) {
    const std::size_t n = tsp->matrix.size();
    if (n == 0) throw ConfigError("tsp: empty distance matrix");
    for (std::size_t i = 0; i < n; ++i) {
      if (tsp->matrix[i].size() != n) throw ConfigError("tsp: matrix is not square");
      if (tsp->matrix[i][i] != 0.0) throw ConfigError("tsp: diagonal must be zero");
      for (std::size_t j = 0; j < n; ++j) {
        if (tsp->matrix[i][j] < 0.0) throw ConfigError("tsp: negative distance");
        if (tsp->matrix[i][j] != tsp->matrix[j][i])
          throw ConfigError("tsp: matrix is not symmetric");
      }
    }
  } else {
    const auto& ks = std::get<KnapsackPenalty>(spec);
    if (ks.weights.empty()) throw ConfigError("knapsack: no items");
    if (ks.weights.size() != ks.values.size())
      throw ConfigError("knapsack: weights/values size mismatch");
    for (double w : ks.weights)
      if (w < 0.0) throw ConfigError("knapsack: negative weight");
    for (double v : ks.values)
      if (v < 0.0) throw ConfigError("knapsack: negative value");
    if (ks.capacity < 0.0) throw ConfigError("knapsack: negative capacity");
    if (ks.penalty_coefficient < 0.0)
      throw ConfigError("knapsack: negative penalty coefficient");
  }
}

// The representation an objective is defined over.
inline RepresentationSpec natural_representation(const ObjectiveSpec& spec) {
  if (const auto* om = std::get_if<OneMaxMin>(&spec)) return BitStringSpec{om->n};
  if (const auto* sp = std::get_if<Sphere>(&spec)) {
    RealVectorSpec rv;
    rv.d = sp->d;
    rv.bounds.assign(sp->d, Bounds{-1.0, 1.0});
    return rv;
  }
  if (const auto* tsp = std::get_if<TspTour>(&spec))
    return PermutationSpec{static_cast<std::uint32_t>(tsp->matrix.size())};
  const auto& ks = std::get<KnapsackPenalty>(spec);
  return BitStringSpec{static_cast<std::uint32_t>(ks.weights.size())};
}

inline bool objective_accepts(const ObjectiveSpec& spec, const Genome& g) {
  if (const auto* om = std::get_if<OneMaxMin>(&spec)) {
    const auto* b = std::get_if<BitString>(&g);
    return b && b->bits.size() == om->n;
  }
  if (const auto* sp = std::get_if<Sphere>(&spec)) {
    const auto* r = std::get_if<RealVector>(&g);
    return r && r->values.size() == sp->d;
  }
  if (const auto* tsp = std::get_if<TspTour>(&spec)) {
    const auto* p = std::get_if<Permutation>(&g);
    return p && p->order.size() == tsp->matrix.size();
  }
  const auto& ks = std::get<KnapsackPenalty>(spec);
  const auto* b = std::get_if<BitString>(&g);
  return b && b->bits.size() == ks.weights.size();
}

// Deterministic, nonnegative. Sums run in fixed member order so identical
// (spec, genome) pairs give identical doubles on every platform.
inline double evaluate(const ObjectiveSpec& spec, const Genome& g) {
  if (!objective_accepts(spec, g))
    throw EvaluationError("genome representation does not match objective");

  if (std::holds_alternative<OneMaxMin>(spec)) {
    const auto& b = std::get<BitString>(g);
    std::uint64_t zeros = 0;
    for (auto bit : b.bits) zeros += bit ? 0 : 1;
    return static_cast<double>(zeros);
  }
  if (std::holds_alternative<Sphere>(spec)) {
    const auto& r = std::get<RealVector>(g);
    double sum = 0.0;
    for (double v : r.values) sum += v * v;
    return sum;
  }
  if (const auto* tsp = std::get_if<TspTour>(&spec)) {
    const auto& p = std::get<Permutation>(g);
    const std::size_t n = p.order.size();
    double len = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      len += tsp->matrix[p.order[i]][p.order[(i + 1) % n]];
    return len;
  }
  const auto& ks = std::get<KnapsackPenalty>(spec);
  const auto& b = std::get<BitString>(g);
  double value = 0.0;
  double weight = 0.0;
  for (std::size_t i = 0; i < b.bits.size(); ++i) {
    if (b.bits[i]) {
      value += ks.values[i];
      weight += ks.weights[i];
    }
  }
  const double violation = std::max(0.0, weight - ks.capacity);
  return ks.shift() - value + ks.penalty_coefficient * violation;
}

// Whether the objective only ever takes integer values, in which case
// "attains the optimum" is checked with exact equality instead of 1e-9.
inline bool integer_valued(const ObjectiveSpec& spec) {
  const auto integral = [](double v) { return v == std::floor(v); };
  if (std::holds_alternative<OneMaxMin>(spec)) return true;
  if (std::holds_alternative<Sphere>(spec)) return false;
  if (const auto* tsp = std::get_if<TspTour>(&spec)) {
    for (const auto& row : tsp->matrix)
      for (double v : row)
        if (!integral(v)) return false;
    return true;
  }
  const auto& ks = std::get<KnapsackPenalty>(spec);
  for (double w : ks.weights)
    if (!integral(w)) return false;
  for (double v : ks.values)
    if (!integral(v)) return false;
  return integral(ks.capacity) && integral(ks.penalty_coefficient);
}

inline double optimum_tolerance(const ObjectiveSpec& spec) {
  return integer_valued(spec) ? 0.0 : 1e-9;
}

// ---------------------------------------------------------------------------

struct BestMember {
  std::size_t index = 0;
  double value = 0.0;
};

// Minimal f3, ties broken by lowest member index.
inline BestMember best_member(const ObjectiveSpec& spec, const Population& pop) {
  if (pop.members.empty()) throw AnalysisError("best of empty population");
  BestMember best{0, evaluate(spec, pop.members[0])};
  for (std::size_t i = 1; i < pop.members.size(); ++i) {
    const double v = evaluate(spec, pop.members[i]);
    if (v < best.value) best = {i, v};
  }
  return best;
}

inline std::pair<Genome, double> best_of_population(const ObjectiveSpec& spec,
                                                    const Population& pop) {
  const BestMember b = best_member(spec, pop);
  return {pop.members[b.index], b.value};
}

// ---------------------------------------------------------------------------
// Search cost (f2): counts, not wall time, so runs compare across platforms.

struct SearchCost {
  std::uint64_t evaluations = 0;
  std::uint64_t generations = 0;
  std::uint64_t variations = 0;

  SearchCost& operator+=(const SearchCost& o) {
    evaluations += o.evaluations;
    generations += o.generations;
    variations += o.variations;
    return *this;
  }

  bool operator==(const SearchCost&) const = default;
};

inline double search_cost_value(const SearchCost& cost, double normalizer) {
  if (!(normalizer > 0.0)) throw ConfigError("cost normalizer must be positive");
  return static_cast<double>(cost.evaluations) / normalizer;
}

// ---------------------------------------------------------------------------
// Aggregation (f1) of the search-cost and problem objectives.

struct WeightedSum {
  double w2 = 0.0;
  double w3 = 1.0;

  bool operator==(const WeightedSum&) const = default;
};

struct ProductAggregator {
  bool operator==(const ProductAggregator&) const = default;
};

struct ParetoAggregator {
  bool operator==(const ParetoAggregator&) const = default;
};

using AggregatorSpec = std::variant<WeightedSum, ProductAggregator, ParetoAggregator>;

inline void validate_aggregator(const AggregatorSpec& agg) {
  if (const auto* ws = std::get_if<WeightedSum>(&agg))
    if (ws->w2 < 0.0 || ws->w3 < 0.0)
      throw ConfigError("weighted_sum: weights must be nonnegative");
}

using AggregateValue = std::variant<double, std::pair<double, double>>;

// WeightedSum -> w2*f2 + w3*f3; Product -> (1+f2)(1+f3) - 1 (zero at the
// joint optimum); Pareto -> the unmodified pair.
inline AggregateValue aggregate(const AggregatorSpec& agg, double f2_value,
                                double f3_value) {
  validate_aggregator(agg);
  if (const auto* ws = std::get_if<WeightedSum>(&agg))
    return ws->w2 * f2_value + ws->w3 * f3_value;
  if (std::holds_alternative<ProductAggregator>(agg))
    return (1.0 + f2_value) * (1.0 + f3_value) - 1.0;
  return std::make_pair(f2_value, f3_value);
}

} // namespace etm

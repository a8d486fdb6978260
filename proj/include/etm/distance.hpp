#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "etm/objective.hpp"

namespace etm {

// Objective values are snapped to a fixed binary grid (step 2^-30, finer
// than the 1e-9 optimum tolerance) before differencing. Grid points below
// 2^22 subtract and add exactly in doubles, which is what makes the
// pseudometric axioms hold exactly instead of failing at the last ulp on
// near-collinear value triples.
inline double quantize_value(double v) { return std::nearbyint(v * 0x1p30) * 0x1p-30; }

// Objective-difference distance D(x, y) = |f(x) - f(y)|. A pseudometric, not
// a metric: distinct genomes with equal fitness sit at distance zero.
inline double distance(const Genome& x, const Genome& y, const ObjectiveSpec& f) {
  return std::abs(quantize_value(evaluate(f, x)) - quantize_value(evaluate(f, y)));
}

enum class Provenance { declared, brute_force };

// The set of optimal solutions X* together with the optimal value f3*.
// space_size records how many candidates an exhaustive search enumerated
// (zero for declared optima).
struct OptimalSet {
  std::optional<double> optimum_value;
  std::vector<Genome> optima;
  Provenance provenance = Provenance::declared;
  std::uint64_t space_size = 0;

  bool operator==(const OptimalSet&) const = default;
};

inline OptimalSet declared_optimum(double value, std::vector<Genome> optima = {}) {
  OptimalSet set;
  set.optimum_value = value;
  set.optima = std::move(optima);
  set.provenance = Provenance::declared;
  return set;
}

// D(x, Y) = inf over the set; with a known optimal value this collapses to
// |f(x) - f3*|.
inline double distance_to_set(const Genome& x, const OptimalSet& target,
                              const ObjectiveSpec& f) {
  if (target.optimum_value.has_value())
    return std::abs(quantize_value(evaluate(f, x)) - quantize_value(*target.optimum_value));
  if (target.optima.empty())
    throw AnalysisError("optimal set has neither optima nor an optimum value");
  double best = distance(x, target.optima.front(), f);
  for (std::size_t i = 1; i < target.optima.size(); ++i)
    best = std::min(best, distance(x, target.optima[i], f));
  return best;
}

} // namespace etm

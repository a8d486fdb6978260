#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "etm/objective.hpp"

namespace etm {

// ---------------------------------------------------------------------------
// Variation operators v.

struct BitFlip {
  double rate = 0.0;

  bool operator==(const BitFlip&) const = default;
};

// Adjacent pairs (0,1), (2,3), ... exchange one-point tails; an odd trailing
// member passes through. Every resulting child then gets BitFlip(rate).
struct OnePointCrossover {
  double rate = 0.0;

  bool operator==(const OnePointCrossover&) const = default;
};

struct GaussianMutation {
  double sigma = 1.0; // clamped to the representation bounds afterwards

  bool operator==(const GaussianMutation&) const = default;
};

struct SwapMutation {
  double rate = 0.0;

  bool operator==(const SwapMutation&) const = default;
};

using VariationSpec = std::variant<BitFlip, OnePointCrossover, GaussianMutation, SwapMutation>;

inline void validate_variation(const VariationSpec& spec) {
  if (const auto* bf = std::get_if<BitFlip>(&spec)) {
    if (bf->rate < 0.0 || bf->rate > 1.0) throw ConfigError("bit_flip rate outside [0,1]");
  } else if (const auto* xo = std::get_if<OnePointCrossover>(&spec)) {
    if (xo->rate < 0.0 || xo->rate > 1.0)
      throw ConfigError("one_point_crossover rate outside [0,1]");
  } else if (const auto* gm = std::get_if<GaussianMutation>(&spec)) {
    if (!(gm->sigma > 0.0)) throw ConfigError("gaussian_mutation sigma must be positive");
  } else if (const auto* sm = std::get_if<SwapMutation>(&spec)) {
    if (sm->rate < 0.0 || sm->rate > 1.0) throw ConfigError("swap_mutation rate outside [0,1]");
  }
}

inline bool variation_accepts(const VariationSpec& spec, const RepresentationSpec& repr) {
  if (std::holds_alternative<BitFlip>(spec) ||
      std::holds_alternative<OnePointCrossover>(spec))
    return std::holds_alternative<BitStringSpec>(repr);
  if (std::holds_alternative<GaussianMutation>(spec))
    return std::holds_alternative<RealVectorSpec>(repr);
  return std::holds_alternative<PermutationSpec>(repr);
}

// True when the operator's tunable parameter is a probability; the
// self-adaptive extension then must keep it within [0,1].
inline bool variation_param_is_rate(const VariationSpec& spec) {
  return !std::holds_alternative<GaussianMutation>(spec);
}

namespace detail {

inline void bitflip_in_place(BitString& g, double rate, rng::Stream& s) {
  for (auto& bit : g.bits)
    if (s.next_bernoulli(rate)) bit ^= 1;
}

} // namespace detail

// Applies v to every member. Output size equals input size, genome invariants
// are preserved (bounds clamped, permutations stay bijections) and the result
// is a pure function of (spec, pop, stream). Per-member draws come from
// substream(member index), so evaluation order cannot matter.
inline Population vary(const VariationSpec& spec, const RepresentationSpec& repr,
                       const Population& pop, rng::Stream stream) {
  validate_variation(spec);
  if (!variation_accepts(spec, repr))
    throw ConfigError("variation operator does not match the representation");

  const bool adaptive = !pop.strategy_params.empty();
  const auto member_param = [&](std::size_t i, double base) {
    return adaptive ? pop.strategy_params[i] : base;
  };

  Population out = pop;

  if (const auto* bf = std::get_if<BitFlip>(&spec)) {
    for (std::size_t i = 0; i < out.members.size(); ++i) {
      rng::Stream s = stream.substream(i);
      detail::bitflip_in_place(std::get<BitString>(out.members[i]),
                               member_param(i, bf->rate), s);
    }
    return out;
  }

  if (const auto* xo = std::get_if<OnePointCrossover>(&spec)) {
    const std::size_t n = std::get<BitStringSpec>(repr).n;
    const std::size_t size = out.members.size();
    if (n >= 2) {
      for (std::size_t pair = 0; 2 * pair + 1 < size; ++pair) {
        rng::Stream cut_stream = stream.substream(size + pair);
        const auto cut = 1 + cut_stream.next_below(n - 1);
        auto& a = std::get<BitString>(out.members[2 * pair]).bits;
        auto& b = std::get<BitString>(out.members[2 * pair + 1]).bits;
        for (std::size_t j = cut; j < n; ++j) std::swap(a[j], b[j]);
      }
    }
    for (std::size_t i = 0; i < size; ++i) {
      rng::Stream s = stream.substream(i);
      detail::bitflip_in_place(std::get<BitString>(out.members[i]),
                               member_param(i, xo->rate), s);
    }
    return out;
  }

  if (const auto* gm = std::get_if<GaussianMutation>(&spec)) {
    const auto& rv = std::get<RealVectorSpec>(repr);
    for (std::size_t i = 0; i < out.members.size(); ++i) {
      rng::Stream s = stream.substream(i);
      auto& values = std::get<RealVector>(out.members[i]).values;
      const double sigma = member_param(i, gm->sigma);
      for (std::size_t j = 0; j < values.size(); ++j) {
        const double v = values[j] + sigma * s.next_gaussian();
        values[j] = std::clamp(v, rv.bounds[j].lo, rv.bounds[j].hi);
      }
    }
    return out;
  }

  const auto& sm = std::get<SwapMutation>(spec);
  for (std::size_t i = 0; i < out.members.size(); ++i) {
    rng::Stream s = stream.substream(i);
    auto& order = std::get<Permutation>(out.members[i]).order;
    const double rate = member_param(i, sm.rate);
    for (std::size_t j = 0; j < order.size(); ++j) {
      if (s.next_bernoulli(rate)) {
        const auto k = static_cast<std::size_t>(s.next_below(order.size()));
        std::swap(order[j], order[k]);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Selection operators s.

struct Truncation {
  double keep_fraction = 0.5;

  bool operator==(const Truncation&) const = default;
};

struct Tournament {
  std::uint32_t k = 2; // contestants drawn without replacement

  bool operator==(const Tournament&) const = default;
};

// Rank-based weights for minimization: weight = size - rank with 0-based
// fractional (tie-averaged) ranks, so equal fitnesses select uniformly.
struct Proportional {
  bool operator==(const Proportional&) const = default;
};

struct SelectionSpec {
  std::variant<Truncation, Tournament, Proportional> method;
  bool elitism = false;

  bool operator==(const SelectionSpec&) const = default;
};

inline void validate_selection(const SelectionSpec& spec) {
  if (const auto* tr = std::get_if<Truncation>(&spec.method)) {
    if (!(tr->keep_fraction > 0.0) || tr->keep_fraction > 1.0)
      throw ConfigError("truncation keep_fraction outside (0,1]");
  } else if (const auto* to = std::get_if<Tournament>(&spec.method)) {
    if (to->k < 1) throw ConfigError("tournament k must be at least 1");
  }
}

// The incumbent best genome elitism must keep alive.
struct Incumbent {
  Genome genome;
  double fitness = 0.0;
  std::optional<double> strategy_param;
};

struct SelectionResult {
  Population pop;
  std::vector<double> fitnesses; // aligned with pop.members
};

namespace detail {

inline std::vector<std::size_t> indices_by_fitness(std::span<const double> fitnesses) {
  std::vector<std::size_t> idx(fitnesses.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return fitnesses[a] < fitnesses[b];
  });
  return idx;
}

} // namespace detail

// Returns output_size members drawn from pop (never fabricated). Ties break
// toward the lowest member index everywhere. With elitism on, the incumbent
// best genome (given, or computed from the input) is guaranteed a slot by
// replacing the worst output member when absent.
inline SelectionResult select(const SelectionSpec& spec, const Population& pop,
                              std::span<const double> fitnesses,
                              std::size_t output_size, rng::Stream stream,
                              const std::optional<Incumbent>& incumbent = std::nullopt) {
  validate_selection(spec);
  if (fitnesses.size() != pop.members.size())
    throw EngineError("selection fitness list does not match the population");
  if (pop.members.empty()) throw EngineError("selection over an empty population");
  if (output_size == 0) throw ConfigError("selection output size must be positive");

  const std::size_t size = pop.members.size();
  const bool adaptive = !pop.strategy_params.empty();
  std::vector<std::size_t> chosen;
  chosen.reserve(output_size);

  if (const auto* tr = std::get_if<Truncation>(&spec.method)) {
    const auto sorted = detail::indices_by_fitness(fitnesses);
    auto keep = static_cast<std::size_t>(std::llround(tr->keep_fraction * static_cast<double>(size)));
    keep = std::clamp<std::size_t>(keep, 1, size);
    for (std::size_t i = 0; i < output_size; ++i) chosen.push_back(sorted[i % keep]);
  } else if (const auto* to = std::get_if<Tournament>(&spec.method)) {
    if (to->k > size) throw ConfigError("tournament k exceeds the population size");
    std::vector<std::size_t> urn(size);
    for (std::size_t slot = 0; slot < output_size; ++slot) {
      rng::Stream s = stream.substream(slot);
      std::iota(urn.begin(), urn.end(), std::size_t{0});
      std::size_t winner = size; // sentinel
      for (std::uint32_t draw = 0; draw < to->k; ++draw) {
        const auto pick = draw + static_cast<std::size_t>(s.next_below(size - draw));
        std::swap(urn[draw], urn[pick]);
        const std::size_t cand = urn[draw];
        if (winner == size || fitnesses[cand] < fitnesses[winner] ||
            (fitnesses[cand] == fitnesses[winner] && cand < winner))
          winner = cand;
      }
      chosen.push_back(winner);
    }
  } else {
    const auto sorted = detail::indices_by_fitness(fitnesses);
    std::vector<double> weight(size, 0.0);
    for (std::size_t pos = 0; pos < size;) {
      std::size_t end = pos + 1;
      while (end < size && fitnesses[sorted[end]] == fitnesses[sorted[pos]]) ++end;
      const double avg_rank = (static_cast<double>(pos) + static_cast<double>(end - 1)) / 2.0;
      for (std::size_t i = pos; i < end; ++i)
        weight[sorted[i]] = static_cast<double>(size) - avg_rank;
      pos = end;
    }
    double total = 0.0;
    for (double w : weight) total += w;
    for (std::size_t slot = 0; slot < output_size; ++slot) {
      rng::Stream s = stream.substream(slot);
      const double x = s.next_double() * total;
      double cum = 0.0;
      std::size_t pick = size - 1;
      for (std::size_t i = 0; i < size; ++i) {
        cum += weight[i];
        if (x < cum) {
          pick = i;
          break;
        }
      }
      chosen.push_back(pick);
    }
  }

  SelectionResult result;
  result.pop.generation = pop.generation;
  result.pop.members.reserve(output_size);
  result.fitnesses.reserve(output_size);
  if (adaptive) result.pop.strategy_params.reserve(output_size);
  for (std::size_t idx : chosen) {
    result.pop.members.push_back(pop.members[idx]);
    result.fitnesses.push_back(fitnesses[idx]);
    if (adaptive) result.pop.strategy_params.push_back(pop.strategy_params[idx]);
  }

  if (spec.elitism) {
    Incumbent elite;
    if (incumbent.has_value()) {
      elite = *incumbent;
    } else {
      std::size_t best = 0;
      for (std::size_t i = 1; i < size; ++i)
        if (fitnesses[i] < fitnesses[best]) best = i;
      elite.genome = pop.members[best];
      elite.fitness = fitnesses[best];
      if (adaptive) elite.strategy_param = pop.strategy_params[best];
    }
    const bool present = std::any_of(result.pop.members.begin(), result.pop.members.end(),
                                     [&](const Genome& g) { return g == elite.genome; });
    if (!present) {
      std::size_t worst = 0;
      for (std::size_t i = 1; i < result.fitnesses.size(); ++i)
        if (result.fitnesses[i] > result.fitnesses[worst]) worst = i;
      result.pop.members[worst] = elite.genome;
      result.fitnesses[worst] = elite.fitness;
      if (adaptive && elite.strategy_param.has_value())
        result.pop.strategy_params[worst] = *elite.strategy_param;
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Self-adaptive extension: a per-genome variation parameter evolves alongside
// the object-level genes (the class-3 approximation).

struct SelfAdaptiveExtension {
  bool enabled = false;
  double param_min = 0.0;
  double param_max = 0.0;
  double meta_sigma = 0.0;
  double init_param = 0.0;

  bool operator==(const SelfAdaptiveExtension&) const = default;
};

inline void validate_self_adaptive(const SelfAdaptiveExtension& ext,
                                   const VariationSpec& variation) {
  if (!ext.enabled) return;
  if (!(ext.param_min > 0.0)) throw ConfigError("self_adaptive param_min must be positive");
  if (ext.param_max < ext.param_min)
    throw ConfigError("self_adaptive param_max below param_min");
  if (ext.init_param < ext.param_min || ext.init_param > ext.param_max)
    throw ConfigError("self_adaptive init_param outside [param_min, param_max]");
  if (ext.meta_sigma < 0.0) throw ConfigError("self_adaptive meta_sigma must be nonnegative");
  if (variation_param_is_rate(variation) && ext.param_max > 1.0)
    throw ConfigError("self_adaptive param_max above 1 for a rate-valued parameter");
}

// Log-normally perturbs each member's strategy parameter and clamps it to the
// declared bounds; object-level genes are untouched.
inline Population apply_self_adaptation(const SelfAdaptiveExtension& ext,
                                        const Population& pop, rng::Stream stream) {
  if (!ext.enabled) throw ConfigError("self-adaptation applied while disabled");
  if (pop.strategy_params.size() != pop.members.size())
    throw ConfigError("population carries no strategy parameters");

  Population out = pop;
  for (std::size_t i = 0; i < out.strategy_params.size(); ++i) {
    rng::Stream s = stream.substream(i);
    const double factor = std::exp(ext.meta_sigma * s.next_gaussian());
    out.strategy_params[i] =
        std::clamp(out.strategy_params[i] * factor, ext.param_min, ext.param_max);
  }
  return out;
}

inline void ensure_strategy_params(Population& pop, const SelfAdaptiveExtension& ext) {
  if (!ext.enabled) return;
  if (pop.strategy_params.empty())
    pop.strategy_params.assign(pop.members.size(), ext.init_param);
  else if (pop.strategy_params.size() != pop.members.size())
    throw ConfigError("strategy parameter list does not match the population");
}

} // namespace etm

#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "etm/errors.hpp"
#include "etm/rng.hpp"

namespace etm {

// ---------------------------------------------------------------------------
// Genomes: the three representations cover bit-vector, real-vector and
// tour-style search spaces.

struct BitString {
  std::vector<std::uint8_t> bits; // each 0 or 1

  bool operator==(const BitString&) const = default;
};

struct RealVector {
  std::vector<double> values;

  bool operator==(const RealVector&) const = default;
};

struct Permutation {
  std::vector<std::uint32_t> order; // bijection on {0..n-1}

  bool operator==(const Permutation&) const = default;
};

using Genome = std::variant<BitString, RealVector, Permutation>;

// ---------------------------------------------------------------------------
// Representation specs describe the space a genome lives in.

struct Bounds {
  double lo = 0.0;
  double hi = 0.0;

  bool operator==(const Bounds&) const = default;
};

struct BitStringSpec {
  std::uint32_t n = 0;

  bool operator==(const BitStringSpec&) const = default;
};

struct RealVectorSpec {
  std::uint32_t d = 0;
  std::vector<Bounds> bounds; // one per coordinate

  bool operator==(const RealVectorSpec&) const = default;
};

struct PermutationSpec {
  std::uint32_t n = 0;

  bool operator==(const PermutationSpec&) const = default;
};

using RepresentationSpec = std::variant<BitStringSpec, RealVectorSpec, PermutationSpec>;

inline void validate_representation(const RepresentationSpec& spec) {
  if (const auto* bs = std::get_if<BitStringSpec>(&spec)) {
    if (bs->n == 0) throw ConfigError("bitstring length must be positive");
  } else if (const auto* rv = std::get_if<RealVectorSpec>(&spec)) {
    if (rv->d == 0) throw ConfigError("real vector dimension must be positive");
    if (rv->bounds.size() != rv->d)
      throw ConfigError("real vector needs one [lo, hi] pair per coordinate");
    for (const Bounds& b : rv->bounds)
      if (b.lo > b.hi) throw ConfigError("real vector bounds with lo > hi");
  } else if (const auto* pm = std::get_if<PermutationSpec>(&spec)) {
    if (pm->n == 0) throw ConfigError("permutation length must be positive");
  }
}

inline bool genome_matches(const RepresentationSpec& spec, const Genome& g) {
  if (const auto* bs = std::get_if<BitStringSpec>(&spec)) {
    const auto* v = std::get_if<BitString>(&g);
    return v && v->bits.size() == bs->n;
  }
  if (const auto* rv = std::get_if<RealVectorSpec>(&spec)) {
    const auto* v = std::get_if<RealVector>(&g);
    if (!v || v->values.size() != rv->d) return false;
    for (std::size_t i = 0; i < v->values.size(); ++i)
      if (v->values[i] < rv->bounds[i].lo || v->values[i] > rv->bounds[i].hi)
        return false;
    return true;
  }
  const auto* pm = std::get_if<PermutationSpec>(&spec);
  const auto* v = std::get_if<Permutation>(&g);
  if (!pm || !v || v->order.size() != pm->n) return false;
  std::vector<bool> seen(pm->n, false);
  for (std::uint32_t idx : v->order) {
    if (idx >= pm->n || seen[idx]) return false;
    seen[idx] = true;
  }
  return true;
}

// Human-facing form: bitstrings as 0/1 digits, vectors and permutations as
// comma-joined lists.
std::string genome_to_string(const Genome& g);
std::string format_double(double v);

// ---------------------------------------------------------------------------
// Population: an ordered multiset of genomes plus the generation index.
// strategy_params is populated only under the self-adaptive extension and
// carries one evolvable variation parameter per member.

struct Population {
  std::vector<Genome> members;
  std::uint64_t generation = 0;
  std::vector<double> strategy_params;

  std::size_t size() const { return members.size(); }

  bool operator==(const Population&) const = default;
};

// Pure function of (spec, size, seed): identical inputs give byte-identical
// populations.
inline Population init_population(const RepresentationSpec& spec, std::size_t size,
                                  std::uint64_t seed) {
  validate_representation(spec);
  if (size == 0) throw ConfigError("population size must be positive");

  const rng::Stream base = rng::Stream::derive(seed, "init");
  Population pop;
  pop.members.reserve(size);
  for (std::size_t i = 0; i < size; ++i) {
    rng::Stream s = base.substream(i);
    if (const auto* bs = std::get_if<BitStringSpec>(&spec)) {
      BitString g;
      g.bits.resize(bs->n);
      for (auto& bit : g.bits) bit = static_cast<std::uint8_t>(s.next_below(2));
      pop.members.emplace_back(std::move(g));
    } else if (const auto* rv = std::get_if<RealVectorSpec>(&spec)) {
      RealVector g;
      g.values.resize(rv->d);
      for (std::size_t j = 0; j < rv->d; ++j) {
        const Bounds& b = rv->bounds[j];
        g.values[j] = b.lo + s.next_double() * (b.hi - b.lo);
      }
      pop.members.emplace_back(std::move(g));
    } else {
      const auto& pm = std::get<PermutationSpec>(spec);
      Permutation g;
      g.order.resize(pm.n);
      for (std::uint32_t j = 0; j < pm.n; ++j) g.order[j] = j;
      for (std::uint32_t j = pm.n; j > 1; --j) {
        const auto k = static_cast<std::uint32_t>(s.next_below(j));
        std::swap(g.order[j - 1], g.order[k]);
      }
      pop.members.emplace_back(std::move(g));
    }
  }
  return pop;
}

} // namespace etm

#include "etm/detail/genome_format.hpp"

#pragma once

#include <algorithm>
#include <cstdint>
#include <string>

#include "etm/distance.hpp"

namespace etm {

// Enumeration limits for the exhaustive oracle. Beyond these the caller must
// declare the optimum instead.
inline constexpr std::uint32_t kMaxOracleBits = 24;
inline constexpr std::uint32_t kMaxOracleCities = 9;

inline std::uint64_t factorial(std::uint64_t n) {
  std::uint64_t f = 1;
  for (std::uint64_t i = 2; i <= n; ++i) f *= i;
  return f;
}

// Number of candidates the oracle would enumerate for this objective.
inline std::uint64_t enumeration_size(const ObjectiveSpec& spec) {
  if (const auto* om = std::get_if<OneMaxMin>(&spec))
    return std::uint64_t{1} << om->n;
  if (const auto* ks = std::get_if<KnapsackPenalty>(&spec))
    return std::uint64_t{1} << ks->weights.size();
  if (const auto* tsp = std::get_if<TspTour>(&spec)) {
    const auto n = static_cast<std::uint32_t>(tsp->matrix.size());
    if (n <= 2) return 1;
    return factorial(n - 1) / 2; // distinct undirected tours
  }
  return 0; // Sphere: not enumerable
}

// Exhaustively enumerates the search space and returns the minimal value with
// every argmin genome. Tours are enumerated in canonical form (city 0 first,
// second city smaller than last) so each undirected tour appears once.
inline OptimalSet brute_force_optimum(const ObjectiveSpec& spec,
                                      std::uint64_t max_candidates = std::uint64_t{1}
                                                                     << kMaxOracleBits) {
  validate_objective(spec);

  if (std::holds_alternative<Sphere>(spec))
    throw OracleRefused(
        "sphere is not enumerable; declare the analytic optimum (0 at the origin)");

  OptimalSet result;
  result.provenance = Provenance::brute_force;

  const auto consider = [&](double value, const Genome& g) {
    if (!result.optimum_value || value < *result.optimum_value) {
      result.optimum_value = value;
      result.optima.clear();
      result.optima.push_back(g);
    } else if (value == *result.optimum_value) {
      result.optima.push_back(g);
    }
  };

  if (std::holds_alternative<OneMaxMin>(spec) ||
      std::holds_alternative<KnapsackPenalty>(spec)) {
    const auto n = std::holds_alternative<OneMaxMin>(spec)
                       ? std::get<OneMaxMin>(spec).n
                       : static_cast<std::uint32_t>(
                             std::get<KnapsackPenalty>(spec).weights.size());
    if (n > kMaxOracleBits)
      throw OracleRefused("bitstring space 2^" + std::to_string(n) +
                          " exceeds the oracle bound 2^" + std::to_string(kMaxOracleBits));
    const std::uint64_t space = std::uint64_t{1} << n;
    if (space > max_candidates)
      throw OracleRefused("bitstring space exceeds the requested candidate bound");
    BitString g;
    g.bits.resize(n);
    for (std::uint64_t mask = 0; mask < space; ++mask) {
      for (std::uint32_t i = 0; i < n; ++i)
        g.bits[i] = static_cast<std::uint8_t>((mask >> i) & 1);
      consider(evaluate(spec, Genome{g}), Genome{g});
    }
    result.space_size = space;
    return result;
  }

  const auto& tsp = std::get<TspTour>(spec);
  const auto n = static_cast<std::uint32_t>(tsp.matrix.size());
  if (n > kMaxOracleCities)
    throw OracleRefused("tour space (" + std::to_string(n) +
                        "-1)!/2 exceeds the oracle bound of " +
                        std::to_string(kMaxOracleCities) + " cities");
  const std::uint64_t space = enumeration_size(spec);
  if (space > max_candidates)
    throw OracleRefused("tour space exceeds the requested candidate bound");

  Permutation g;
  g.order.resize(n);
  if (n <= 2) {
    for (std::uint32_t i = 0; i < n; ++i) g.order[i] = i;
    consider(evaluate(spec, Genome{g}), Genome{g});
    result.space_size = 1;
    return result;
  }

  std::vector<std::uint32_t> tail(n - 1);
  for (std::uint32_t i = 0; i < n - 1; ++i) tail[i] = i + 1;
  std::uint64_t enumerated = 0;
  do {
    if (tail.front() > tail.back()) continue; // reversed duplicate
    g.order[0] = 0;
    std::copy(tail.begin(), tail.end(), g.order.begin() + 1);
    consider(evaluate(spec, Genome{g}), Genome{g});
    ++enumerated;
  } while (std::next_permutation(tail.begin(), tail.end()));
  result.space_size = enumerated;
  return result;
}

} // namespace etm

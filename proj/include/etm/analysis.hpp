#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "etm/oracle.hpp"
#include "etm/parallel.hpp"

namespace etm {

// ---------------------------------------------------------------------------
// Convergence verdicts over a finite horizon. All verdicts are empirical
// statements about the observed trace; true asymptotics are not decidable
// from finite data, so every verdict carries its horizon.

enum class VerdictKind { convergent, convergent_with_error, asymptotic_evidence, divergent };

constexpr std::string_view verdict_kind_name(VerdictKind k) {
  switch (k) {
    case VerdictKind::convergent: return "convergent";
    case VerdictKind::convergent_with_error: return "convergent-with-error";
    case VerdictKind::asymptotic_evidence: return "asymptotically-convergent-evidence";
    case VerdictKind::divergent: return "divergent";
  }
  return "?";
}

struct EpsilonTau {
  double epsilon = 0.0;
  // Last generation with D >= epsilon (so D < epsilon for every t > tau);
  // -1 when the bound held from the start.
  std::int64_t tau = -1;

  bool operator==(const EpsilonTau&) const = default;
};

inline constexpr std::string_view kVerdictScope = "empirical over finite horizon";

struct ConvergenceVerdict {
  VerdictKind kind = VerdictKind::divergent;
  // convergent / convergent-with-error: first generation of the final
  // suffix on which the distance bound holds through T.
  std::int64_t tau = -1;
  double error_bound = 0.0; // r, for convergent-with-error
  std::vector<EpsilonTau> epsilon_taus;
  std::uint64_t horizon = 0; // T

  bool operator==(const ConvergenceVerdict&) const = default;
};

// Case order: convergent, convergent-with-error (if r given), asymptotic
// evidence (if a grid is given and every epsilon is achieved and held),
// divergent otherwise.
inline ConvergenceVerdict verdict_from_distance_series(std::span<const double> dist,
                                                       double zero_tolerance,
                                                       std::optional<double> error_r,
                                                       std::span<const double> epsilon_grid) {
  if (dist.empty()) throw AnalysisError("verdict over an empty trace");
  const std::uint64_t horizon = dist.size() - 1;

  const auto suffix_start = [&](double bound) {
    std::int64_t tau = static_cast<std::int64_t>(horizon);
    while (tau > 0 && dist[static_cast<std::size_t>(tau - 1)] <= bound) --tau;
    return tau;
  };

  ConvergenceVerdict verdict;
  verdict.horizon = horizon;

  if (dist.back() <= zero_tolerance &&
      dist[static_cast<std::size_t>(suffix_start(zero_tolerance))] <= zero_tolerance) {
    verdict.kind = VerdictKind::convergent;
    verdict.tau = suffix_start(zero_tolerance);
    return verdict;
  }
  if (error_r.has_value() && dist.back() <= *error_r) {
    verdict.kind = VerdictKind::convergent_with_error;
    verdict.error_bound = *error_r;
    verdict.tau = suffix_start(*error_r);
    return verdict;
  }
  if (!epsilon_grid.empty()) {
    bool all_achieved = true;
    std::vector<EpsilonTau> taus;
    for (double eps : epsilon_grid) {
      if (!(dist.back() < eps)) {
        all_achieved = false;
        break;
      }
      std::int64_t tau = -1;
      for (std::size_t t = 0; t < dist.size(); ++t)
        if (dist[t] >= eps) tau = static_cast<std::int64_t>(t);
      taus.push_back({eps, tau});
    }
    if (all_achieved) {
      verdict.kind = VerdictKind::asymptotic_evidence;
      verdict.epsilon_taus = std::move(taus);
      return verdict;
    }
  }
  verdict.kind = VerdictKind::divergent;
  return verdict;
}

// ---------------------------------------------------------------------------
// Distance series and rates.

inline std::vector<double> distance_series(const RunTrace& trace, const OptimalSet& target) {
  std::vector<double> dist;
  dist.reserve(trace.records.size());
  for (const GenerationRecord& rec : trace.records)
    dist.push_back(distance_to_set(rec.best_genome, target, trace.spec.objective));
  return dist;
}

inline std::vector<double> distance_series(const ParallelRunTrace& trace,
                                           double joint_optimum) {
  std::vector<double> dist;
  dist.reserve(trace.records.size());
  for (const GenerationRecord& rec : trace.records)
    dist.push_back(std::abs(rec.best_f3 - joint_optimum));
  return dist;
}

// One-step drift toward the optimal set: D(t) - D(t+1); positive means the
// run moved closer.
inline double convergence_rate(const RunTrace& trace, const OptimalSet& target,
                               std::uint64_t t) {
  if (t + 1 >= trace.records.size())
    throw AnalysisError("convergence rate needs generations t and t+1 in the trace");
  const double d0 = distance_to_set(trace.records[t].best_genome, target, trace.spec.objective);
  const double d1 =
      distance_to_set(trace.records[t + 1].best_genome, target, trace.spec.objective);
  return d0 - d1;
}

inline ConvergenceVerdict convergence_verdict(const RunTrace& trace, const OptimalSet& target,
                                              std::optional<double> error_r = std::nullopt,
                                              std::span<const double> epsilon_grid = {}) {
  const std::vector<double> dist = distance_series(trace, target);
  return verdict_from_distance_series(dist, optimum_tolerance(trace.spec.objective), error_r,
                                      epsilon_grid);
}

// Expected (seed-mean) distance series for probabilistic runs. Shorter runs
// hold their final distance, since a halted run keeps its final state.
inline std::vector<double> expected_distance_series(
    std::span<const std::vector<double>> per_seed) {
  if (per_seed.empty()) throw AnalysisError("expected distance over no runs");
  std::size_t longest = 0;
  for (const auto& s : per_seed) longest = std::max(longest, s.size());
  std::vector<double> mean(longest, 0.0);
  for (const auto& s : per_seed) {
    if (s.empty()) throw AnalysisError("expected distance over an empty trace");
    for (std::size_t t = 0; t < longest; ++t)
      mean[t] += t < s.size() ? s[t] : s.back();
  }
  for (double& v : mean) v /= static_cast<double>(per_seed.size());
  return mean;
}

// ---------------------------------------------------------------------------
// Theorem harness. Thresholds are pinned here and frozen (with pilot
// observations) in the repository fixtures file; the harness asserts against
// whatever it is handed.

struct TheoremThresholds {
  double min_hit_rate_6_2 = 0.95;
  double min_maintenance_rate = 1.0;
  std::uint64_t min_found_then_lost_seeds = 1;
  double max_hit_rate_zero_mutation = 0.0;
  double transition_tolerance = 1e-12;
  double min_hit_rate_7_1 = 0.96;
  double max_hit_rate_7_2 = 0.0;
};

struct SeedOutcome {
  std::uint64_t seed = 0;
  bool hit = false;
  std::int64_t first_hit = -1;
  bool maintained = false;        // optimum never lost after the first hit
  bool found_then_lost = false;
  double final_best = 0.0;
  std::uint64_t evaluations_at_first_hit = 0;

  bool operator==(const SeedOutcome&) const = default;
};

struct TheoremReport {
  std::string theorem_id; // 6.2-optimality | 6.3-completeness | 7.1-cooperative | 7.2-competitive
  std::string configuration; // canonical JSON of the machine under test
  std::vector<std::uint64_t> seeds;
  std::uint64_t success_count = 0;
  double hit_rate = 0.0;
  std::uint64_t maintained_count = 0;
  double maintenance_rate = 0.0; // among hitting seeds
  std::vector<SeedOutcome> outcomes;
  std::map<std::string, double> metrics; // controls and auxiliary checks
  bool passed = false;
  std::string verdict;
};

namespace detail {

struct HitStats {
  SeedOutcome outcome;
};

inline SeedOutcome hit_outcome(std::span<const GenerationRecord> records,
                               std::uint64_t seed, double optimum, double tol) {
  SeedOutcome out;
  out.seed = seed;
  out.final_best = records.back().best_f3;
  for (std::size_t t = 0; t < records.size(); ++t) {
    const bool at_opt = records[t].best_f3 <= optimum + tol;
    if (at_opt && !out.hit) {
      out.hit = true;
      out.first_hit = static_cast<std::int64_t>(t);
      out.evaluations_at_first_hit = records[t].cost.evaluations;
      out.maintained = true;
    } else if (out.hit && !at_opt) {
      out.maintained = false;
      out.found_then_lost = true;
    }
  }
  return out;
}

inline void summarize(TheoremReport& report) {
  report.seeds.clear();
  report.success_count = 0;
  report.maintained_count = 0;
  std::uint64_t hits = 0;
  for (const SeedOutcome& o : report.outcomes) {
    report.seeds.push_back(o.seed);
    if (o.hit) {
      ++hits;
      if (o.maintained) ++report.maintained_count;
    }
  }
  report.success_count = hits;
  report.hit_rate =
      report.outcomes.empty() ? 0.0
                              : static_cast<double>(hits) / static_cast<double>(report.outcomes.size());
  report.maintenance_rate =
      hits == 0 ? 1.0 : static_cast<double>(report.maintained_count) / static_cast<double>(hits);
}

inline double variation_rate(const VariationSpec& v) {
  if (const auto* bf = std::get_if<BitFlip>(&v)) return bf->rate;
  if (const auto* xo = std::get_if<OnePointCrossover>(&v)) return xo->rate;
  if (const auto* sm = std::get_if<SwapMutation>(&v)) return sm->rate;
  return std::get<GaussianMutation>(v).sigma;
}

} // namespace etm::detail

// Runs the spec over `seeds` (each seed shifts the master seed and draws its
// own X0) under a Horizon-only bound so post-hit maintenance is observable.
inline std::vector<RunTrace> run_seed_batch(const AlgorithmSpec& base,
                                            std::span<const std::uint64_t> seeds,
                                            std::uint64_t horizon,
                                            std::optional<std::uint64_t> window = 50) {
  RunOptions opts;
  opts.terminations = {Horizon{horizon, true}};
  opts.inductive_window = window;
  std::vector<RunTrace> traces;
  traces.reserve(seeds.size());
  for (std::uint64_t s : seeds) {
    AlgorithmSpec spec = base;
    spec.master_seed = base.master_seed + s;
    const Population x0 =
        init_population(spec.representation, spec.population_size, spec.master_seed);
    traces.push_back(run(spec, x0, opts));
  }
  return traces;
}

// ---------------------------------------------------------------------------
// Theorems on elitism + completeness: the positive (constructive) halves.
// Returns one report per theorem id. The negative control (no elitism, heavy
// mutation, same problem) demonstrates found-then-lost; the zero-rate control
// demonstrates the completeness condition failing.

struct ElitismTheoremInput {
  AlgorithmSpec algorithm; // elitist, mutation rate strictly inside (0,1)
  OptimalSet target;
  std::vector<std::uint64_t> seeds;
  std::uint64_t horizon = 5000;
  double control_rate = 0.4;          // negative-control mutation rate
  std::uint64_t control_horizon = 2000;
};

std::pair<TheoremReport, TheoremReport> check_theorem_6_2_6_3(
    const ElitismTheoremInput& input, const TheoremThresholds& thresholds,
    const std::string& configuration);

// Cooperation/competition theorems over a parallel machine. The policy field
// of the given spec is overridden per theorem; competitive starts are redrawn
// until the joint fitness is non-optimal.
struct ParallelTheoremInput {
  ParallelSpec parallel;
  double joint_optimum = 0.0;
  double tolerance = 0.0;
  std::vector<std::uint64_t> seeds;
  std::uint64_t horizon = 5000;
  bool record_free_policy = true; // pilot-only metric, never asserted
};

std::pair<TheoremReport, TheoremReport> check_theorem_7_1_7_2(
    const ParallelTheoremInput& input, const TheoremThresholds& thresholds,
    const std::string& configuration);

// ---------------------------------------------------------------------------
// Comparative search-optimality (empirical): among a declared finite set of
// algorithms on one problem, the one with minimal mean evaluations at first
// hit. No absolute optimal algorithm is claimed.

struct SearchOptimalityEntry {
  std::string label;
  std::uint64_t hits = 0;
  double mean_evaluations_at_first_hit = 0.0; // over hitting seeds
};

struct SearchOptimalityReport {
  std::vector<SearchOptimalityEntry> entries;
  std::string best_label; // minimal mean cost among entries with hits
};

inline SearchOptimalityReport compare_search_optimality(
    std::span<const std::pair<std::string, AlgorithmSpec>> candidates,
    const OptimalSet& target, std::span<const std::uint64_t> seeds,
    std::uint64_t horizon) {
  if (candidates.empty()) throw AnalysisError("no candidate algorithms to compare");
  if (!target.optimum_value) throw AnalysisError("search-optimality needs an optimum value");
  SearchOptimalityReport report;
  for (const auto& [label, spec] : candidates) {
    const double tol = optimum_tolerance(spec.objective);
    SearchOptimalityEntry entry;
    entry.label = label;
    double total = 0.0;
    for (const RunTrace& trace : run_seed_batch(spec, seeds, horizon)) {
      const SeedOutcome out =
          detail::hit_outcome(trace.records, 0, *target.optimum_value, tol);
      if (out.hit) {
        ++entry.hits;
        total += static_cast<double>(out.evaluations_at_first_hit);
      }
    }
    if (entry.hits > 0) entry.mean_evaluations_at_first_hit = total / static_cast<double>(entry.hits);
    report.entries.push_back(std::move(entry));
  }
  const SearchOptimalityEntry* best = nullptr;
  for (const auto& e : report.entries)
    if (e.hits > 0 && (!best || e.mean_evaluations_at_first_hit < best->mean_evaluations_at_first_hit))
      best = &e;
  if (best) report.best_label = best->label;
  return report;
}

} // namespace etm

#include "etm/detail/theorems.hpp"

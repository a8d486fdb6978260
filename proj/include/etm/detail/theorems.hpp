#pragma once

// Theorem-harness implementations; included from etm/analysis.hpp.

#include <bit>

namespace etm {

namespace detail {

inline AlgorithmSpec shifted_seed(const AlgorithmSpec& base, std::uint64_t seed) {
  AlgorithmSpec spec = base;
  spec.master_seed = base.master_seed + seed;
  return spec;
}

inline ParallelSpec shifted_seed(const ParallelSpec& base, std::uint64_t seed) {
  ParallelSpec spec = base;
  for (auto& sub : spec.submachines) sub.algorithm.master_seed += seed;
  return spec;
}

inline bool monotone_series(std::span<const double> series, bool nonincreasing) {
  for (std::size_t t = 1; t < series.size(); ++t) {
    if (nonincreasing && series[t] > series[t - 1]) return false;
    if (!nonincreasing && series[t] < series[t - 1]) return false;
  }
  return true;
}

inline std::vector<double> whole_series(const ParallelRunTrace& trace) {
  std::vector<double> series;
  series.reserve(trace.records.size());
  for (const auto& rec : trace.records) series.push_back(rec.best_f3);
  return series;
}

} // namespace detail

inline std::pair<TheoremReport, TheoremReport> check_theorem_6_2_6_3(
    const ElitismTheoremInput& input, const TheoremThresholds& thresholds,
    const std::string& configuration) {
  const AlgorithmSpec& algo = input.algorithm;
  validate_algorithm(algo);
  if (!algo.selection.elitism)
    throw ConfigError("theorem 6.2 harness requires elitist selection");
  if (variation_param_is_rate(algo.variation)) {
    const double rate = detail::variation_rate(algo.variation);
    if (!(rate > 0.0 && rate < 1.0))
      throw ConfigError("theorem 6.2/6.3 harness requires a mutation rate strictly in (0,1)");
  }
  if (!input.target.optimum_value)
    throw OracleRefused("theorem harness needs an optimal set with a known value");

  const double optimum = *input.target.optimum_value;
  const double tol = optimum_tolerance(algo.objective);

  TheoremReport optimality;
  optimality.theorem_id = "6.2-optimality";
  optimality.configuration = configuration;
  for (std::size_t i = 0; i < input.seeds.size(); ++i) {
    const std::uint64_t seed = input.seeds[i];
    const AlgorithmSpec spec = detail::shifted_seed(algo, seed);
    const Population x0 =
        init_population(spec.representation, spec.population_size, spec.master_seed);
    RunOptions opts;
    opts.terminations = {Horizon{input.horizon, true}};
    const RunTrace trace = run(spec, x0, opts);
    optimality.outcomes.push_back(detail::hit_outcome(trace.records, seed, optimum, tol));
  }
  detail::summarize(optimality);

  // Negative control: elitism off, heavy mutation; the optimum should be
  // found and later lost in at least one seed.
  {
    AlgorithmSpec control = algo;
    control.selection.elitism = false;
    if (std::holds_alternative<BitFlip>(control.variation))
      control.variation = BitFlip{input.control_rate};
    else if (std::holds_alternative<SwapMutation>(control.variation))
      control.variation = SwapMutation{input.control_rate};
    std::uint64_t lost = 0;
    std::uint64_t control_hits = 0;
    for (std::uint64_t seed : input.seeds) {
      const AlgorithmSpec spec = detail::shifted_seed(control, seed);
      const Population x0 =
          init_population(spec.representation, spec.population_size, spec.master_seed);
      RunOptions opts;
      opts.terminations = {Horizon{input.control_horizon, true}};
      const RunTrace trace = run(spec, x0, opts);
      const SeedOutcome out = detail::hit_outcome(trace.records, seed, optimum, tol);
      if (out.found_then_lost) ++lost;
      if (out.hit) ++control_hits;
    }
    optimality.metrics["negative_control_found_then_lost_seeds"] = static_cast<double>(lost);
    optimality.metrics["negative_control_hit_count"] = static_cast<double>(control_hits);
  }

  optimality.passed =
      optimality.hit_rate >= thresholds.min_hit_rate_6_2 &&
      optimality.maintained_count == optimality.success_count &&
      optimality.maintenance_rate >= thresholds.min_maintenance_rate &&
      optimality.metrics["negative_control_found_then_lost_seeds"] >=
          static_cast<double>(thresholds.min_found_then_lost_seeds);
  optimality.verdict = optimality.passed ? "pass" : "fail";

  // --- Completeness (6.3): positive-transition-probability condition.
  TheoremReport completeness;
  completeness.theorem_id = "6.3-completeness";
  completeness.configuration = configuration;

  // Zero-rate control: no variation, a single non-optimal genome, hit rate 0.
  {
    AlgorithmSpec zero = algo;
    zero.population_size = 1;
    zero.selection.method = Truncation{1.0};
    zero.selection.elitism = true;
    Genome stuck;
    if (const auto* bs = std::get_if<BitStringSpec>(&algo.representation)) {
      BitString g;
      g.bits.assign(bs->n, 0);
      if (evaluate(algo.objective, Genome{g}) <= optimum + tol) g.bits.assign(bs->n, 1);
      stuck = g;
      zero.variation = BitFlip{0.0};
    } else if (const auto* pm = std::get_if<PermutationSpec>(&algo.representation)) {
      Permutation g;
      g.order.resize(pm->n);
      for (std::uint32_t i = 0; i < pm->n; ++i) g.order[i] = i;
      if (evaluate(algo.objective, Genome{g}) <= optimum + tol && pm->n >= 2)
        std::swap(g.order[0], g.order[1]);
      stuck = g;
      zero.variation = SwapMutation{0.0};
    } else {
      throw ConfigError("zero-rate control needs a bitstring or permutation problem");
    }
    if (evaluate(algo.objective, stuck) <= optimum + tol)
      throw ConfigError("could not construct a non-optimal control genome");

    Population x0;
    x0.members = {stuck};
    RunOptions opts;
    opts.terminations = {Horizon{std::min<std::uint64_t>(input.horizon, 1000), true}};
    std::uint64_t zero_hits = 0;
    for (std::uint64_t seed : input.seeds) {
      const AlgorithmSpec spec = detail::shifted_seed(zero, seed);
      const RunTrace trace = run(spec, x0, opts);
      SeedOutcome out = detail::hit_outcome(trace.records, seed, optimum, tol);
      if (out.hit) ++zero_hits;
      completeness.outcomes.push_back(out);
    }
    completeness.metrics["zero_rate_hit_count"] = static_cast<double>(zero_hits);
  }
  detail::summarize(completeness);

  // One-step transition probabilities of BitFlip on n <= 3 bits: the
  // enumerated per-mask products must match the closed-form
  // rate^H * (1-rate)^(n-H) and be strictly positive for rates in (0,1).
  {
    double max_diff = 0.0;
    double min_prob = 1.0;
    std::vector<double> rates = {0.1, 0.5, 0.9};
    if (variation_param_is_rate(algo.variation)) {
      const double r = detail::variation_rate(algo.variation);
      if (r > 0.0 && r < 1.0) rates.push_back(r);
    }
    for (std::uint32_t n = 1; n <= 3; ++n) {
      const std::uint32_t space = 1u << n;
      for (double rate : rates) {
        for (std::uint32_t x = 0; x < space; ++x) {
          double mass = 0.0;
          for (std::uint32_t y = 0; y < space; ++y) {
            const std::uint32_t mask = x ^ y;
            double enumerated = 1.0;
            for (std::uint32_t b = 0; b < n; ++b)
              enumerated *= ((mask >> b) & 1u) ? rate : 1.0 - rate;
            const int hamming = std::popcount(mask);
            const double closed =
                std::pow(rate, hamming) * std::pow(1.0 - rate, static_cast<int>(n) - hamming);
            max_diff = std::max(max_diff, std::abs(enumerated - closed));
            min_prob = std::min(min_prob, enumerated);
            mass += enumerated;
          }
          max_diff = std::max(max_diff, std::abs(mass - 1.0));
        }
      }
    }
    completeness.metrics["max_transition_abs_diff"] = max_diff;
    completeness.metrics["min_transition_probability"] = min_prob;
  }

  completeness.passed =
      completeness.hit_rate <= thresholds.max_hit_rate_zero_mutation &&
      completeness.metrics["max_transition_abs_diff"] <= thresholds.transition_tolerance &&
      completeness.metrics["min_transition_probability"] > 0.0;
  completeness.verdict = completeness.passed ? "pass" : "fail";

  return {std::move(optimality), std::move(completeness)};
}

namespace detail {

// Draws X0 and then repairs it until the joint fitness is strictly above the
// optimum: each pass replaces every block's current best member with the
// worst of 16 fresh candidates. Deterministic given the seed.
inline Population nonoptimal_parallel_start(const ParallelSpec& spec,
                                            std::uint64_t x0_seed, double optimum,
                                            double tol) {
  const auto& repr = spec.submachines.front().algorithm.representation;
  Population x0 = init_population(repr, spec.whole_size(), x0_seed);
  rng::Stream repair = rng::Stream::derive(x0_seed, "nonopt");
  for (int pass = 0; pass < 64; ++pass) {
    if (joint_fitness(spec, x0).whole > optimum + tol) return x0;
    std::size_t offset = 0;
    for (const SubmachineSpec& sub : spec.submachines) {
      const ObjectiveSpec& obj = sub.algorithm.objective;
      std::size_t best = offset;
      double best_v = evaluate(obj, x0.members[offset]);
      for (std::size_t m = offset + 1; m < offset + sub.size; ++m) {
        const double v = evaluate(obj, x0.members[m]);
        if (v < best_v) {
          best = m;
          best_v = v;
        }
      }
      Genome worst = x0.members[best];
      double worst_v = best_v;
      for (int c = 0; c < 16; ++c) {
        const Population cand = init_population(repr, 1, repair.next_u64());
        const double v = evaluate(obj, cand.members.front());
        if (v > worst_v) {
          worst_v = v;
          worst = cand.members.front();
        }
      }
      x0.members[best] = worst;
      offset += sub.size;
    }
  }
  throw EngineError("could not construct a non-optimal initial population");
}

} // namespace detail

inline std::pair<TheoremReport, TheoremReport> check_theorem_7_1_7_2(
    const ParallelTheoremInput& input, const TheoremThresholds& thresholds,
    const std::string& configuration) {
  validate_parallel(input.parallel);
  const double optimum = input.joint_optimum;
  const double tol = input.tolerance;

  RunOptions opts;
  opts.terminations = {Horizon{input.horizon, true}};

  TheoremReport cooperative;
  cooperative.theorem_id = "7.1-cooperative";
  cooperative.configuration = configuration;
  std::uint64_t coop_monotone = 0;
  for (std::uint64_t seed : input.seeds) {
    ParallelSpec spec = detail::shifted_seed(input.parallel, seed);
    spec.policy = AcceptancePolicy::cooperative_only;
    const Population x0 =
        init_population(spec.submachines.front().algorithm.representation,
                        spec.whole_size(), spec.submachines.front().algorithm.master_seed);
    const ParallelRunTrace trace = run_parallel(spec, x0, opts);
    cooperative.outcomes.push_back(detail::hit_outcome(trace.records, seed, optimum, tol));
    if (detail::monotone_series(detail::whole_series(trace), true)) ++coop_monotone;
  }
  detail::summarize(cooperative);
  cooperative.metrics["nonincreasing_traces"] = static_cast<double>(coop_monotone);
  cooperative.passed =
      cooperative.hit_rate >= thresholds.min_hit_rate_7_1 &&
      cooperative.maintained_count == cooperative.success_count &&
      cooperative.maintenance_rate >= thresholds.min_maintenance_rate &&
      coop_monotone == input.seeds.size();
  cooperative.verdict = cooperative.passed ? "pass" : "fail";

  TheoremReport competitive;
  competitive.theorem_id = "7.2-competitive";
  competitive.configuration = configuration;
  std::uint64_t comp_monotone = 0;
  std::uint64_t free_hits = 0;
  for (std::uint64_t seed : input.seeds) {
    ParallelSpec spec = detail::shifted_seed(input.parallel, seed);
    spec.policy = AcceptancePolicy::competitive_only;
    const Population x0 = detail::nonoptimal_parallel_start(
        spec, spec.submachines.front().algorithm.master_seed, optimum, tol);
    const ParallelRunTrace trace = run_parallel(spec, x0, opts);
    competitive.outcomes.push_back(detail::hit_outcome(trace.records, seed, optimum, tol));
    if (detail::monotone_series(detail::whole_series(trace), false)) ++comp_monotone;

    if (input.record_free_policy) {
      ParallelSpec free_spec = spec;
      free_spec.policy = AcceptancePolicy::free;
      const ParallelRunTrace free_trace = run_parallel(free_spec, x0, opts);
      if (detail::hit_outcome(free_trace.records, seed, optimum, tol).hit) ++free_hits;
    }
  }
  detail::summarize(competitive);
  competitive.metrics["nondecreasing_traces"] = static_cast<double>(comp_monotone);
  if (input.record_free_policy && !input.seeds.empty())
    competitive.metrics["free_policy_hit_rate"] =
        static_cast<double>(free_hits) / static_cast<double>(input.seeds.size());
  competitive.passed = competitive.hit_rate <= thresholds.max_hit_rate_7_2 &&
                       comp_monotone == input.seeds.size();
  competitive.verdict = competitive.passed ? "pass" : "fail";

  return {std::move(cooperative), std::move(competitive)};
}

} // namespace etm

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "etm/distance.hpp"
#include "etm/operators.hpp"

namespace etm {

// ---------------------------------------------------------------------------
// The full symbolic description c(E) of an evolutionary algorithm. With the
// self-adaptive extension off, the per-generation transition rule is constant
// in t; with it on, the strategy parameters evolve alongside the genes.

struct AlgorithmSpec {
  RepresentationSpec representation;
  std::uint32_t population_size = 0;
  VariationSpec variation;
  SelectionSpec selection;
  SelfAdaptiveExtension self_adaptive;
  ObjectiveSpec objective;
  AggregatorSpec aggregator;
  std::uint64_t master_seed = 0;

  bool operator==(const AlgorithmSpec&) const = default;
};

inline bool objective_matches_representation(const ObjectiveSpec& obj,
                                             const RepresentationSpec& repr) {
  if (const auto* om = std::get_if<OneMaxMin>(&obj)) {
    const auto* bs = std::get_if<BitStringSpec>(&repr);
    return bs && bs->n == om->n;
  }
  if (const auto* sp = std::get_if<Sphere>(&obj)) {
    const auto* rv = std::get_if<RealVectorSpec>(&repr);
    return rv && rv->d == sp->d;
  }
  if (const auto* tsp = std::get_if<TspTour>(&obj)) {
    const auto* pm = std::get_if<PermutationSpec>(&repr);
    return pm && pm->n == tsp->matrix.size();
  }
  const auto& ks = std::get<KnapsackPenalty>(obj);
  const auto* bs = std::get_if<BitStringSpec>(&repr);
  return bs && bs->n == ks.weights.size();
}

inline void validate_algorithm(const AlgorithmSpec& spec) {
  validate_representation(spec.representation);
  if (spec.population_size == 0) throw ConfigError("population_size must be positive");
  validate_variation(spec.variation);
  if (!variation_accepts(spec.variation, spec.representation))
    throw ConfigError("variation operator does not match the representation");
  validate_selection(spec.selection);
  validate_self_adaptive(spec.self_adaptive, spec.variation);
  validate_objective(spec.objective);
  if (!objective_matches_representation(spec.objective, spec.representation))
    throw ConfigError("objective does not match the representation");
  validate_aggregator(spec.aggregator);
}

// ---------------------------------------------------------------------------
// Termination conditions, combinable as a first-triggered-wins list. Horizon
// is the safety bound for otherwise unbounded modes; `open` records whether
// the user declares the bound open-ended rather than fixed in advance (the
// computation-class boundary between the bounded and unbounded families).

struct MaxGenerations {
  std::uint64_t limit = 0;

  bool operator==(const MaxGenerations&) const = default;
};

struct OptimumReached {
  double target = 0.0;
  double tolerance = 0.0;

  bool operator==(const OptimumReached&) const = default;
};

struct Stagnation {
  std::uint64_t window = 1;
  double min_improvement = 0.0;

  bool operator==(const Stagnation&) const = default;
};

struct Horizon {
  std::uint64_t budget = 0;
  bool open = false;

  bool operator==(const Horizon&) const = default;
};

using TerminationCondition = std::variant<MaxGenerations, OptimumReached, Stagnation, Horizon>;

struct RunOptions {
  std::vector<TerminationCondition> terminations;
  // Best-so-far stabilization window for inductive-result emission;
  // nullopt disables detection.
  std::optional<std::uint64_t> inductive_window = 50;

  bool operator==(const RunOptions&) const = default;
};

inline void validate_run_options(const RunOptions& opts) {
  bool finite = false;
  for (const auto& cond : opts.terminations) {
    if (std::holds_alternative<MaxGenerations>(cond) ||
        std::holds_alternative<Horizon>(cond))
      finite = true;
    if (const auto* st = std::get_if<Stagnation>(&cond))
      if (st->window < 1) throw ConfigError("stagnation window must be at least 1");
    if (const auto* opt = std::get_if<OptimumReached>(&cond))
      if (opt->tolerance < 0.0) throw ConfigError("optimum tolerance must be nonnegative");
  }
  if (!finite)
    throw ConfigError(
        "termination list needs at least one finite bound (max_generations or horizon)");
  if (opts.inductive_window && *opts.inductive_window < 1)
    throw ConfigError("inductive window must be at least 1");
}

enum class HaltKind { max_generations, optimum_reached, stagnation, horizon };

constexpr std::string_view halt_kind_name(HaltKind k) {
  switch (k) {
    case HaltKind::max_generations: return "max_generations";
    case HaltKind::optimum_reached: return "optimum_reached";
    case HaltKind::stagnation: return "stagnation";
    case HaltKind::horizon: return "horizon";
  }
  return "?";
}

struct HaltReason {
  HaltKind kind = HaltKind::horizon;
  std::size_t condition_index = 0; // position in the termination list

  bool operator==(const HaltReason&) const = default;
};

// ---------------------------------------------------------------------------
// Trace records. Every record stores the best individual together with its
// fitness value (the weighted-pairs convention), so a trace is a sequence of
// (x, f(x)) observations.

enum class PopulationInteraction { cooperates, competes, neutral };

constexpr std::string_view interaction_name(PopulationInteraction p) {
  switch (p) {
    case PopulationInteraction::cooperates: return "cooperates";
    case PopulationInteraction::competes: return "competes";
    case PopulationInteraction::neutral: return "neutral";
  }
  return "?";
}

struct IndividualInteraction {
  std::uint32_t index = 0; // submachine/component index
  bool cooperates = false; // otherwise competes

  bool operator==(const IndividualInteraction&) const = default;
};

struct InteractionLabel {
  PopulationInteraction population = PopulationInteraction::neutral;
  std::vector<IndividualInteraction> individuals;

  bool operator==(const InteractionLabel&) const = default;
};

struct JointFitness {
  double whole = 0.0;
  std::vector<double> components;

  bool operator==(const JointFitness&) const = default;
};

// Per-generation extras recorded by parallel runs. The label describes the
// realized transition that produced this generation (absent at t = 0).
struct ParallelGenData {
  JointFitness joint;
  std::optional<InteractionLabel> label;
  bool accepted = true;

  bool operator==(const ParallelGenData&) const = default;
};

struct GenerationRecord {
  std::uint64_t t = 0;
  Genome best_genome;
  double best_f3 = 0.0;
  double mean_f3 = 0.0;
  SearchCost cost;             // cumulative snapshot
  bool weighted_pairs = true;  // individuals stored with fitness values
  bool inductive_emitted = false;
  std::optional<ParallelGenData> parallel;

  bool operator==(const GenerationRecord&) const = default;
};

// A result that became fixed while the run kept going: the best-so-far genome
// whose fitness was unchanged on [stable_since, emitted_at].
struct InductiveResult {
  Genome genome;
  double f3 = 0.0;
  std::uint64_t stable_since = 0;
  std::uint64_t emitted_at = 0;

  bool operator==(const InductiveResult&) const = default;
};

struct RunTrace {
  AlgorithmSpec spec; // as executed
  std::vector<GenerationRecord> records;
  HaltReason halt_reason;
  Population final_population;
  std::optional<InductiveResult> inductive;

  bool operator==(const RunTrace&) const = default;
};

// ---------------------------------------------------------------------------

inline std::vector<double> evaluate_population(const ObjectiveSpec& obj,
                                               const Population& pop) {
  std::vector<double> fits;
  fits.reserve(pop.members.size());
  for (const Genome& g : pop.members) fits.push_back(evaluate(obj, g));
  return fits;
}

namespace detail {

inline std::size_t best_index(std::span<const double> fitnesses) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < fitnesses.size(); ++i)
    if (fitnesses[i] < fitnesses[best]) best = i;
  return best;
}

inline double mean_value(std::span<const double> values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

} // namespace detail

struct StepResult {
  Population pop;
  std::vector<double> fitnesses;
  SearchCost delta;
};

// One generation transition X[t+1] = s(v(X[t])). Each varied member is
// evaluated exactly once; the elitism incumbent re-enters with its cached
// value. Deterministic in (spec, pop): all draws come from streams derived
// from (master seed, stage tag, generation).
inline StepResult step(const AlgorithmSpec& spec, const Population& pop,
                       std::span<const double> fitnesses = {}) {
  if (pop.members.size() != spec.population_size)
    throw EngineError("population size does not match the algorithm spec");
  for (const Genome& g : pop.members)
    if (!genome_matches(spec.representation, g))
      throw ConfigError("population member does not match the representation");

  std::vector<double> own_fits;
  if (fitnesses.empty()) {
    own_fits = evaluate_population(spec.objective, pop);
    fitnesses = own_fits;
  } else if (fitnesses.size() != pop.members.size()) {
    throw EngineError("cached fitness list does not match the population");
  }

  const std::uint64_t t = pop.generation;
  const std::uint64_t seed = spec.master_seed;

  Population cur = pop;
  ensure_strategy_params(cur, spec.self_adaptive);
  if (spec.self_adaptive.enabled)
    cur = apply_self_adaptation(spec.self_adaptive, cur,
                                rng::Stream::derive(seed, "adapt", t));

  const Population varied =
      vary(spec.variation, spec.representation, cur, rng::Stream::derive(seed, "vary", t));

  StepResult result;
  result.delta.evaluations = varied.members.size();
  result.delta.variations = varied.members.size();
  result.delta.generations = 1;
  const std::vector<double> varied_fits = evaluate_population(spec.objective, varied);

  Incumbent incumbent;
  const std::size_t best = detail::best_index(fitnesses);
  incumbent.genome = cur.members[best];
  incumbent.fitness = fitnesses[best];
  if (!cur.strategy_params.empty()) incumbent.strategy_param = cur.strategy_params[best];

  SelectionResult sel = select(spec.selection, varied, varied_fits, spec.population_size,
                               rng::Stream::derive(seed, "select", t), incumbent);
  sel.pop.generation = t + 1;
  result.pop = std::move(sel.pop);
  result.fitnesses = std::move(sel.fitnesses);
  return result;
}

// ---------------------------------------------------------------------------
// Run loop.

namespace detail {

inline std::optional<HaltReason> check_termination(
    std::span<const TerminationCondition> conditions,
    std::span<const double> best_series) {
  const std::uint64_t t = best_series.size() - 1;
  for (std::size_t i = 0; i < conditions.size(); ++i) {
    const auto& cond = conditions[i];
    if (const auto* mg = std::get_if<MaxGenerations>(&cond)) {
      if (t >= mg->limit) return HaltReason{HaltKind::max_generations, i};
    } else if (const auto* opt = std::get_if<OptimumReached>(&cond)) {
      if (best_series.back() <= opt->target + opt->tolerance)
        return HaltReason{HaltKind::optimum_reached, i};
    } else if (const auto* st = std::get_if<Stagnation>(&cond)) {
      if (t >= st->window &&
          best_series[t - st->window] - best_series[t] <= st->min_improvement)
        return HaltReason{HaltKind::stagnation, i};
    } else if (const auto* hz = std::get_if<Horizon>(&cond)) {
      if (t >= hz->budget) return HaltReason{HaltKind::horizon, i};
    }
  }
  return std::nullopt;
}

// Streak bookkeeping for inductive-result emission. Re-emits whenever a
// different best value stabilizes over the window.
struct InductiveTracker {
  explicit InductiveTracker(std::optional<std::uint64_t> w) : window(w) {}

  std::optional<std::uint64_t> window;
  std::uint64_t stable_start = 0;
  std::optional<double> last_emitted;

  bool observe(std::span<const GenerationRecord> records) {
    if (!window) return false;
    const std::uint64_t t = records.size() - 1;
    if (t > 0 && records[t].best_f3 != records[t - 1].best_f3) stable_start = t;
    if (t - stable_start == *window &&
        (!last_emitted || *last_emitted != records[t].best_f3)) {
      last_emitted = records[t].best_f3;
      return true;
    }
    return false;
  }
};

} // namespace detail

// Iterates step() until the first termination condition fires. The trace is
// contiguous in t, records cumulative costs, and carries the last inductive
// emission if the window saw one.
inline RunTrace run(const AlgorithmSpec& spec, const Population& x0,
                    const RunOptions& opts) {
  validate_algorithm(spec);
  validate_run_options(opts);
  if (x0.generation != 0) throw ConfigError("initial population must be generation 0");
  if (x0.members.size() != spec.population_size)
    throw ConfigError("initial population size does not match the algorithm spec");
  for (const Genome& g : x0.members)
    if (!genome_matches(spec.representation, g))
      throw ConfigError("initial population member does not match the representation");

  RunTrace trace;
  trace.spec = spec;

  Population pop = x0;
  ensure_strategy_params(pop, spec.self_adaptive);
  std::vector<double> fits = evaluate_population(spec.objective, pop);

  SearchCost cost;
  cost.evaluations = pop.members.size();

  std::vector<double> best_series;
  detail::InductiveTracker inductive(opts.inductive_window);

  const auto record = [&]() {
    GenerationRecord rec;
    rec.t = pop.generation;
    const std::size_t b = detail::best_index(fits);
    rec.best_genome = pop.members[b];
    rec.best_f3 = fits[b];
    rec.mean_f3 = detail::mean_value(fits);
    rec.cost = cost;
    trace.records.push_back(std::move(rec));
    best_series.push_back(trace.records.back().best_f3);
    if (inductive.observe(trace.records)) {
      trace.records.back().inductive_emitted = true;
      trace.inductive = InductiveResult{trace.records.back().best_genome,
                                        trace.records.back().best_f3,
                                        inductive.stable_start, pop.generation};
    }
  };

  record();
  std::optional<HaltReason> halt = detail::check_termination(opts.terminations, best_series);
  while (!halt) {
    StepResult next = step(spec, pop, fits);
    pop = std::move(next.pop);
    fits = std::move(next.fitnesses);
    cost += next.delta;
    record();
    halt = detail::check_termination(opts.terminations, best_series);
  }

  trace.halt_reason = *halt;
  trace.final_population = std::move(pop);
  return trace;
}

// Pure scan over a stored trace prefix: the first (genome, t0) whose best
// fitness is unchanged on [t0, t0 + window]. Emission does not halt a run.
inline std::optional<InductiveResult> detect_inductive_result(
    std::span<const GenerationRecord> records, std::uint64_t window) {
  if (window < 1) throw AnalysisError("inductive window must be at least 1");
  std::uint64_t stable_start = 0;
  for (std::uint64_t t = 0; t < records.size(); ++t) {
    if (t > 0 && records[t].best_f3 != records[t - 1].best_f3) stable_start = t;
    if (t - stable_start == window)
      return InductiveResult{records[t].best_genome, records[t].best_f3, stable_start, t};
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Computation-class classifier. The bounded/unbounded split follows the
// user's declaration: MaxGenerations and non-open Horizons are bounds fixed
// in advance, open Horizons are safety rails on a potentially infinite
// process.

enum class ComputationClass { c1a, c1b, c1c, c2a, c2b, c2c, c3_meta };

constexpr std::string_view computation_class_name(ComputationClass c) {
  switch (c) {
    case ComputationClass::c1a: return "1a";
    case ComputationClass::c1b: return "1b";
    case ComputationClass::c1c: return "1c";
    case ComputationClass::c2a: return "2a";
    case ComputationClass::c2b: return "2b";
    case ComputationClass::c2c: return "2c";
    case ComputationClass::c3_meta: return "3-meta";
  }
  return "?";
}

inline ComputationClass classify_computation(const AlgorithmSpec& spec,
                                             const RunOptions& opts) {
  if (spec.self_adaptive.enabled) return ComputationClass::c3_meta;

  bool bound_fixed = false;
  bool seeks_optimum = false;
  for (const auto& cond : opts.terminations) {
    if (std::holds_alternative<MaxGenerations>(cond)) bound_fixed = true;
    if (const auto* hz = std::get_if<Horizon>(&cond))
      if (!hz->open) bound_fixed = true;
    if (std::holds_alternative<OptimumReached>(cond)) seeks_optimum = true;
  }

  if (seeks_optimum) {
    if (spec.selection.elitism && opts.inductive_window.has_value())
      return bound_fixed ? ComputationClass::c1c : ComputationClass::c2c;
    return bound_fixed ? ComputationClass::c1b : ComputationClass::c2b;
  }
  return bound_fixed ? ComputationClass::c1a : ComputationClass::c2a;
}

} // namespace etm

#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "etm/engine.hpp"

namespace etm {

// ---------------------------------------------------------------------------
// Parallel machine: p submachines each read the whole generation X[t] and
// emit a subgeneration of declared size; X[t+1] is their concatenation in
// submachine index order.

// Combines the per-submachine component values f31..f3p into the whole-
// population fitness.
struct CombinerSpec {
  enum class Kind { sum, min, weighted_sum };
  Kind kind = Kind::min;
  std::vector<double> weights; // weighted_sum only, one per submachine

  bool operator==(const CombinerSpec&) const = default;
};

constexpr std::string_view combiner_kind_name(CombinerSpec::Kind k) {
  switch (k) {
    case CombinerSpec::Kind::sum: return "sum";
    case CombinerSpec::Kind::min: return "min";
    case CombinerSpec::Kind::weighted_sum: return "weighted_sum";
  }
  return "?";
}

struct SubmachineSpec {
  AlgorithmSpec algorithm; // its objective is the component fitness f3i
  std::uint32_t size = 0;  // subgeneration size

  bool operator==(const SubmachineSpec&) const = default;
};

enum class AcceptancePolicy { free, cooperative_only, competitive_only };

constexpr std::string_view acceptance_policy_name(AcceptancePolicy p) {
  switch (p) {
    case AcceptancePolicy::free: return "free";
    case AcceptancePolicy::cooperative_only: return "cooperative-only";
    case AcceptancePolicy::competitive_only: return "competitive-only";
  }
  return "?";
}

struct ParallelSpec {
  std::vector<SubmachineSpec> submachines;
  CombinerSpec combiner;
  AcceptancePolicy policy = AcceptancePolicy::free;

  std::size_t whole_size() const {
    std::size_t n = 0;
    for (const auto& sub : submachines) n += sub.size;
    return n;
  }

  bool operator==(const ParallelSpec&) const = default;
};

inline void validate_parallel(const ParallelSpec& spec) {
  if (spec.submachines.empty()) throw ConfigError("parallel spec needs submachines");
  const auto& repr0 = spec.submachines.front().algorithm.representation;
  const bool adaptive0 = spec.submachines.front().algorithm.self_adaptive.enabled;
  for (const auto& sub : spec.submachines) {
    validate_algorithm(sub.algorithm);
    if (sub.size == 0) throw ConfigError("subgeneration size must be positive");
    if (sub.algorithm.population_size != sub.size)
      throw ConfigError("submachine population_size must equal its subgeneration size");
    if (!(sub.algorithm.representation == repr0))
      throw ConfigError("all submachines must share one genome representation");
    if (sub.algorithm.self_adaptive.enabled != adaptive0)
      throw ConfigError("submachines must agree on the self-adaptive extension");
  }
  if (spec.combiner.kind == CombinerSpec::Kind::weighted_sum) {
    if (spec.combiner.weights.size() != spec.submachines.size())
      throw ConfigError("weighted_sum combiner needs one weight per submachine");
    for (double w : spec.combiner.weights)
      if (w < 0.0) throw ConfigError("combiner weights must be nonnegative");
  } else if (!spec.combiner.weights.empty()) {
    throw ConfigError("combiner weights are only valid for weighted_sum");
  }
}

inline double combine(const CombinerSpec& combiner, std::span<const double> components) {
  switch (combiner.kind) {
    case CombinerSpec::Kind::sum: {
      double s = 0.0;
      for (double c : components) s += c;
      return s;
    }
    case CombinerSpec::Kind::min: {
      double m = components.front();
      for (double c : components) m = std::min(m, c);
      return m;
    }
    case CombinerSpec::Kind::weighted_sum: {
      double s = 0.0;
      for (std::size_t i = 0; i < components.size(); ++i)
        s += combiner.weights[i] * components[i];
      return s;
    }
  }
  throw EngineError("unknown combiner");
}

// ---------------------------------------------------------------------------

namespace detail {

// matrix[i][m] = f3i(member m); rows are submachine objectives.
using FitnessMatrix = std::vector<std::vector<double>>;

inline FitnessMatrix full_matrix(const ParallelSpec& spec, const Population& whole) {
  FitnessMatrix matrix(spec.submachines.size());
  for (std::size_t i = 0; i < spec.submachines.size(); ++i)
    matrix[i] = evaluate_population(spec.submachines[i].algorithm.objective, whole);
  return matrix;
}

// Component values f3j = best value inside subgeneration j; members are laid
// out block-by-block in submachine order.
inline JointFitness joint_from_matrix(const ParallelSpec& spec,
                                      const FitnessMatrix& matrix) {
  JointFitness joint;
  joint.components.reserve(spec.submachines.size());
  std::size_t offset = 0;
  for (std::size_t j = 0; j < spec.submachines.size(); ++j) {
    const std::size_t size = spec.submachines[j].size;
    double best = matrix[j][offset];
    for (std::size_t m = offset; m < offset + size; ++m)
      best = std::min(best, matrix[j][m]);
    joint.components.push_back(best);
    offset += size;
  }
  joint.whole = combine(spec.combiner, joint.components);
  return joint;
}

// Diagonal view: member m of block j valued under its own objective f3j.
inline std::vector<double> diagonal_fitnesses(const ParallelSpec& spec,
                                              const FitnessMatrix& matrix) {
  std::vector<double> diag;
  diag.reserve(matrix.front().size());
  std::size_t offset = 0;
  for (std::size_t j = 0; j < spec.submachines.size(); ++j) {
    for (std::size_t m = offset; m < offset + spec.submachines[j].size; ++m)
      diag.push_back(matrix[j][m]);
    offset += spec.submachines[j].size;
  }
  return diag;
}

} // namespace detail

// f3 for the whole population: per-component bests combined by f13.
inline JointFitness joint_fitness(const ParallelSpec& spec, const Population& whole) {
  validate_parallel(spec);
  if (whole.members.size() != spec.whole_size())
    throw EngineError("population size does not match the subgeneration sizes");
  return detail::joint_from_matrix(spec, detail::full_matrix(spec, whole));
}

// ---------------------------------------------------------------------------
// Per-generation cooperation/competition classifier. The population label
// follows the strict inequalities (equality is Neutral); an individual label
// is assigned only when every other component value is exactly unchanged.
inline InteractionLabel classify_interaction(const JointFitness& prev,
                                             const JointFitness& next) {
  if (prev.components.size() != next.components.size())
    throw AnalysisError("component lists differ in length");

  InteractionLabel label;
  if (next.whole < prev.whole)
    label.population = PopulationInteraction::cooperates;
  else if (next.whole > prev.whole)
    label.population = PopulationInteraction::competes;
  else
    label.population = PopulationInteraction::neutral;

  if (label.population != PopulationInteraction::neutral) {
    const std::size_t p = prev.components.size();
    for (std::size_t j = 0; j < p; ++j) {
      if (prev.components[j] == next.components[j]) continue;
      bool others_fixed = true;
      for (std::size_t i = 0; i < p && others_fixed; ++i)
        if (i != j && prev.components[i] != next.components[i]) others_fixed = false;
      if (others_fixed)
        label.individuals.push_back(
            {static_cast<std::uint32_t>(j),
             label.population == PopulationInteraction::cooperates});
    }
  }
  return label;
}

// ---------------------------------------------------------------------------

struct ParallelStepResult {
  Population pop;                    // proposed X[t+1], blocks in submachine order
  detail::FitnessMatrix subgen_fits; // block j valued under f3j (others empty)
  SearchCost delta;
};

// Every submachine reads the entire X[t], varies it, evaluates the varied
// copy under its own objective, and selects its subgeneration; the proposal
// is the concatenation. whole_matrix supplies f3i(X[t]) for the elitism
// incumbents; when absent it is computed on the spot (uncounted, the values
// are cached copies of work already done when X[t] was formed).
inline ParallelStepResult parallel_step(const ParallelSpec& spec, const Population& whole,
                                        const detail::FitnessMatrix* whole_matrix = nullptr) {
  validate_parallel(spec);
  if (whole.members.size() != spec.whole_size())
    throw EngineError("population size does not match the subgeneration sizes");

  detail::FitnessMatrix own;
  if (!whole_matrix) {
    own = detail::full_matrix(spec, whole);
    whole_matrix = &own;
  }

  const std::uint64_t t = whole.generation;
  ParallelStepResult result;
  result.pop.generation = t + 1;
  result.subgen_fits.resize(spec.submachines.size());
  result.delta.generations = 1;

  for (std::size_t i = 0; i < spec.submachines.size(); ++i) {
    const AlgorithmSpec& algo = spec.submachines[i].algorithm;
    const std::uint64_t seed = algo.master_seed;

    Population cur = whole;
    ensure_strategy_params(cur, algo.self_adaptive);
    if (algo.self_adaptive.enabled)
      cur = apply_self_adaptation(algo.self_adaptive, cur,
                                  rng::Stream::derive(seed, "adapt", t));

    const Population varied = vary(algo.variation, algo.representation, cur,
                                   rng::Stream::derive(seed, "vary", t));
    const std::vector<double> varied_fits = evaluate_population(algo.objective, varied);
    result.delta.evaluations += varied.members.size();
    result.delta.variations += varied.members.size();

    Incumbent incumbent;
    const std::size_t best = detail::best_index((*whole_matrix)[i]);
    incumbent.genome = cur.members[best];
    incumbent.fitness = (*whole_matrix)[i][best];
    if (!cur.strategy_params.empty()) incumbent.strategy_param = cur.strategy_params[best];

    SelectionResult sel =
        select(algo.selection, varied, varied_fits, spec.submachines[i].size,
               rng::Stream::derive(seed, "select", t), incumbent);

    result.subgen_fits[i] = std::move(sel.fitnesses);
    for (auto& g : sel.pop.members) result.pop.members.push_back(std::move(g));
    for (double p : sel.pop.strategy_params) result.pop.strategy_params.push_back(p);
  }

  if (result.pop.members.size() != spec.whole_size())
    throw EngineError("subgeneration sizes do not add up to the whole population");
  return result;
}

// ---------------------------------------------------------------------------

struct ParallelRunTrace {
  ParallelSpec spec;
  std::vector<GenerationRecord> records;
  HaltReason halt_reason;
  Population final_population;
  std::optional<InductiveResult> inductive;

  bool operator==(const ParallelRunTrace&) const = default;
};

// Runs the parallel machine under an acceptance policy:
//   free             every proposal accepted;
//   cooperative-only accepted iff f3-whole does not increase (strict decrease
//                    logs Cooperates, equality logs Neutral);
//   competitive-only accepted iff f3-whole strictly increases.
// A rejected proposal leaves X[t+1] = X[t] and marks the record unaccepted.
// Termination conditions read the whole-population fitness.
inline ParallelRunTrace run_parallel(const ParallelSpec& spec, const Population& x0,
                                     const RunOptions& opts) {
  validate_parallel(spec);
  validate_run_options(opts);
  if (x0.generation != 0) throw ConfigError("initial population must be generation 0");
  if (x0.members.size() != spec.whole_size())
    throw ConfigError("initial population size must equal the sum of subgeneration sizes");
  const auto& repr = spec.submachines.front().algorithm.representation;
  for (const Genome& g : x0.members)
    if (!genome_matches(repr, g))
      throw ConfigError("initial population member does not match the representation");

  ParallelRunTrace trace;
  trace.spec = spec;

  Population pop = x0;
  ensure_strategy_params(pop, spec.submachines.front().algorithm.self_adaptive);

  // f3i over the whole generation, every submachine row. Diagonal blocks are
  // reused from selection; cross rows of an accepted union are evaluated (and
  // counted) because the incumbents need them.
  detail::FitnessMatrix matrix = detail::full_matrix(spec, pop);
  SearchCost cost;
  cost.evaluations = spec.submachines.size() * pop.members.size();

  JointFitness joint = detail::joint_from_matrix(spec, matrix);

  std::vector<double> whole_series;
  detail::InductiveTracker inductive(opts.inductive_window);

  const auto record = [&](std::optional<InteractionLabel> label, bool accepted) {
    GenerationRecord rec;
    rec.t = pop.generation;
    const std::vector<double> diag = detail::diagonal_fitnesses(spec, matrix);
    const std::size_t b = detail::best_index(diag);
    rec.best_genome = pop.members[b];
    rec.best_f3 = joint.whole;
    rec.mean_f3 = detail::mean_value(diag);
    rec.cost = cost;
    rec.parallel = ParallelGenData{joint, std::move(label), accepted};
    trace.records.push_back(std::move(rec));
    whole_series.push_back(joint.whole);
    if (inductive.observe(trace.records)) {
      trace.records.back().inductive_emitted = true;
      trace.inductive = InductiveResult{trace.records.back().best_genome,
                                        trace.records.back().best_f3,
                                        inductive.stable_start, pop.generation};
    }
  };

  record(std::nullopt, true);
  std::optional<HaltReason> halt = detail::check_termination(opts.terminations, whole_series);
  while (!halt) {
    ParallelStepResult proposal = parallel_step(spec, pop, &matrix);
    cost += proposal.delta;

    detail::FitnessMatrix prop_matrix(spec.submachines.size());
    std::size_t offset = 0;
    for (std::size_t i = 0; i < spec.submachines.size(); ++i) {
      prop_matrix[i].resize(proposal.pop.members.size());
      for (std::size_t m = 0; m < spec.submachines[i].size; ++m)
        prop_matrix[i][offset + m] = proposal.subgen_fits[i][m];
      offset += spec.submachines[i].size;
    }
    JointFitness prop_joint;
    {
      JointFitness j;
      j.components.reserve(spec.submachines.size());
      std::size_t off = 0;
      for (std::size_t i = 0; i < spec.submachines.size(); ++i) {
        double best = proposal.subgen_fits[i][0];
        for (double v : proposal.subgen_fits[i]) best = std::min(best, v);
        j.components.push_back(best);
        off += spec.submachines[i].size;
      }
      j.whole = combine(spec.combiner, j.components);
      prop_joint = j;
    }

    bool accepted = true;
    switch (spec.policy) {
      case AcceptancePolicy::free: break;
      case AcceptancePolicy::cooperative_only:
        accepted = prop_joint.whole <= joint.whole;
        break;
      case AcceptancePolicy::competitive_only:
        accepted = prop_joint.whole > joint.whole;
        break;
    }

    const JointFitness prev_joint = joint;
    if (accepted) {
      // Cross rows (i valuing another submachine's block) are fresh work.
      std::size_t block_start = 0;
      for (std::size_t j = 0; j < spec.submachines.size(); ++j) {
        for (std::size_t i = 0; i < spec.submachines.size(); ++i) {
          if (i == j) continue;
          for (std::size_t m = block_start; m < block_start + spec.submachines[j].size; ++m) {
            prop_matrix[i][m] =
                evaluate(spec.submachines[i].algorithm.objective, proposal.pop.members[m]);
            ++cost.evaluations;
          }
        }
        block_start += spec.submachines[j].size;
      }
      pop = std::move(proposal.pop);
      matrix = std::move(prop_matrix);
      joint = prop_joint;
    } else {
      pop.generation += 1;
    }

    record(classify_interaction(prev_joint, joint), accepted);
    halt = detail::check_termination(opts.terminations, whole_series);
  }

  trace.halt_reason = *halt;
  trace.final_population = std::move(pop);
  return trace;
}

} // namespace etm

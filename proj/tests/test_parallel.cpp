#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>

#include "test_util.hpp"

using namespace etm;

namespace {

RunOptions horizon_only(std::uint64_t budget) {
  RunOptions opts;
  opts.terminations = {Horizon{budget, true}};
  return opts;
}

} // namespace

TEST_CASE("a single submachine degenerates to the plain engine, record for record") {
  const AlgorithmSpec algo = testutil::onemax_spec(10, 8, 0.1, true, 42);
  ParallelSpec pspec;
  pspec.submachines = {SubmachineSpec{algo, 8}};
  pspec.combiner.kind = CombinerSpec::Kind::min;
  pspec.policy = AcceptancePolicy::free;

  const Population x0 = init_population(algo.representation, 8, algo.master_seed);
  const RunTrace plain = run(algo, x0, horizon_only(60));
  const ParallelRunTrace par = run_parallel(pspec, x0, horizon_only(60));

  REQUIRE(par.records.size() == plain.records.size());
  for (std::size_t t = 0; t < plain.records.size(); ++t) {
    const GenerationRecord& a = plain.records[t];
    const GenerationRecord& b = par.records[t];
    REQUIRE(a.t == b.t);
    REQUIRE(a.best_f3 == b.best_f3);
    REQUIRE(a.mean_f3 == b.mean_f3);
    REQUIRE(a.best_genome == b.best_genome);
    REQUIRE(a.cost == b.cost);
    REQUIRE(b.parallel->accepted);
  }
  REQUIRE(par.final_population.members == plain.final_population.members);
}

TEST_CASE("subgenerations concatenate in submachine order") {
  // submachine 0: no variation, pure truncation — its block must be the best
  // members of the whole generation under its objective.
  AlgorithmSpec quiet = testutil::onemax_spec(10, 3, 0.0, false, 7);
  quiet.selection.method = Truncation{1.0};
  AlgorithmSpec noisy = testutil::onemax_spec(10, 5, 0.3, false, 8);
  ParallelSpec pspec;
  pspec.submachines = {SubmachineSpec{quiet, 3}, SubmachineSpec{noisy, 5}};
  pspec.combiner.kind = CombinerSpec::Kind::min;

  const Population whole = init_population(BitStringSpec{10}, 8, 123);
  const ParallelStepResult result = parallel_step(pspec, whole);
  REQUIRE(result.pop.members.size() == 8);
  REQUIRE(result.subgen_fits[0].size() == 3);
  REQUIRE(result.subgen_fits[1].size() == 5);

  std::vector<double> fits = evaluate_population(quiet.objective, whole);
  std::vector<std::size_t> order(fits.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return fits[a] < fits[b]; });
  for (std::size_t i = 0; i < 3; ++i)
    REQUIRE(result.pop.members[i] == whole.members[order[i]]);
}

TEST_CASE("joint fitness combines per-component bests") {
  JointFitness a{0.0, {2.0, 5.0, 3.0}};
  CombinerSpec min_comb{CombinerSpec::Kind::min, {}};
  CombinerSpec sum_comb{CombinerSpec::Kind::sum, {}};
  REQUIRE(combine(min_comb, a.components) == 2.0);
  REQUIRE(combine(sum_comb, a.components) == 10.0);
  CombinerSpec weighted{CombinerSpec::Kind::weighted_sum, {1.0, 0.5, 2.0}};
  REQUIRE(combine(weighted, a.components) == 2.0 + 2.5 + 6.0);

  const AlgorithmSpec algo = testutil::onemax_spec(8, 6, 0.1, true, 3);
  ParallelSpec single;
  single.submachines = {SubmachineSpec{algo, 6}};
  single.combiner.kind = CombinerSpec::Kind::min;
  const Population pop = init_population(algo.representation, 6, 9);
  const JointFitness joint = joint_fitness(single, pop);
  REQUIRE(joint.whole == best_of_population(algo.objective, pop).second);
  REQUIRE(joint.components.size() == 1);
}

TEST_CASE("interaction classification follows the strict inequalities") {
  const JointFitness before{5.0, {5.0, 7.0}};
  const JointFitness after{3.0, {3.0, 7.0}};
  const InteractionLabel coop = classify_interaction(before, after);
  REQUIRE(coop.population == PopulationInteraction::cooperates);
  REQUIRE(coop.individuals.size() == 1);
  REQUIRE(coop.individuals.front().index == 0);
  REQUIRE(coop.individuals.front().cooperates);

  const InteractionLabel comp =
      classify_interaction(JointFitness{3.0, {3.0, 6.0}}, JointFitness{5.0, {5.0, 8.0}});
  REQUIRE(comp.population == PopulationInteraction::competes);
  REQUIRE(comp.individuals.empty()); // both components moved

  const InteractionLabel neutral =
      classify_interaction(JointFitness{4.0, {4.0, 9.0}}, JointFitness{4.0, {4.0, 9.0}});
  REQUIRE(neutral.population == PopulationInteraction::neutral);
  REQUIRE(neutral.individuals.empty());

  REQUIRE_THROWS_AS(
      classify_interaction(JointFitness{1.0, {1.0}}, JointFitness{1.0, {1.0, 2.0}}),
      AnalysisError);
}

TEST_CASE("interaction labels are antisymmetric under time reversal") {
  const JointFitness a{7.0, {7.0, 4.0, 2.0}};
  const JointFitness b{6.0, {7.0, 3.0, 2.0}};
  const InteractionLabel forward = classify_interaction(a, b);
  const InteractionLabel backward = classify_interaction(b, a);
  REQUIRE(forward.population == PopulationInteraction::cooperates);
  REQUIRE(backward.population == PopulationInteraction::competes);
  REQUIRE(forward.individuals.size() == 1);
  REQUIRE(backward.individuals.size() == 1);
  REQUIRE(forward.individuals.front().index == backward.individuals.front().index);
  REQUIRE(forward.individuals.front().cooperates != backward.individuals.front().cooperates);
}

TEST_CASE("cooperative acceptance makes the whole fitness nonincreasing") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    ParallelSpec pspec = testutil::two_submachine_tsp(4, AcceptancePolicy::cooperative_only);
    for (auto& sub : pspec.submachines) sub.algorithm.master_seed += seed;
    const Population x0 = init_population(PermutationSpec{4}, 8,
                                          pspec.submachines.front().algorithm.master_seed);
    const ParallelRunTrace trace = run_parallel(pspec, x0, horizon_only(300));
    for (std::size_t t = 1; t < trace.records.size(); ++t) {
      REQUIRE(trace.records[t].best_f3 <= trace.records[t - 1].best_f3);
      if (!trace.records[t].parallel->accepted)
        REQUIRE(trace.records[t].best_f3 == trace.records[t - 1].best_f3);
    }
  }
}

TEST_CASE("competitive acceptance never lets the distance to optimum shrink") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    ParallelSpec pspec = testutil::two_submachine_tsp(4, AcceptancePolicy::competitive_only);
    for (auto& sub : pspec.submachines) sub.algorithm.master_seed += seed;
    // non-optimal start
    Population x0;
    std::uint64_t draw_seed = pspec.submachines.front().algorithm.master_seed;
    for (;;) {
      x0 = init_population(PermutationSpec{4}, 8, draw_seed);
      if (joint_fitness(pspec, x0).whole > 6.0) break;
      draw_seed = rng::mix64(draw_seed + rng::kGolden);
    }
    const ParallelRunTrace trace = run_parallel(pspec, x0, horizon_only(300));
    for (std::size_t t = 1; t < trace.records.size(); ++t)
      REQUIRE(trace.records[t].best_f3 >= trace.records[t - 1].best_f3);
    for (const GenerationRecord& rec : trace.records) REQUIRE(rec.best_f3 > 6.0);
  }
}

TEST_CASE("union bookkeeping and validation") {
  ParallelSpec pspec = testutil::two_submachine_tsp(4);
  const Population x0 = init_population(PermutationSpec{4}, 8, 0);
  const ParallelRunTrace trace = run_parallel(pspec, x0, horizon_only(20));
  REQUIRE(trace.final_population.members.size() == 8);

  const Population wrong = init_population(PermutationSpec{4}, 7, 0);
  REQUIRE_THROWS_AS(run_parallel(pspec, wrong, horizon_only(20)), ConfigError);

  ParallelSpec mixed = pspec;
  mixed.submachines[1].algorithm.representation = PermutationSpec{5};
  mixed.submachines[1].algorithm.objective =
      TspTour{{{0, 1, 1, 1, 1},
               {1, 0, 1, 1, 1},
               {1, 1, 0, 1, 1},
               {1, 1, 1, 0, 1},
               {1, 1, 1, 1, 0}}};
  REQUIRE_THROWS_AS(validate_parallel(mixed), ConfigError);

  ParallelSpec bad_size = pspec;
  bad_size.submachines[0].size = 5; // no longer equals its population_size
  REQUIRE_THROWS_AS(validate_parallel(bad_size), ConfigError);
}

TEST_CASE("parallel trace CSV carries the interaction columns") {
  ParallelSpec pspec = testutil::two_submachine_tsp(4, AcceptancePolicy::cooperative_only);
  const Population x0 = init_population(PermutationSpec{4}, 8, 5);
  const ParallelRunTrace trace = run_parallel(pspec, x0, horizon_only(10));
  const std::string csv = trace_csv(trace);
  REQUIRE(csv.rfind("t,best_f3,mean_f3,evaluations,inductive_flag,f3_whole,"
                    "f3_comp_1,f3_comp_2,population_label,individual_labels,accepted\n",
                    0) == 0);
  REQUIRE(csv.find(",none,,1\n") != std::string::npos); // generation 0 row
  REQUIRE(csv.back() == '\n');
}

TEST_CASE("evaluation accounting scales with the number of submachines") {
  ParallelSpec pspec = testutil::two_submachine_tsp(4, AcceptancePolicy::free);
  const Population x0 = init_population(PermutationSpec{4}, 8, 3);
  const ParallelRunTrace trace = run_parallel(pspec, x0, horizon_only(5));
  // init: p*N = 16; per accepted generation: p*N varied + (p-1)*N cross = 24
  REQUIRE(trace.records.front().cost.evaluations == 16);
  std::uint64_t expected = 16;
  for (std::size_t t = 1; t < trace.records.size(); ++t) {
    expected += 16 + (trace.records[t].parallel->accepted ? 8 : 0);
    REQUIRE(trace.records[t].cost.evaluations == expected);
  }
}

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "test_util.hpp"

using namespace etm;

namespace {

// Synthetic OneMax traces: a genome with k zero bits sits at distance k from
// the all-ones optimum.
RunTrace trace_with_zero_counts(const std::vector<int>& zero_counts, std::uint32_t n) {
  RunTrace trace;
  trace.spec = testutil::onemax_spec(n, 4);
  for (std::size_t t = 0; t < zero_counts.size(); ++t) {
    GenerationRecord rec;
    rec.t = t;
    BitString g;
    g.bits.assign(n, 1);
    for (int i = 0; i < zero_counts[t]; ++i) g.bits[i] = 0;
    rec.best_genome = g;
    rec.best_f3 = zero_counts[t];
    trace.records.push_back(rec);
  }
  return trace;
}

} // namespace

TEST_CASE("convergence rate is the one-step distance decrease") {
  const RunTrace constant = trace_with_zero_counts({4, 4, 4, 4}, 8);
  const OptimalSet target = declared_optimum(0.0);
  REQUIRE(convergence_rate(constant, target, 0) == 0.0);
  REQUIRE(convergence_rate(constant, target, 2) == 0.0);

  const RunTrace improving = trace_with_zero_counts({5, 3, 2}, 8);
  REQUIRE(convergence_rate(improving, target, 0) == 2.0);
  REQUIRE(convergence_rate(improving, target, 1) == 1.0);

  REQUIRE_THROWS_AS(convergence_rate(improving, target, 2), AnalysisError);
}

TEST_CASE("rates telescope exactly to D(0) - D(T)") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    AlgorithmSpec spec = testutil::onemax_spec(12, 10, 0.1, seed % 2 == 0, seed);
    const Population x0 = init_population(spec.representation, 10, seed);
    RunOptions opts;
    opts.terminations = {Horizon{120, true}};
    const RunTrace trace = run(spec, x0, opts);
    const OptimalSet target = declared_optimum(0.0);
    double total = 0.0;
    for (std::uint64_t t = 0; t + 1 < trace.records.size(); ++t)
      total += convergence_rate(trace, target, t);
    const std::vector<double> dist = distance_series(trace, target);
    REQUIRE(std::abs(total - (dist.front() - dist.back())) <= 1e-12);
  }
}

TEST_CASE("verdict case order") {
  SECTION("distance hits zero and stays") {
    std::vector<double> dist;
    for (int t = 0; t <= 100; ++t) dist.push_back(t < 12 ? 3.0 : 0.0);
    const ConvergenceVerdict v = verdict_from_distance_series(dist, 0.0, std::nullopt, {});
    REQUIRE(v.kind == VerdictKind::convergent);
    REQUIRE(v.tau == 12);
    REQUIRE(v.horizon == 100);
  }
  SECTION("harmonic decay gives asymptotic evidence with per-epsilon taus") {
    std::vector<double> dist;
    for (int t = 0; t <= 1000; ++t) dist.push_back(10.0 / (t + 1));
    const std::vector<double> grid = {1.0, 0.1, 0.05};
    const ConvergenceVerdict v = verdict_from_distance_series(dist, 0.0, std::nullopt, grid);
    REQUIRE(v.kind == VerdictKind::asymptotic_evidence);
    REQUIRE(v.epsilon_taus.size() == 3);
    REQUIRE(v.epsilon_taus[0].tau == 9);
    REQUIRE(v.epsilon_taus[1].tau == 99);
    REQUIRE(v.epsilon_taus[2].tau == 199);
  }
  SECTION("constant distance within an error bound") {
    const std::vector<double> dist(40, 5.0);
    const ConvergenceVerdict v = verdict_from_distance_series(dist, 0.0, 6.0, {});
    REQUIRE(v.kind == VerdictKind::convergent_with_error);
    REQUIRE(v.error_bound == 6.0);
    REQUIRE(v.tau == 0);
  }
  SECTION("divergent otherwise") {
    const std::vector<double> dist = {1.0, 2.0, 3.0, 4.0};
    const ConvergenceVerdict v =
        verdict_from_distance_series(dist, 0.0, 2.0, std::vector<double>{0.5});
    REQUIRE(v.kind == VerdictKind::divergent);
  }
  SECTION("convergent implies convergent with any error and every epsilon") {
    std::vector<double> dist;
    for (int t = 0; t <= 50; ++t) dist.push_back(t < 7 ? 2.0 : 0.0);
    REQUIRE(verdict_from_distance_series(dist, 0.0, std::nullopt, {}).tau == 7);
    for (double r : {0.5, 1.0, 10.0}) {
      const ConvergenceVerdict with_r =
          verdict_from_distance_series(dist, -1.0 /* make exact zero unreachable */, r, {});
      REQUIRE(with_r.kind == VerdictKind::convergent_with_error);
      // holds at least from the convergent tau on (earlier when r allows)
      REQUIRE(with_r.tau <= 7);
    }
    for (double eps : {0.1, 1.0, 3.0}) {
      const ConvergenceVerdict v = verdict_from_distance_series(
          dist, -1.0, std::nullopt, std::vector<double>{eps});
      REQUIRE(v.kind == VerdictKind::asymptotic_evidence);
    }
  }
}

TEST_CASE("verdicts are pure functions of the trace") {
  AlgorithmSpec spec = testutil::onemax_spec(10, 12, 0.12, true, 6);
  const Population x0 = init_population(spec.representation, 12, 6);
  RunOptions opts;
  opts.terminations = {Horizon{150, true}};
  const RunTrace trace = run(spec, x0, opts);
  const OptimalSet target = brute_force_optimum(spec.objective);
  const ConvergenceVerdict a = convergence_verdict(trace, target);
  const ConvergenceVerdict b = convergence_verdict(trace, target);
  REQUIRE(a == b);
}

TEST_CASE("expected distance series holds the final value of short runs") {
  const std::vector<std::vector<double>> series = {{4.0, 2.0, 0.0}, {6.0, 6.0}};
  const std::vector<double> mean = expected_distance_series(series);
  REQUIRE(mean == std::vector<double>{5.0, 4.0, 3.0});
}

TEST_CASE("theorem 6.2/6.3 harness on a small problem") {
  ElitismTheoremInput input;
  input.algorithm = testutil::onemax_spec(8, 12, 1.0 / 8.0, true, 0);
  input.target = brute_force_optimum(input.algorithm.objective);
  for (std::uint64_t s = 0; s < 10; ++s) input.seeds.push_back(s);
  input.horizon = 1500;
  input.control_horizon = 800;
  const TheoremThresholds thresholds; // pinned defaults
  const auto [optimality, completeness] =
      check_theorem_6_2_6_3(input, thresholds, R"({"case":"unit"})");

  REQUIRE(optimality.theorem_id == "6.2-optimality");
  REQUIRE(optimality.hit_rate >= 0.95);
  REQUIRE(optimality.maintained_count == optimality.success_count);
  REQUIRE(optimality.metrics.at("negative_control_found_then_lost_seeds") >= 1.0);
  REQUIRE(optimality.passed);

  REQUIRE(completeness.theorem_id == "6.3-completeness");
  REQUIRE(completeness.hit_rate == 0.0); // zero mutation never reaches the optimum
  REQUIRE(completeness.metrics.at("max_transition_abs_diff") <= 1e-12);
  REQUIRE(completeness.metrics.at("min_transition_probability") > 0.0);
  REQUIRE(completeness.passed);
}

TEST_CASE("theorem harness rejects non-elitist or degenerate configs") {
  ElitismTheoremInput input;
  input.algorithm = testutil::onemax_spec(8, 10, 0.1, false, 0);
  input.target = declared_optimum(0.0);
  input.seeds = {0};
  REQUIRE_THROWS_AS(check_theorem_6_2_6_3(input, TheoremThresholds{}, "{}"), ConfigError);

  ElitismTheoremInput no_rate = input;
  no_rate.algorithm = testutil::onemax_spec(8, 10, 0.0, true, 0);
  REQUIRE_THROWS_AS(check_theorem_6_2_6_3(no_rate, TheoremThresholds{}, "{}"), ConfigError);

  ElitismTheoremInput no_target = input;
  no_target.algorithm = testutil::onemax_spec(8, 10, 0.1, true, 0);
  no_target.target = OptimalSet{};
  REQUIRE_THROWS_AS(check_theorem_6_2_6_3(no_target, TheoremThresholds{}, "{}"),
                    OracleRefused);
}

TEST_CASE("theorem 7.1/7.2 harness on the four-city tour") {
  ParallelTheoremInput input;
  input.parallel = testutil::two_submachine_tsp(4);
  input.joint_optimum = 6.0;
  input.tolerance = 0.0;
  for (std::uint64_t s = 0; s < 10; ++s) input.seeds.push_back(s);
  input.horizon = 800;
  const auto [cooperative, competitive] =
      check_theorem_7_1_7_2(input, TheoremThresholds{}, R"({"case":"unit"})");

  REQUIRE(cooperative.theorem_id == "7.1-cooperative");
  REQUIRE(cooperative.metrics.at("nonincreasing_traces") == 10.0);
  REQUIRE(cooperative.hit_rate >= 0.96);
  REQUIRE(cooperative.maintained_count == cooperative.success_count);
  REQUIRE(cooperative.passed);

  REQUIRE(competitive.theorem_id == "7.2-competitive");
  REQUIRE(competitive.hit_rate == 0.0);
  REQUIRE(competitive.metrics.at("nondecreasing_traces") == 10.0);
  REQUIRE(competitive.metrics.count("free_policy_hit_rate") == 1);
  REQUIRE(competitive.passed);
}

TEST_CASE("comparative search optimality prefers the cheaper hitter") {
  const OptimalSet target = brute_force_optimum(OneMaxMin{8});
  std::vector<std::pair<std::string, AlgorithmSpec>> candidates = {
      {"tuned", testutil::onemax_spec(8, 10, 1.0 / 8.0, true, 0)},
      {"scrambler", testutil::onemax_spec(8, 10, 0.45, true, 0)}};
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 0; s < 15; ++s) seeds.push_back(s);
  const SearchOptimalityReport report =
      compare_search_optimality(candidates, target, seeds, 3000);
  REQUIRE(report.entries.size() == 2);
  REQUIRE(report.best_label == "tuned");
}

#include <catch2/catch_amalgamated.hpp>

#include "test_util.hpp"

using namespace etm;

namespace {

BitString bits(std::initializer_list<int> values) {
  BitString b;
  for (int v : values) b.bits.push_back(static_cast<std::uint8_t>(v));
  return b;
}

} // namespace

TEST_CASE("onemax counts zero bits") {
  const ObjectiveSpec spec = OneMaxMin{8};
  REQUIRE(evaluate(spec, bits({1, 1, 1, 1, 1, 1, 1, 1})) == 0.0);
  REQUIRE(evaluate(spec, bits({0, 0, 0, 0, 0, 0, 0, 0})) == 8.0);
  REQUIRE(evaluate(spec, bits({1, 1, 0, 1, 0, 1, 1, 1})) == 2.0);
}

TEST_CASE("sphere is zero at the origin") {
  const ObjectiveSpec spec = Sphere{3};
  REQUIRE(evaluate(spec, RealVector{{0.0, 0.0, 0.0}}) == 0.0);
  REQUIRE(evaluate(spec, RealVector{{1.0, 2.0, 2.0}}) == 9.0);
}

TEST_CASE("tsp tour length sums matrix entries") {
  const ObjectiveSpec spec = TspTour{testutil::four_city_matrix()};
  // tour 0-1-3-2-0: 1 + 2 + 1 + 2
  REQUIRE(evaluate(spec, Permutation{{0, 1, 3, 2}}) == 6.0);
  // tour 0-1-2-3-0: 1 + 9 + 1 + 9
  REQUIRE(evaluate(spec, Permutation{{0, 1, 2, 3}}) == 20.0);
}

TEST_CASE("knapsack penalty form, shifted to stay nonnegative") {
  KnapsackPenalty ks;
  ks.weights = {2, 3, 4, 5};
  ks.values = {3, 4, 5, 6};
  ks.capacity = 5;
  ks.penalty_coefficient = 10;
  const ObjectiveSpec spec = ks;
  // shift = 18; items {0,1}: weight 5 fits, value 7 -> 18 - 7 = 11
  REQUIRE(evaluate(spec, bits({1, 1, 0, 0})) == 11.0);
  // all items: weight 14, violation 9 -> 18 - 18 + 90 = 90
  REQUIRE(evaluate(spec, bits({1, 1, 1, 1})) == 90.0);
  // empty knapsack: 18
  REQUIRE(evaluate(spec, bits({0, 0, 0, 0})) == 18.0);
}

TEST_CASE("every objective value is nonnegative on random genomes") {
  const std::vector<ObjectiveSpec> specs = {
      OneMaxMin{10}, Sphere{3}, TspTour{testutil::four_city_matrix()},
      KnapsackPenalty{{2, 3, 4, 5}, {3, 4, 5, 6}, 5, 10}};
  const std::vector<RepresentationSpec> reprs = {
      BitStringSpec{10}, RealVectorSpec{3, {{-5, 5}, {-5, 5}, {-5, 5}}},
      PermutationSpec{4}, BitStringSpec{4}};
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const Population pop = init_population(reprs[i], 200, 7 + i);
    for (const Genome& g : pop.members) REQUIRE(evaluate(specs[i], g) >= 0.0);
  }
}

TEST_CASE("representation mismatch raises an evaluation error") {
  REQUIRE_THROWS_AS(evaluate(OneMaxMin{8}, RealVector{{1.0}}), EvaluationError);
  REQUIRE_THROWS_AS(evaluate(OneMaxMin{8}, bits({1, 0})), EvaluationError);
}

TEST_CASE("objective validation") {
  REQUIRE_THROWS_AS(validate_objective(TspTour{{{0, 1}, {2, 0}}}), ConfigError);
  REQUIRE_THROWS_AS(validate_objective(TspTour{{{1}}}), ConfigError);
  REQUIRE_THROWS_AS(validate_objective(KnapsackPenalty{{1}, {1, 2}, 1, 1}), ConfigError);
  REQUIRE_NOTHROW(validate_objective(TspTour{testutil::four_city_matrix()}));
}

TEST_CASE("best of population breaks ties by lowest index") {
  const ObjectiveSpec spec = OneMaxMin{3};
  Population pop;
  pop.members = {bits({0, 0, 0}), bits({1, 1, 0}), bits({0, 1, 1})};
  const auto [genome, value] = best_of_population(spec, pop);
  REQUIRE(value == 1.0);
  REQUIRE(genome == Genome{bits({1, 1, 0})});

  Population equal;
  equal.members = {bits({1, 0, 1}), bits({1, 0, 1}), bits({1, 0, 1})};
  REQUIRE(best_member(spec, equal).index == 0);

  Population single;
  single.members = {bits({0, 1, 0})};
  REQUIRE(best_of_population(spec, single).second == 2.0);

  REQUIRE_THROWS_AS(best_of_population(spec, Population{}), AnalysisError);
}

TEST_CASE("search cost value normalizes evaluation counts") {
  SearchCost cost;
  REQUIRE(search_cost_value(cost, 100.0) == 0.0);
  cost.evaluations = 500;
  REQUIRE(search_cost_value(cost, 100.0) == 5.0);
  SearchCost fewer;
  fewer.evaluations = 400;
  REQUIRE(search_cost_value(fewer, 100.0) < search_cost_value(cost, 100.0));
  REQUIRE_THROWS_AS(search_cost_value(cost, 0.0), ConfigError);
}

TEST_CASE("aggregation variants") {
  REQUIRE(std::get<double>(aggregate(WeightedSum{0.0, 1.0}, 123.0, 4.0)) == 4.0);
  REQUIRE(std::get<double>(aggregate(WeightedSum{0.5, 0.5}, 2.0, 4.0)) == 3.0);
  const auto pareto = aggregate(ParetoAggregator{}, 2.0, 4.0);
  REQUIRE(std::get<std::pair<double, double>>(pareto) == std::make_pair(2.0, 4.0));
  REQUIRE(std::get<double>(aggregate(ProductAggregator{}, 0.0, 0.0)) == 0.0);
  REQUIRE(std::get<double>(aggregate(ProductAggregator{}, 1.0, 2.0)) == 5.0);
  for (double w2 : {0.0, 0.25, 3.0})
    for (double w3 : {0.0, 1.0, 7.5})
      REQUIRE(std::get<double>(aggregate(WeightedSum{w2, w3}, 0.0, 0.0)) == 0.0);
  REQUIRE_THROWS_AS(aggregate(WeightedSum{-0.1, 1.0}, 1.0, 1.0), ConfigError);
}

TEST_CASE("weight rescaling keeps the argmin of the aggregate") {
  const std::vector<std::pair<double, double>> candidates = {
      {5.0, 1.0}, {2.0, 3.0}, {0.5, 8.0}, {1.0, 1.5}};
  const auto argmin = [&](double w2, double w3) {
    std::size_t best = 0;
    double best_v = 0.0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      const double v = std::get<double>(
          aggregate(WeightedSum{w2, w3}, candidates[i].first, candidates[i].second));
      if (i == 0 || v < best_v) {
        best = i;
        best_v = v;
      }
    }
    return best;
  };
  for (double scale : {0.25, 1.0, 13.0})
    REQUIRE(argmin(0.3, 0.7) == argmin(0.3 * scale, 0.7 * scale));
}

TEST_CASE("integer-valued objectives get exact optimum tolerance") {
  REQUIRE(integer_valued(OneMaxMin{4}));
  REQUIRE(optimum_tolerance(OneMaxMin{4}) == 0.0);
  REQUIRE_FALSE(integer_valued(Sphere{2}));
  REQUIRE(optimum_tolerance(Sphere{2}) == 1e-9);
  REQUIRE(integer_valued(TspTour{testutil::four_city_matrix()}));
  REQUIRE_FALSE(integer_valued(TspTour{{{0.0, 1.5}, {1.5, 0.0}}}));
}

TEST_CASE("objective-difference distance") {
  const ObjectiveSpec spec = OneMaxMin{3};
  const Genome x = bits({1, 1, 0});
  const Genome y = bits({0, 0, 0});
  REQUIRE(distance(x, x, spec) == 0.0);
  REQUIRE(distance(x, y, spec) == 2.0);
  REQUIRE(distance(x, y, spec) == distance(y, x, spec));
}

TEST_CASE("distance to an optimal set") {
  const ObjectiveSpec spec = OneMaxMin{3};
  OptimalSet with_value = declared_optimum(0.0);
  REQUIRE(distance_to_set(bits({0, 1, 0}), with_value, spec) == 2.0);

  OptimalSet only_optima;
  only_optima.optima = {Genome{bits({1, 1, 1})}};
  REQUIRE(distance_to_set(bits({1, 1, 1}), only_optima, spec) == 0.0);
  REQUIRE(distance_to_set(bits({1, 0, 1}), only_optima, spec) ==
          distance(bits({1, 0, 1}), bits({1, 1, 1}), spec));

  REQUIRE_THROWS_AS(distance_to_set(bits({1, 1, 1}), OptimalSet{}, spec), AnalysisError);
}

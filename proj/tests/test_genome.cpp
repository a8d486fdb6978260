#include <catch2/catch_amalgamated.hpp>

#include "test_util.hpp"

using namespace etm;

TEST_CASE("init_population is a pure function of spec, size and seed") {
  const RepresentationSpec spec = BitStringSpec{4};
  const Population a = init_population(spec, 3, 7);
  const Population b = init_population(spec, 3, 7);
  REQUIRE(a == b);
  const Population c = init_population(spec, 3, 8);
  REQUIRE(a.members != c.members);
}

TEST_CASE("degenerate bounds force a single point") {
  RealVectorSpec spec;
  spec.d = 2;
  spec.bounds = {{0.0, 0.0}, {0.0, 0.0}};
  const Population pop = init_population(spec, 5, 12345);
  for (const Genome& g : pop.members) {
    const auto& rv = std::get<RealVector>(g);
    REQUIRE(rv.values == std::vector<double>{0.0, 0.0});
  }
}

TEST_CASE("per-bit frequency of a large random population is unbiased") {
  const Population pop = init_population(BitStringSpec{8}, 10000, 1);
  // per-bit ones ~ Binomial(10000, 0.5): 3 sigma = 3*sqrt(2500) = 150
  for (std::size_t bit = 0; bit < 8; ++bit) {
    int ones = 0;
    for (const Genome& g : pop.members) ones += std::get<BitString>(g).bits[bit];
    REQUIRE(std::abs(ones - 5000) <= 150);
  }
}

TEST_CASE("permutation initialization yields valid bijections") {
  const Population pop = init_population(PermutationSpec{9}, 500, 99);
  for (const Genome& g : pop.members) REQUIRE(genome_matches(PermutationSpec{9}, g));
}

TEST_CASE("representation validation errors") {
  REQUIRE_THROWS_AS(init_population(BitStringSpec{4}, 0, 1), ConfigError);
  RealVectorSpec bad;
  bad.d = 1;
  bad.bounds = {{2.0, 1.0}};
  REQUIRE_THROWS_AS(init_population(bad, 3, 1), ConfigError);
  RealVectorSpec mismatched;
  mismatched.d = 2;
  mismatched.bounds = {{0.0, 1.0}};
  REQUIRE_THROWS_AS(validate_representation(RepresentationSpec{mismatched}), ConfigError);
}

TEST_CASE("genome invariant checks") {
  REQUIRE(genome_matches(BitStringSpec{3}, BitString{{1, 0, 1}}));
  REQUIRE_FALSE(genome_matches(BitStringSpec{3}, BitString{{1, 0}}));
  REQUIRE_FALSE(genome_matches(PermutationSpec{3}, Permutation{{0, 0, 2}}));
  RealVectorSpec rv;
  rv.d = 1;
  rv.bounds = {{-1.0, 1.0}};
  REQUIRE(genome_matches(rv, RealVector{{0.5}}));
  REQUIRE_FALSE(genome_matches(rv, RealVector{{1.5}}));
}

TEST_CASE("genome string forms") {
  REQUIRE(genome_to_string(BitString{{1, 0, 1, 1}}) == "1011");
  REQUIRE(genome_to_string(RealVector{{0.5, 2.0}}) == "0.5,2");
  REQUIRE(genome_to_string(Permutation{{2, 0, 1}}) == "2,0,1");
}

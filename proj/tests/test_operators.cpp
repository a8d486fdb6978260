#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>

#include "test_util.hpp"

using namespace etm;

namespace {

Population bit_population(std::initializer_list<std::string> rows) {
  Population pop;
  for (const std::string& row : rows) {
    BitString b;
    for (char c : row) b.bits.push_back(c == '1' ? 1 : 0);
    pop.members.emplace_back(std::move(b));
  }
  return pop;
}

} // namespace

TEST_CASE("zero-rate bit flip is the identity") {
  const Population pop = init_population(BitStringSpec{16}, 10, 1);
  const Population out =
      vary(BitFlip{0.0}, BitStringSpec{16}, pop, rng::Stream::derive(1, "vary", 0));
  REQUIRE(out.members == pop.members);
}

TEST_CASE("rate-one bit flip is the full complement") {
  const Population pop = bit_population({"1010"});
  const Population out =
      vary(BitFlip{1.0}, BitStringSpec{4}, pop, rng::Stream::derive(1, "vary", 0));
  REQUIRE(out.members.front() == Genome{BitString{{0, 1, 0, 1}}});
}

TEST_CASE("bit flip rate matches the binomial oracle") {
  const std::size_t n = 100, count = 10000;
  const Population pop = init_population(BitStringSpec{100}, count, 5);
  const Population out =
      vary(BitFlip{0.1}, BitStringSpec{100}, pop, rng::Stream::derive(5, "vary", 0));
  std::uint64_t flips = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const auto& a = std::get<BitString>(pop.members[i]).bits;
    const auto& b = std::get<BitString>(out.members[i]).bits;
    for (std::size_t j = 0; j < n; ++j) flips += a[j] != b[j];
  }
  // flips per genome ~ Binomial(100, 0.1); 3 sigma of the mean over 10000
  // genomes = 3 * sqrt(100*0.1*0.9/10000) = 0.09
  const double mean = static_cast<double>(flips) / count;
  REQUIRE(std::abs(mean - 10.0) <= 0.09);
}

TEST_CASE("variation is pure given the stream") {
  const Population pop = init_population(BitStringSpec{12}, 8, 2);
  const auto s = rng::Stream::derive(9, "vary", 3);
  REQUIRE(vary(BitFlip{0.3}, BitStringSpec{12}, pop, s).members ==
          vary(BitFlip{0.3}, BitStringSpec{12}, pop, s).members);
}

TEST_CASE("one-point crossover exchanges tails of adjacent pairs") {
  const Population pop = bit_population({"0000", "1111", "0101"});
  const Population out = vary(OnePointCrossover{0.0}, BitStringSpec{4}, pop,
                              rng::Stream::derive(3, "vary", 0));
  const auto& a = std::get<BitString>(out.members[0]).bits;
  const auto& b = std::get<BitString>(out.members[1]).bits;
  // children are 0^cut 1^(4-cut) and 1^cut 0^(4-cut) for some cut in [1,3]
  std::size_t cut = 0;
  while (cut < 4 && a[cut] == 0) ++cut;
  REQUIRE(cut >= 1);
  REQUIRE(cut <= 3);
  for (std::size_t j = 0; j < 4; ++j) {
    REQUIRE(a[j] == (j < cut ? 0 : 1));
    REQUIRE(b[j] == (j < cut ? 1 : 0));
  }
  // odd trailing member passes through at rate 0
  REQUIRE(out.members[2] == pop.members[2]);
}

TEST_CASE("gaussian mutation clamps to the bounds") {
  RealVectorSpec repr;
  repr.d = 2;
  repr.bounds = {{-1.0, 1.0}, {0.0, 0.5}};
  const Population pop = init_population(repr, 200, 3);
  const Population out =
      vary(GaussianMutation{5.0}, repr, pop, rng::Stream::derive(3, "vary", 0));
  for (const Genome& g : out.members) REQUIRE(genome_matches(repr, g));
}

TEST_CASE("swap mutation keeps permutations bijective") {
  const Population pop = init_population(PermutationSpec{9}, 300, 8);
  const Population out =
      vary(SwapMutation{0.5}, PermutationSpec{9}, pop, rng::Stream::derive(8, "vary", 0));
  for (const Genome& g : out.members) REQUIRE(genome_matches(PermutationSpec{9}, g));
  const Population same =
      vary(SwapMutation{0.0}, PermutationSpec{9}, pop, rng::Stream::derive(8, "vary", 0));
  REQUIRE(same.members == pop.members);
}

TEST_CASE("variation validation") {
  const Population pop = init_population(BitStringSpec{4}, 2, 1);
  REQUIRE_THROWS_AS(
      vary(BitFlip{1.5}, BitStringSpec{4}, pop, rng::Stream::derive(1, "vary", 0)),
      ConfigError);
  REQUIRE_THROWS_AS(
      vary(GaussianMutation{1.0}, BitStringSpec{4}, pop, rng::Stream::derive(1, "vary", 0)),
      ConfigError);
}

TEST_CASE("truncation keeps exactly the lowest-fitness members") {
  const Population pop = bit_population({"000", "110", "100"});
  const std::vector<double> fits = {3.0, 1.0, 2.0};
  const SelectionResult out =
      select(SelectionSpec{Truncation{2.0 / 3.0}, false}, pop, fits, 3,
             rng::Stream::derive(1, "select", 0));
  REQUIRE(out.pop.members.size() == 3);
  std::multiset<double> kept(out.fitnesses.begin(), out.fitnesses.end());
  REQUIRE(kept == std::multiset<double>{1.0, 1.0, 2.0});
  std::set<double> distinct(out.fitnesses.begin(), out.fitnesses.end());
  REQUIRE(distinct == std::set<double>{1.0, 2.0});
}

TEST_CASE("full tournament always returns the global best") {
  const Population pop = init_population(BitStringSpec{10}, 12, 17);
  const std::vector<double> fits = evaluate_population(OneMaxMin{10}, pop);
  const double best = *std::min_element(fits.begin(), fits.end());
  const SelectionResult out =
      select(SelectionSpec{Tournament{12}, false}, pop, fits, 12,
             rng::Stream::derive(17, "select", 0));
  for (double f : out.fitnesses) REQUIRE(f == best);
}

TEST_CASE("proportional selection is uniform over equal fitnesses") {
  const std::size_t members = 10, draws = 10000;
  Population pop;
  for (std::size_t i = 0; i < members; ++i) {
    BitString b;
    for (int bit = 0; bit < 4; ++bit)
      b.bits.push_back(static_cast<std::uint8_t>((i >> bit) & 1));
    pop.members.emplace_back(std::move(b));
  }
  const std::vector<double> fits(members, 5.0);
  std::vector<int> counts(members, 0);
  const SelectionResult out =
      select(SelectionSpec{Proportional{}, false}, pop, fits, draws,
             rng::Stream::derive(23, "select", 0));
  for (const Genome& g : out.pop.members) {
    const auto it = std::find(pop.members.begin(), pop.members.end(), g);
    REQUIRE(it != pop.members.end());
    ++counts[static_cast<std::size_t>(it - pop.members.begin())];
  }
  // chi-square with 9 dof, p = 0.01 critical value 21.666
  double chi2 = 0.0;
  const double expect = static_cast<double>(draws) / members;
  for (int c : counts) chi2 += (c - expect) * (c - expect) / expect;
  REQUIRE(chi2 < 21.666);
}

TEST_CASE("selection never fabricates genomes") {
  const Population pop = init_population(BitStringSpec{8}, 9, 31);
  const std::vector<double> fits = evaluate_population(OneMaxMin{8}, pop);
  for (const SelectionSpec spec :
       {SelectionSpec{Truncation{0.4}, true}, SelectionSpec{Tournament{3}, false},
        SelectionSpec{Proportional{}, true}}) {
    const SelectionResult out =
        select(spec, pop, fits, 9, rng::Stream::derive(31, "select", 1));
    REQUIRE(out.pop.members.size() == 9);
    for (const Genome& g : out.pop.members)
      REQUIRE(std::find(pop.members.begin(), pop.members.end(), g) != pop.members.end());
  }
}

TEST_CASE("elitism guarantees the incumbent a slot") {
  const Population pop = bit_population({"0000", "0011", "0001"});
  const std::vector<double> fits = {4.0, 2.0, 3.0};
  Incumbent incumbent;
  incumbent.genome = BitString{{1, 1, 1, 1}};
  incumbent.fitness = 0.0;
  const SelectionResult out =
      select(SelectionSpec{Tournament{2}, true}, pop, fits, 3,
             rng::Stream::derive(2, "select", 0), incumbent);
  REQUIRE(std::count(out.pop.members.begin(), out.pop.members.end(), incumbent.genome) == 1);
  REQUIRE(*std::min_element(out.fitnesses.begin(), out.fitnesses.end()) == 0.0);
}

TEST_CASE("selection input mismatches raise engine errors") {
  const Population pop = init_population(BitStringSpec{4}, 3, 1);
  const std::vector<double> bad = {1.0, 2.0};
  REQUIRE_THROWS_AS(select(SelectionSpec{Tournament{2}, false}, pop, bad, 3,
                           rng::Stream::derive(1, "select", 0)),
                    EngineError);
  const std::vector<double> fits = {1.0, 2.0, 3.0};
  REQUIRE_THROWS_AS(select(SelectionSpec{Tournament{9}, false}, pop, fits, 3,
                           rng::Stream::derive(1, "select", 0)),
                    ConfigError);
}

TEST_CASE("self-adaptation perturbs only the strategy parameters") {
  SelfAdaptiveExtension ext;
  ext.enabled = true;
  ext.param_min = 0.001;
  ext.param_max = 0.999;
  ext.meta_sigma = 0.2;
  ext.init_param = 0.1;

  Population pop = init_population(BitStringSpec{6}, 50, 3);
  ensure_strategy_params(pop, ext);

  SECTION("zero meta-sigma leaves parameters unchanged") {
    SelfAdaptiveExtension frozen = ext;
    frozen.meta_sigma = 0.0;
    const Population out =
        apply_self_adaptation(frozen, pop, rng::Stream::derive(3, "adapt", 0));
    REQUIRE(out.strategy_params == pop.strategy_params);
    REQUIRE(out.members == pop.members);
  }

  SECTION("clamping holds at the upper bound") {
    Population at_max = pop;
    std::fill(at_max.strategy_params.begin(), at_max.strategy_params.end(), ext.param_max);
    const auto stream = rng::Stream::derive(3, "adapt", 1);
    const Population out = apply_self_adaptation(ext, at_max, stream);
    for (std::size_t i = 0; i < out.strategy_params.size(); ++i) {
      REQUIRE(out.strategy_params[i] <= ext.param_max);
      rng::Stream s = stream.substream(i);
      if (std::exp(ext.meta_sigma * s.next_gaussian()) >= 1.0)
        REQUIRE(out.strategy_params[i] == ext.param_max);
    }
    REQUIRE(out.members == at_max.members);
  }

  SECTION("log-normal perturbation keeps the median at the base rate") {
    std::vector<double> samples;
    Population big = init_population(BitStringSpec{6}, 10000, 4);
    ensure_strategy_params(big, ext);
    const Population out =
        apply_self_adaptation(ext, big, rng::Stream::derive(4, "adapt", 0));
    samples = out.strategy_params;
    std::sort(samples.begin(), samples.end());
    const double median = (samples[4999] + samples[5000]) / 2.0;
    // asymptotic sigma of the sample median of LogNormal(ln 0.1, 0.2):
    // m * sigma * sqrt(2*pi) / (2*sqrt(n)) ~= 2.51e-4
    REQUIRE(std::abs(median - 0.1) <= 3.0 * 2.51e-4);
  }
}

TEST_CASE("self-adaptive preconditions") {
  SelfAdaptiveExtension off;
  Population pop = init_population(BitStringSpec{4}, 3, 1);
  REQUIRE_THROWS_AS(apply_self_adaptation(off, pop, rng::Stream::derive(1, "adapt", 0)),
                    ConfigError);
  SelfAdaptiveExtension bad;
  bad.enabled = true;
  bad.param_min = 0.2;
  bad.param_max = 0.1;
  bad.init_param = 0.15;
  REQUIRE_THROWS_AS(validate_self_adaptive(bad, BitFlip{0.1}), ConfigError);
}

TEST_CASE("bit flip one-step transitions all have positive probability") {
  // product formula on n = 3: rate^H * (1-rate)^(3-H) > 0 for rate in (0,1)
  for (double rate : {0.05, 0.5, 0.95}) {
    for (std::uint32_t x = 0; x < 8; ++x) {
      for (std::uint32_t y = 0; y < 8; ++y) {
        const std::uint32_t mask = x ^ y;
        double p = 1.0;
        for (std::uint32_t b = 0; b < 3; ++b)
          p *= ((mask >> b) & 1u) ? rate : 1.0 - rate;
        REQUIRE(p > 0.0);
      }
    }
  }
}

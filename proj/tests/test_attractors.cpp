#include <catch2/catch_amalgamated.hpp>

#include <map>

#include "mpsim/attractors.hpp"
#include "mpsim/bnet.hpp"
#include "mpsim/oracle.hpp"
#include "support/generators.hpp"
#include "support/stats.hpp"

using namespace mpsim;

namespace {

const char* kToyA = "x1, 1\nx2, x1\nx3, (!x1 & x2) | x3\n";
const char* kToyB = "x1, x1 & !x3\nx2, x1\nx3, !x1\n";

bool disjoint(const TrapSpace& a, const TrapSpace& b) {
  Mask common_fixed = ~a.free_mask & ~b.free_mask & full_mask(a.n);
  return ((a.fixed_bits ^ b.fixed_bits) & common_fixed) != 0;
}

}  // namespace

TEST_CASE("trap-space membership test") {
  Network b = parse_bnet(kToyB);
  Engine engine(b);
  CHECK(is_trap_space(engine, Subhypercube::parse("0**")));
  CHECK_FALSE(is_trap_space(engine, Subhypercube::parse("1*1")));
  CHECK(is_trap_space(engine, Subhypercube::parse("***")));
}

TEST_CASE("minimal trap spaces of the toys") {
  SECTION("bistable toy") {
    Network a = parse_bnet(kToyA);
    Engine engine(a);
    AttractorSet set = minimal_trap_spaces(engine);
    REQUIRE(set.size() == 2);
    CHECK(set.id(0) == "110");
    CHECK(set.id(1) == "111");
  }
  SECTION("input-switch toy") {
    Network b = parse_bnet(kToyB);
    Engine engine(b);
    AttractorSet set = minimal_trap_spaces(engine);
    REQUIRE(set.size() == 2);
    CHECK(set.id(0) == "001");
    CHECK(set.id(1) == "110");
  }
  SECTION("identity network: every configuration is an attractor") {
    Network net = parse_bnet("a, a\nb, b\n");
    Engine engine(net);
    AttractorSet set = minimal_trap_spaces(engine);
    REQUIRE(set.size() == 4);
    CHECK(set.id(0) == "00");
    CHECK(set.id(3) == "11");
  }
  SECTION("negation loop keeps the full cube") {
    Network net = parse_bnet("a, !a\n");
    Engine engine(net);
    AttractorSet set = minimal_trap_spaces(engine);
    REQUIRE(set.size() == 1);
    CHECK(set.id(0) == "*");
  }
}

TEST_CASE("returned members are minimal, disjoint trap spaces") {
  RandomStream rng(31);
  for (int rep = 0; rep < 25; ++rep) {
    Network net = testing::random_network(6, rep % 2 == 0, rng);
    Engine engine(net);
    AttractorSet set = minimal_trap_spaces(engine);
    for (std::size_t i = 0; i < set.size(); ++i) {
      CHECK(is_trap_space(engine, set[i]));
      for (std::size_t j = i + 1; j < set.size(); ++j) {
        CHECK(disjoint(set[i], set[j]));
        CHECK_FALSE(set[i].smaller_eq(set[j]));
        CHECK_FALSE(set[j].smaller_eq(set[i]));
      }
    }
  }
}

TEST_CASE("minimal trap spaces match the exhaustive scan") {
  RandomStream rng(32);
  for (int rep = 0; rep < 25; ++rep) {
    Network net = testing::random_network(7, rep % 2 == 0, rng);
    Engine engine(net);
    AttractorSet fast = minimal_trap_spaces(engine);
    AttractorSet brute = oracle::trap_spaces_bruteforce(net);
    REQUIRE(fast.size() == brute.size());
    for (std::size_t i = 0; i < fast.size(); ++i) CHECK(fast.id(i) == brute.id(i));
  }
}

TEST_CASE("enumeration budget") {
  Network net = parse_bnet("a, a\nb, b\nc, c\nd, d\ne, e\n");
  Engine engine(net);
  TrapSpaceOptions options;
  options.node_budget = 4;
  CHECK_THROWS_AS(minimal_trap_spaces(engine, options), BudgetError);
}

TEST_CASE("reachable-attractor filter") {
  Network a = parse_bnet(kToyA);
  Engine engine(a);
  AttractorSet all = minimal_trap_spaces(engine);
  SECTION("from 100 only the lower fixed point remains") {
    AttractorSet filtered =
        filter_reachable_attractors(all, engine, parse_configuration("100", a));
    REQUIRE(filtered.size() == 1);
    CHECK(filtered.id(0) == "110");
  }
  SECTION("from the origin both attractors remain") {
    AttractorSet filtered =
        filter_reachable_attractors(all, engine, parse_configuration("000", a));
    CHECK(filtered.size() == 2);
  }
  SECTION("inside an attractor only it remains") {
    AttractorSet filtered =
        filter_reachable_attractors(all, engine, parse_configuration("111", a));
    REQUIRE(filtered.size() == 1);
    CHECK(filtered.id(0) == "111");
  }
  SECTION("from 101 the upper fixed point remains") {
    AttractorSet filtered =
        filter_reachable_attractors(all, engine, parse_configuration("101", a));
    REQUIRE(filtered.size() == 1);
    CHECK(filtered.id(0) == "111");
  }
}

TEST_CASE("attractor membership") {
  Network a = parse_bnet(kToyA);
  Engine ea(a);
  AttractorSet sa = minimal_trap_spaces(ea);
  CHECK(in_attractor(parse_configuration("111", a), sa));
  CHECK_FALSE(in_attractor(parse_configuration("000", a), sa));

  Network b = parse_bnet(kToyB);
  Engine eb(b);
  AttractorSet sb = minimal_trap_spaces(eb);
  CHECK(in_attractor(parse_configuration("001", b), sb));
}

TEST_CASE("attractor sampling") {
  Network a = parse_bnet(kToyA);
  Engine engine(a);
  AttractorSet attractors = minimal_trap_spaces(engine);

  SECTION("asynchronous walk always reaches the lower fixed point") {
    SimulationParams params{DepthDistribution::constant(1), WeightVector::uniform(3)};
    for (std::uint64_t run = 0; run < 50; ++run) {
      RandomStream rng = RandomStream::derive(17, run);
      AttractorSample s = sample_reachable_attractor(
          engine, attractors, parse_configuration("000", a), params, rng);
      REQUIRE(s.converged);
      CHECK(attractors.id(static_cast<std::size_t>(s.attractor)) == "110");
    }
  }
  SECTION("starting at a fixed point returns it with zero steps") {
    SimulationParams params{DepthDistribution::constant(3), WeightVector::uniform(3)};
    RandomStream rng(8);
    AttractorSample s = sample_reachable_attractor(
        engine, attractors, parse_configuration("110", a), params, rng);
    REQUIRE(s.converged);
    CHECK(s.steps == 0);
    CHECK(attractors.id(static_cast<std::size_t>(s.attractor)) == "110");
  }
  SECTION("strong-basin variant stops without stepping inside a basin") {
    SimulationParams params{DepthDistribution::constant(3), WeightVector::uniform(3)};
    RandomStream rng(9);
    AttractorSample s = sample_reachable_attractor_bis(
        engine, attractors, parse_configuration("100", a), params, rng);
    REQUIRE(s.converged);
    CHECK(s.steps == 0);
    CHECK(attractors.id(static_cast<std::size_t>(s.attractor)) == "110");
  }
  SECTION("non-convergence is reported under a tiny step bound") {
    SimulationParams params{DepthDistribution::constant(1), WeightVector::uniform(3)};
    params.max_steps = 1;
    RandomStream rng(10);
    AttractorSample s = sample_reachable_attractor(
        engine, attractors, parse_configuration("000", a), params, rng);
    CHECK_FALSE(s.converged);
  }
  SECTION("membership and strong-basin stopping agree in distribution") {
    SimulationParams params{DepthDistribution::constant(3), WeightVector::uniform(3)};
    params.stop = StopPolicy::kAttractor;
    PropensityEstimate plain = estimate_propensities(
        engine, attractors, parse_configuration("000", a), params, 10000, 21, 2);
    params.stop = StopPolicy::kStrongBasin;
    PropensityEstimate basin = estimate_propensities(
        engine, attractors, parse_configuration("000", a), params, 10000, 22, 2);
    std::map<std::uint64_t, std::uint64_t> observed;
    std::map<std::uint64_t, double> expected;
    for (std::size_t i = 0; i < attractors.size(); ++i) {
      observed[i] = basin.counts[i];
      expected[i] = static_cast<double>(plain.counts[i]) /
                    static_cast<double>(plain.converged());
    }
    CHECK(testing::chi_square_gof(observed, expected, basin.converged()) > 0.001);
  }
}

TEST_CASE("filter shrinks monotonically along a trajectory") {
  Network b = parse_bnet(kToyB);
  Engine engine(b);
  AttractorSet all = minimal_trap_spaces(engine);
  SimulationParams params{DepthDistribution::exponential_decay(3),
                          WeightVector::uniform(3)};
  for (std::uint64_t run = 0; run < 30; ++run) {
    RandomStream rng = RandomStream::derive(55, run);
    Configuration x = parse_configuration("111", b);
    AttractorSet current = filter_reachable_attractors(all, engine, x);
    for (int step = 0; step < 15; ++step) {
      x = sample_next_configuration(engine, x, params, rng);
      AttractorSet next = filter_reachable_attractors(current, engine, x);
      CHECK(next.size() <= current.size());
      for (std::size_t i = 0; i < next.size(); ++i) {
        bool was_there = false;
        for (std::size_t j = 0; j < current.size(); ++j)
          if (current.id(j) == next.id(i)) was_there = true;
        CHECK(was_there);
      }
      current = next;
    }
  }
}

TEST_CASE("propensity estimation") {
  Network a = parse_bnet(kToyA);
  Engine engine(a);
  AttractorSet attractors = minimal_trap_spaces(engine);
  SimulationParams params{DepthDistribution::constant(3), WeightVector::uniform(3)};

  SECTION("bistable toy is near even at full depth") {
    PropensityEstimate e = estimate_propensities(
        engine, attractors, parse_configuration("000", a), params, 10000, 42, 2);
    CHECK(e.non_converged == 0);
    auto fr = e.fractions();
    CHECK(fr[0] + fr[1] == 1.0);
    CHECK(fr[0] > 0.47);
    CHECK(fr[0] < 0.53);
  }
  SECTION("worker count does not change the counts") {
    PropensityEstimate one = estimate_propensities(
        engine, attractors, parse_configuration("000", a), params, 2000, 7, 1);
    PropensityEstimate three = estimate_propensities(
        engine, attractors, parse_configuration("000", a), params, 2000, 7, 3);
    CHECK(one.counts == three.counts);
    CHECK(one.non_converged == three.non_converged);
  }
}

TEST_CASE("sampling caveat detection") {
  Network pair = parse_bnet("a, !b\nb, a\n");
  Engine engine(pair);
  AttractorSet attractors = minimal_trap_spaces(engine);
  REQUIRE(attractors.size() == 1);
  REQUIRE(attractors[0].rank() == 2);  // cyclic attractor spanning the cube
  SimulationParams full{DepthDistribution::constant(2), WeightVector::uniform(2)};
  CHECK(sampling_matches_attractors(attractors, full, 2));
  SimulationParams shallow{DepthDistribution::constant(1), WeightVector::uniform(2)};
  CHECK_FALSE(sampling_matches_attractors(attractors, shallow, 2));

  Network a = parse_bnet(kToyA);
  Engine ea(a);
  AttractorSet sa = minimal_trap_spaces(ea);
  // Only fixed points: any parametrisation is safe.
  CHECK(sampling_matches_attractors(sa, shallow, 3));
}

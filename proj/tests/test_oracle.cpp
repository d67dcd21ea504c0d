#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>

#include "mpsim/attractors.hpp"
#include "mpsim/bnet.hpp"
#include "mpsim/oracle.hpp"
#include "support/generators.hpp"

using namespace mpsim;

namespace {

const char* kToyA = "x1, 1\nx2, x1\nx3, (!x1 & x2) | x3\n";
const char* kToyB = "x1, x1 & !x3\nx2, x1\nx3, !x1\n";

std::set<std::uint64_t> to_set(const std::vector<Configuration>& configs) {
  std::set<std::uint64_t> out;
  for (const Configuration& c : configs) out.insert(c.bits);
  return out;
}

std::set<std::string> to_strings(const std::vector<Configuration>& configs) {
  std::set<std::string> out;
  for (const Configuration& c : configs) out.insert(c.to_string());
  return out;
}

}  // namespace

TEST_CASE("brute-force most-permissive successors") {
  SECTION("bistable toy from the origin") {
    Network a = parse_bnet(kToyA);
    auto successors =
        oracle::mp_successors_bruteforce(a, parse_configuration("000", a));
    CHECK(to_strings(successors) ==
          std::set<std::string>{"000", "100", "110", "101", "111"});
  }
  SECTION("input-switch toy reaches everything from 111") {
    Network b = parse_bnet(kToyB);
    auto successors =
        oracle::mp_successors_bruteforce(b, parse_configuration("111", b));
    CHECK(successors.size() == 8);
  }
  SECTION("a transition visible only through a strict component subset") {
    Network a = parse_bnet(kToyA);
    auto successors =
        oracle::mp_successors_bruteforce(a, parse_configuration("011", a));
    CHECK(to_strings(successors).contains("001"));
  }
  SECTION("cap") {
    Network a = parse_bnet(kToyA);
    CHECK_THROWS_AS(
        oracle::mp_successors_bruteforce(a, parse_configuration("000", a), 2),
        BudgetError);
  }
}

TEST_CASE("asynchronous successor oracles") {
  Network b = parse_bnet(kToyB);
  Configuration x111 = parse_configuration("111", b);
  CHECK(to_strings(oracle::async_successors(b, x111)) ==
        std::set<std::string>{"011", "110", "010"});
  CHECK(to_strings(oracle::fully_async_successors(b, x111)) ==
        std::set<std::string>{"011", "110"});

  Configuration fixed = parse_configuration("001", b);
  CHECK(oracle::async_successors(b, fixed).empty());
  CHECK(oracle::fully_async_successors(b, fixed).empty());
}

TEST_CASE("successor relations are nested") {
  RandomStream rng(61);
  for (int rep = 0; rep < 30; ++rep) {
    Network net = testing::random_network(6, rep % 2 == 0, rng);
    for (std::uint64_t bits = 0; bits < 64; ++bits) {
      Configuration x{bits, 6};
      auto mp = to_set(oracle::mp_successors_bruteforce(net, x));
      auto async = to_set(oracle::async_successors(net, x));
      auto fully = to_set(oracle::fully_async_successors(net, x));
      for (std::uint64_t y : fully) CHECK(async.contains(y));
      for (std::uint64_t y : async) CHECK(mp.contains(y));
    }
  }
}

TEST_CASE("most-permissive reachability is transitive") {
  // One transition step already carries the whole reachability relation:
  // the transitive closure adds nothing beyond self-loops.
  RandomStream rng(62);
  for (int rep = 0; rep < 10; ++rep) {
    Network net = testing::random_network(5, rep % 2 == 0, rng);
    int n = net.size();
    std::vector<std::set<std::uint64_t>> successors(std::size_t{1} << n);
    for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) {
      successors[x] = to_set(oracle::mp_successors_bruteforce(net, {x, n}));
      successors[x].insert(x);
    }
    for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x)
      for (std::uint64_t y : successors[x])
        for (std::uint64_t z : successors[y]) CHECK(successors[x].contains(z));
  }
}

TEST_CASE("brute-force trap spaces") {
  SECTION("toys") {
    Network a = parse_bnet(kToyA);
    AttractorSet sa = oracle::trap_spaces_bruteforce(a);
    REQUIRE(sa.size() == 2);
    CHECK(sa.id(0) == "110");
    CHECK(sa.id(1) == "111");

    Network b = parse_bnet(kToyB);
    AttractorSet sb = oracle::trap_spaces_bruteforce(b);
    REQUIRE(sb.size() == 2);
    CHECK(sb.id(0) == "001");
    CHECK(sb.id(1) == "110");
  }
  SECTION("negation loop has no proper trap space") {
    Network net = parse_bnet("a, !a\n");
    AttractorSet set = oracle::trap_spaces_bruteforce(net);
    REQUIRE(set.size() == 1);
    CHECK(set.id(0) == "*");
  }
}

TEST_CASE("exact propensities on the worked toys") {
  Network a = parse_bnet(kToyA);
  Configuration x000 = parse_configuration("000", a);

  SECTION("full depth splits the bistable toy evenly") {
    auto r = oracle::exact_propensities(a, x000, DepthDistribution::constant(3),
                                        WeightVector::uniform(3));
    REQUIRE(r.attractors.size() == 2);
    CHECK_THAT(r.probabilities[0], Catch::Matchers::WithinAbs(0.5, 1e-9));
    CHECK_THAT(r.probabilities[1], Catch::Matchers::WithinAbs(0.5, 1e-9));
  }
  SECTION("exponentially decaying depth reaches the upper point rarely") {
    auto r = oracle::exact_propensities(a, x000,
                                        DepthDistribution::exponential_decay(3),
                                        WeightVector::uniform(3));
    REQUIRE(r.attractors.size() == 2);
    REQUIRE(r.attractors.id(1) == "111");
    CHECK_THAT(r.probabilities[1], Catch::Matchers::WithinAbs(1.0 / 14, 1e-9));
    CHECK_THAT(r.probabilities[0], Catch::Matchers::WithinAbs(13.0 / 14, 1e-9));
  }
  SECTION("asynchronous walk of the input-switch toy") {
    Network b = parse_bnet(kToyB);
    auto r = oracle::exact_propensities(b, parse_configuration("111", b),
                                        DepthDistribution::constant(1),
                                        WeightVector::uniform(3));
    REQUIRE(r.attractors.size() == 2);
    REQUIRE(r.attractors.id(0) == "001");
    CHECK_THAT(r.probabilities[0], Catch::Matchers::WithinAbs(2.0 / 3, 1e-9));
    CHECK_THAT(r.probabilities[1], Catch::Matchers::WithinAbs(1.0 / 3, 1e-9));
  }
  SECTION("single-flip weights make the two fates even") {
    Network b = parse_bnet(kToyB);
    auto r = oracle::exact_propensities(b, parse_configuration("111", b),
                                        DepthDistribution::constant(1),
                                        WeightVector::single(3));
    CHECK_THAT(r.probabilities[0], Catch::Matchers::WithinAbs(0.5, 1e-9));
  }
  SECTION("starting inside an attractor") {
    auto r = oracle::exact_propensities(a, parse_configuration("110", a),
                                        DepthDistribution::constant(3),
                                        WeightVector::uniform(3));
    CHECK_THAT(r.probabilities[0], Catch::Matchers::WithinAbs(1.0, 1e-9));
  }
  SECTION("probabilities sum to one on random networks") {
    RandomStream rng(63);
    for (int rep = 0; rep < 10; ++rep) {
      Network net = testing::random_network(5, true, rng);
      auto r = oracle::exact_propensities(net, {0, 5},
                                          DepthDistribution::exponential_decay(5),
                                          WeightVector::uniform(5));
      double sum = 0;
      for (double p : r.probabilities) sum += p;
      CHECK_THAT(sum, Catch::Matchers::WithinAbs(1.0, 1e-9));
    }
  }
}

TEST_CASE("sampling converges to the exact propensities") {
  Network a = parse_bnet(kToyA);
  Engine engine(a);
  AttractorSet attractors = minimal_trap_spaces(engine);
  Configuration x000 = parse_configuration("000", a);
  DepthDistribution depth = DepthDistribution::exponential_decay(3);
  WeightVector weights = WeightVector::uniform(3);
  auto exact = oracle::exact_propensities(a, x000, depth, weights);
  SimulationParams params{depth, weights};
  PropensityEstimate estimate =
      estimate_propensities(engine, attractors, x000, params, 10000, 1234, 2);
  auto fractions = estimate.fractions();
  REQUIRE(exact.attractors.size() == attractors.size());
  for (std::size_t i = 0; i < attractors.size(); ++i) {
    double p = exact.probabilities[i];
    double se = std::sqrt(p * (1 - p) / 10000.0);
    CHECK(std::abs(fractions[i] - p) <= 3 * se);
  }
}

#include <catch2/catch_amalgamated.hpp>

#include "mpsim/bnet.hpp"
#include "support/generators.hpp"

using namespace mpsim;

TEST_CASE("parse the bistable toy") {
  Network net = parse_bnet("x1, 1\nx2, x1\nx3, (!x1 & x2) | x3\n");
  REQUIRE(net.size() == 3);
  CHECK(net.name(0) == "x1");
  CHECK(net.name(2) == "x3");
  CHECK(net.apply({0b000, 3}).bits == 0b001);  // f(000) = 100 in display order
  CHECK(net.apply({0b011, 3}) == Configuration{0b011, 3});
}

TEST_CASE("one-component identity network") {
  Network net = parse_bnet("a, a");
  REQUIRE(net.size() == 1);
  CHECK(net.apply({0, 1}).bits == 0);
  CHECK(net.apply({1, 1}).bits == 1);
}

TEST_CASE("undeclared variable is rejected with its position") {
  try {
    parse_bnet("a, b\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
    CHECK(std::string(e.what()).find("undeclared") != std::string::npos);
  }
}

TEST_CASE("duplicate target is rejected") {
  CHECK_THROWS_AS(parse_bnet("a, 1\na, 0\n"), ParseError);
}

TEST_CASE("empty model is rejected") {
  CHECK_THROWS_AS(parse_bnet(""), UsageError);
  CHECK_THROWS_AS(parse_bnet("# only a comment\n\n"), UsageError);
}

TEST_CASE("header, comments, blank lines and CRLF") {
  Network net = parse_bnet(
      "# model\r\n"
      "targets, factors\r\n"
      "\r\n"
      "a, b\r\n"
      "b, !a\r\n");
  REQUIRE(net.size() == 2);
  CHECK(net.name(0) == "a");
  CHECK(net.eval_component(1, 0b00) == true);
}

TEST_CASE("operator precedence") {
  // !a & b | c reads as ((!a) & b) | c.
  Network flat = parse_bnet("a, !a & b | c\nb, 0\nc, 0\n");
  Network explicit_form = parse_bnet("a, ((!a) & b) | c\nb, 0\nc, 0\n");
  for (std::uint64_t x = 0; x < 8; ++x)
    CHECK(flat.eval_component(0, x) == explicit_form.eval_component(0, x));
  CHECK(flat.local(0).structurally_equal(explicit_form.local(0)));
}

TEST_CASE("keyword aliases") {
  Network net = parse_bnet("a, b AND NOT c OR 1\nb, not a\nc, a or b\n");
  Network symbolic = parse_bnet("a, b & !c | 1\nb, !a\nc, a | b\n");
  for (int i = 0; i < 3; ++i)
    for (std::uint64_t x = 0; x < 8; ++x)
      CHECK(net.eval_component(i, x) == symbolic.eval_component(i, x));
}

TEST_CASE("syntax errors carry positions") {
  try {
    parse_bnet("a, 1\nb, (a & \n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse_bnet("a 1\n"), ParseError);      // missing comma
  CHECK_THROWS_AS(parse_bnet("a, a b\n"), ParseError);   // trailing junk
  CHECK_THROWS_AS(parse_bnet("1a, 0\n"), ParseError);    // bad name
}

TEST_CASE("round-trip on the toys") {
  for (const char* text :
       {"x1, 1\nx2, x1\nx3, (!x1 & x2) | x3\n",
        "x1, x1 & !x3\nx2, x1\nx3, !x1\n", "a, 0\nb, 1\n"}) {
    Network net = parse_bnet(text);
    Network back = parse_bnet(serialize_bnet(net));
    REQUIRE(back.size() == net.size());
    for (int i = 0; i < net.size(); ++i) {
      CHECK(back.name(i) == net.name(i));
      CHECK(back.local(i).structurally_equal(net.local(i)));
    }
  }
}

TEST_CASE("round-trip preserves structure and influences on random networks") {
  RandomStream rng(99);
  for (int rep = 0; rep < 40; ++rep) {
    Network net = testing::random_network(6, rep % 2 == 0, rng);
    Network back = parse_bnet(serialize_bnet(net));
    REQUIRE(back.size() == net.size());
    for (int i = 0; i < net.size(); ++i)
      CHECK(back.local(i).structurally_equal(net.local(i)));
    InfluenceGraph g1 = influence_graph(net);
    InfluenceGraph g2 = influence_graph(back);
    CHECK(g1.positive == g2.positive);
    CHECK(g1.negative == g2.negative);
  }
}

TEST_CASE("configuration parsing") {
  Network a = parse_bnet("x1, 1\nx2, x1\nx3, (!x1 & x2) | x3\n");
  CHECK(parse_configuration("000", a).bits == 0);
  CHECK(parse_configuration("x1=1,x2=1,x3=1", a).bits == 0b111);
  CHECK(parse_configuration("x3=1, x1=0, x2=0", a).bits == 0b100);
  CHECK(parse_configuration("110", a).to_string() == "110");
  CHECK_THROWS_AS(parse_configuration("0101", a), UsageError);
  CHECK_THROWS_AS(parse_configuration("01x", a), UsageError);
  CHECK_THROWS_AS(parse_configuration("x1=1,x2=1", a), UsageError);
  CHECK_THROWS_AS(parse_configuration("x1=1,x9=1,x3=0", a), UsageError);
  CHECK_THROWS_AS(parse_configuration("x1=1,x1=0,x3=1", a), UsageError);
  CHECK_THROWS_AS(parse_configuration("x1=2,x2=0,x3=0", a), UsageError);
}

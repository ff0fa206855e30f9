// Network loading, serialization, structural validation, and the
// stratification helpers.

#include <doctest.h>

#include <cpl/network.hpp>

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "nets.hpp"

using namespace cpl;

namespace {

Rule coin_rule(FPtr guard, long num, long den) {
  return Rule{std::move(guard), make_rat(num, den)};
}

// A two-node cycle; unreachable through load_network, so built by hand.
Network cyclic() {
  Network net;
  net.relations.push_back(
      {"A", 1, {"B"}, {coin_rule(f_atom("B", {"x1"}), 1, 2),
                       coin_rule(f_not(f_atom("B", {"x1"})), 1, 2)}});
  net.relations.push_back(
      {"B", 1, {"A"}, {coin_rule(f_atom("A", {"x1"}), 1, 2),
                       coin_rule(f_not(f_atom("A", {"x1"})), 1, 2)}});
  return net;
}

}  // namespace

TEST_CASE("loading preserves file order and parses guards") {
  auto net = load_network(testnets::kPq);
  REQUIRE(net.relations.size() == 2);
  CHECK(net.relations[0].name == "Q");
  CHECK(net.relations[1].name == "P");

  const auto& q = net.rel("Q");
  CHECK(q.arity == 1);
  CHECK(q.parents == std::vector<std::string>{"P"});
  REQUIRE(q.rules.size() == 2);
  CHECK(formula_equal(q.rules[0].guard, f_atom("P", {"x1"})));
  CHECK(q.rules[0].prob == make_rat(3, 4));
  CHECK(formula_equal(q.rules[1].guard, f_not(f_atom("P", {"x1"}))));
  CHECK(q.rules[1].prob == make_rat(1, 4));

  CHECK(net.has("P"));
  CHECK(!net.has("R"));
  CHECK_THROWS(net.rel("R"));
  CHECK(net.signature() == Signature({{"P", 1}, {"Q", 1}}));
}

TEST_CASE("serialization round-trips and keeps relation order") {
  auto net = load_network(testnets::kPq);
  auto text = network_to_json(net);
  CHECK(text.find("\"Q\"") < text.find("\"P\""));
  auto again = load_network(text);
  CHECK(again.relations[0].name == "Q");
  CHECK(network_to_json(again) == text);
}

TEST_CASE("malformed networks are rejected at load time") {
  // unknown parent
  CHECK_THROWS_AS(load_network(R"json({"relations":[{"name":"Q","arity":1,
      "parents":["Z"],"rules":[{"guard":"true","prob":"1/2"}]}]})json"),
                  std::invalid_argument);
  // duplicate relation name
  CHECK_THROWS_AS(load_network(R"json({"relations":[
      {"name":"P","arity":1,"parents":[],"rules":[{"guard":"true","prob":"1/2"}]},
      {"name":"P","arity":1,"parents":[],"rules":[{"guard":"true","prob":"1/2"}]}]})json"),
                  std::invalid_argument);
  // probability outside [0,1]
  CHECK_THROWS_AS(load_network(R"json({"relations":[{"name":"P","arity":1,
      "parents":[],"rules":[{"guard":"true","prob":"3/2"}]}]})json"),
                  std::invalid_argument);
  // guard mentions a relation that is not a parent
  CHECK_THROWS_AS(load_network(R"json({"relations":[
      {"name":"P","arity":1,"parents":[],"rules":[{"guard":"true","prob":"1/2"}]},
      {"name":"Q","arity":1,"parents":[],"rules":[{"guard":"P(x1)","prob":"1/2"}]}]})json"),
                  std::invalid_argument);
  // guard uses an argument variable beyond the arity
  CHECK_THROWS_AS(load_network(R"json({"relations":[
      {"name":"P","arity":1,"parents":[],"rules":[{"guard":"true","prob":"1/2"}]},
      {"name":"Q","arity":1,"parents":["P"],"rules":[
        {"guard":"P(x2)","prob":"1/2"},{"guard":"~P(x2)","prob":"1/2"}]}]})json"),
                  std::invalid_argument);
  // a parent cycle passes the schema checks; validate() is what reports it
  auto looped = load_network(R"json({"relations":[
      {"name":"A","arity":1,"parents":["B"],"rules":[{"guard":"B(x1)","prob":"1"},
        {"guard":"~B(x1)","prob":"0"}]},
      {"name":"B","arity":1,"parents":["A"],"rules":[{"guard":"A(x1)","prob":"1"},
        {"guard":"~A(x1)","prob":"0"}]}]})json");
  auto loop_report = validate(looped);
  CHECK(!loop_report.ok);
  CHECK(std::any_of(loop_report.violations.begin(), loop_report.violations.end(),
                    [](const Violation& v) { return v.kind == "cycle"; }));
  // arity below one
  CHECK_THROWS_AS(load_network(R"json({"relations":[{"name":"P","arity":0,
      "parents":[],"rules":[{"guard":"true","prob":"1/2"}]}]})json"),
                  std::invalid_argument);
  // not JSON at all
  CHECK_THROWS_AS(load_network("relations: nope"), std::invalid_argument);
}

TEST_CASE("validation accepts the example networks") {
  CHECK(validate(load_network(testnets::kCoin)).ok);
  CHECK(validate(load_network(testnets::kPq)).ok);
  CHECK(validate(load_network(testnets::kGraph)).ok);
  // quantified guards fall back to the finite check
  CHECK(validate(load_network(testnets::kExistsR)).ok);
  CHECK(validate(load_network(testnets::kExistsR), 2).ok);
}

TEST_CASE("validation reports overlapping and gapped rules") {
  Network overlap = load_network(testnets::kCoin);
  overlap.relations[0].rules.push_back(coin_rule(f_top(), 1, 2));
  auto rep = validate(overlap);
  CHECK(!rep.ok);
  REQUIRE(!rep.violations.empty());
  CHECK(rep.violations[0].kind == "overlap");
  CHECK(rep.violations[0].relation == "P");

  Network gap = load_network(testnets::kPq);
  gap.relations[0].rules.pop_back();  // drop the ~P(x1) rule
  auto rep2 = validate(gap);
  CHECK(!rep2.ok);
  REQUIRE(!rep2.violations.empty());
  CHECK(rep2.violations[0].kind == "gap");
  CHECK(rep2.violations[0].relation == "Q");
}

TEST_CASE("validation reports cycles and scope leaks without throwing") {
  auto rep = validate(cyclic());
  CHECK(!rep.ok);
  REQUIRE(!rep.violations.empty());
  CHECK(rep.violations[0].kind == "cycle");

  Network leak = load_network(testnets::kPq);
  // rewrite Q's guards to mention Q itself
  leak.relations[0].rules[0].guard = f_atom("Q", {"x1"});
  leak.relations[0].rules[1].guard = f_not(f_atom("Q", {"x1"}));
  auto rep2 = validate(leak);
  CHECK(!rep2.ok);
  bool has_scope = false;
  for (const auto& v : rep2.violations) has_scope |= v.kind == "scope";
  CHECK(has_scope);
}

TEST_CASE("ranks order parents strictly above children") {
  auto net = load_network(testnets::kExistsR);
  CHECK(mp_rank(net, "R") == 1);
  CHECK(mp_rank(net, "Q") == 0);

  auto pq = load_network(testnets::kPq);
  CHECK(mp_rank(pq, "P") == 1);
  CHECK(mp_rank(pq, "Q") == 0);
  CHECK(mp_rank(load_network(testnets::kCoin), "P") == 0);
}

TEST_CASE("strata grow from ancestors to the full signature") {
  auto net = load_network(testnets::kExistsR);
  auto ss = strata(net);
  REQUIRE(ss.size() == 2);
  CHECK(ss[0] == Signature({{"R", 2}}));
  CHECK(ss[1] == Signature({{"Q", 1}, {"R", 2}}));

  // a three-level chain has three strata
  auto chain = load_network(R"json({"relations":[
    {"name":"A","arity":1,"parents":[],"rules":[{"guard":"true","prob":"1/2"}]},
    {"name":"B","arity":1,"parents":["A"],"rules":[
      {"guard":"A(x1)","prob":"1"},{"guard":"~A(x1)","prob":"0"}]},
    {"name":"C","arity":1,"parents":["B"],"rules":[
      {"guard":"B(x1)","prob":"1"},{"guard":"~B(x1)","prob":"0"}]}]})json");
  auto cs = strata(chain);
  REQUIRE(cs.size() == 3);
  CHECK(cs[0].relations.size() == 1);
  CHECK(cs[0].find("A") == 0);
  CHECK(cs[1].relations.size() == 2);
  CHECK(cs[2] == chain.signature());

  // a single flat stratum when nothing has parents
  CHECK(strata(load_network(testnets::kGraph)).size() == 1);
}

TEST_CASE("parent closure and subnetworks") {
  auto net = load_network(testnets::kExistsR);
  auto closure = parent_closure(net, {"Q"});
  CHECK(closure == std::vector<std::string>({"R", "Q"}));
  CHECK(parent_closure(net, {"R"}) == std::vector<std::string>{"R"});

  auto sub = subnetwork(net, closure);
  CHECK(sub.relations.size() == 2);
  auto base = subnetwork(net, {"R"});
  REQUIRE(base.relations.size() == 1);
  CHECK(base.relations[0].name == "R");

  CHECK_THROWS(subnetwork(net, {"Q"}));       // not parent-closed
  CHECK_THROWS(subnetwork(net, {"Z"}));       // unknown name
  CHECK_THROWS(parent_closure(net, {"Z"}));
}

// The induced world distribution: exact factorized probabilities, brute-force
// enumeration, and the deterministic sampler.

#include <doctest.h>

#include <cpl/worlds.hpp>

#include <cmath>
#include <stdexcept>

#include "nets.hpp"

using namespace cpl;
using testnets::sig_graph;
using testnets::sig_p;
using testnets::sig_pq;

namespace {

Structure world_pq(bool p1, bool q1) {
  Structure A;
  A.n = 1;
  if (p1) A.interp["P"].insert({1});
  if (q1) A.interp["Q"].insert({1});
  return A;
}

}  // namespace

TEST_CASE("world probabilities multiply the per-tuple rule factors") {
  auto pq = load_network(testnets::kPq);
  CHECK(world_probability(pq, world_pq(true, true)) == make_rat(3, 8));
  CHECK(world_probability(pq, world_pq(true, false)) == make_rat(1, 8));
  CHECK(world_probability(pq, world_pq(false, true)) == make_rat(1, 8));
  CHECK(world_probability(pq, world_pq(false, false)) == make_rat(3, 8));

  // two independent fair coins: every world weighs the same
  auto coin = load_network(testnets::kCoin);
  Structure A;
  A.n = 2;
  CHECK(world_probability(coin, A) == make_rat(1, 4));
  A.interp["P"] = {{1}, {2}};
  CHECK(world_probability(coin, A) == make_rat(1, 4));

  // a sure fact missing from the world kills the whole product
  auto sure = load_network(testnets::kSure);
  Structure empty1;
  empty1.n = 1;
  CHECK(world_probability(sure, empty1) == 0);
}

TEST_CASE("exact probabilities by full enumeration") {
  auto coin = load_network(testnets::kCoin);
  CHECK(exact_probability(coin, 2, parse("exists x : P(x)", sig_p())) == make_rat(3, 4));

  auto pq = load_network(testnets::kPq);
  CHECK(exact_probability(pq, 1, parse("Q(x)", sig_pq()), {{"x", 1}}) == make_rat(1, 2));

  auto graph = load_network(testnets::kGraph);
  auto asym = parse("exists x : exists y : (x!=y & R(x,y) & ~R(y,x))", sig_graph());
  CHECK(exact_probability(graph, 3, asym) == make_rat(7, 8));

  // the whole space always sums to one
  CHECK(exact_probability(pq, 2, f_top()) == 1);
}

TEST_CASE("exact probabilities are complementary and label-invariant") {
  auto pq = load_network(testnets::kPq);
  auto f = parse("exists x : Q(x)", sig_pq());
  CHECK(exact_probability(pq, 2, f) + exact_probability(pq, 2, f_not(f)) == 1);

  // only the identity pattern of the assigned tuple matters
  auto graph = load_network(testnets::kGraph);
  auto edge = parse("R(x,y)", sig_graph());
  auto p12 = exact_probability(graph, 3, edge, {{"x", 1}, {"y", 2}});
  auto p31 = exact_probability(graph, 3, edge, {{"x", 3}, {"y", 1}});
  CHECK(p12 == p31);
  CHECK(p12 == make_rat(1, 2));
  CHECK(exact_probability(graph, 3, edge, {{"x", 2}, {"y", 2}}) == make_rat(1, 2));
}

TEST_CASE("enumeration respects the atom cap and the thread count") {
  auto graph = load_network(testnets::kGraph);
  auto f = parse("exists x : R(x,x)", sig_graph());
  // n=3 means 9 atoms; a cap of 8 bits refuses, 9 suffices
  CHECK_THROWS_AS(exact_probability(graph, 3, f, {}, 8), std::domain_error);
  auto serial = exact_probability(graph, 3, f, {}, 9);
  CHECK(serial == make_rat(7, 8));
  CHECK(exact_probability(graph, 3, f, {}, 24, 4) == serial);

  CHECK_THROWS_AS(exact_probability(graph, 2, parse("R(x,y)", sig_graph())),
                  std::invalid_argument);  // x, y unassigned
}

TEST_CASE("sampling is a pure function of the seed") {
  auto graph = load_network(testnets::kGraph);
  auto a = sample_world(graph, 5, 42);
  auto b = sample_world(graph, 5, 42);
  CHECK(a.n == 5);
  CHECK(structure_to_json(a) == structure_to_json(b));

  // nearby seeds decorrelate (25 fair atoms agree with chance ~2^-25)
  auto c = sample_world(graph, 5, 43);
  CHECK(structure_to_json(a) != structure_to_json(c));
}

TEST_CASE("sampled frequencies track the rule probabilities") {
  auto coin = load_network(testnets::kCoin);
  auto w = sample_world(coin, 10000, 20260814);
  double fp = static_cast<double>(w.interp["P"].size()) / 10000.0;
  CHECK(std::fabs(fp - 0.5) < 0.02);

  auto pq = load_network(testnets::kPq);
  auto v = sample_world(pq, 10000, 7);
  int p_count = 0, pq_count = 0;
  for (const auto& t : v.interp["P"]) {
    ++p_count;
    if (v.holds("Q", t)) ++pq_count;
  }
  REQUIRE(p_count > 0);
  CHECK(std::fabs(static_cast<double>(pq_count) / p_count - 0.75) < 0.03);
}

TEST_CASE("estimates converge with honest confidence intervals") {
  auto coin = load_network(testnets::kCoin);
  auto f = parse("exists x : P(x)", sig_p());
  auto est = estimate_probability(coin, 2, f, {}, 100000, 11);
  CHECK(std::fabs(est.estimate - 0.75) < 0.01);
  double hw = 1.96 * std::sqrt(est.estimate * (1.0 - est.estimate) / 100000.0);
  CHECK(est.half_width_95 == doctest::Approx(hw));

  auto top = estimate_probability(coin, 2, f_top(), {}, 50, 1);
  CHECK(top.estimate == 1.0);
  CHECK(top.half_width_95 == 0.0);

  auto never = parse("x!=x", sig_p());
  CHECK(estimate_probability(coin, 2, never, {{"x", 1}}, 50, 1).estimate == 0.0);

  // replay: the same invocation gives bit-identical results
  auto again = estimate_probability(coin, 2, f, {}, 1000, 11);
  auto again2 = estimate_probability(coin, 2, f, {}, 1000, 11);
  CHECK(again.estimate == again2.estimate);
}

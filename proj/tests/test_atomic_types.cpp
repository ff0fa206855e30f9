// Complete atomic types: canonical enumeration, dimension and restriction,
// and the agreement between type satisfaction and truth evaluation.

#include <doctest.h>

#include <cpl/atomic_types.hpp>
#include <cpl/evaluator.hpp>

#include <stdexcept>
#include <vector>

#include "nets.hpp"

using namespace cpl;
using testnets::sig_graph;

namespace {

// A smallest structure realizing the type: one element per class, relation
// tuples copied from the literals, each variable sent to its class.
Structure realize(const AtomicType& t, Assignment& asg) {
  Structure A;
  A.n = t.classes();
  for (const auto& rel : t.sig.relations) {
    auto& rset = A.interp[rel.name];
    std::vector<int> tup(rel.arity, 0);
    while (true) {
      if (type_literal(t, rel.name, tup)) {
        std::vector<int> elems;
        for (int c : tup) elems.push_back(c + 1);
        rset.insert(elems);
      }
      int i = rel.arity - 1;
      while (i >= 0 && tup[i] == A.n - 1) tup[i--] = 0;
      if (i < 0) break;
      ++tup[i];
    }
  }
  for (std::size_t i = 0; i < t.vars.size(); ++i) asg[t.vars[i]] = t.cls[i] + 1;
  return A;
}

}  // namespace

TEST_CASE("type counts over small signatures") {
  CHECK(enumerate_types(sig_graph(), {"x"}).size() == 2);
  CHECK(enumerate_types(sig_graph(), {"x", "y"}).size() == 18);
  CHECK(enumerate_types(Signature{}, {"x", "y"}).size() == 2);
}

TEST_CASE("enumeration order: partitions first, then literal masks ascending") {
  auto ts = enumerate_types(sig_graph(), {"x", "y"});
  REQUIRE(ts.size() == 18);
  CHECK(render(type_formula(ts[0])) == "x=y & ~R(x,x)");
  CHECK(render(type_formula(ts[1])) == "x=y & R(x,x)");
  CHECK(render(type_formula(ts[2])) ==
        "x!=y & ~R(x,x) & ~R(x,y) & ~R(y,x) & ~R(y,y)");
  CHECK(render(type_formula(ts.back())) ==
        "x!=y & R(x,x) & R(x,y) & R(y,x) & R(y,y)");
}

TEST_CASE("a type with no literals at all renders as true") {
  auto ts = enumerate_types(Signature{}, {"x"});
  REQUIRE(ts.size() == 1);
  CHECK(formula_equal(type_formula(ts[0]), f_top()));
}

TEST_CASE("dimension counts classes private to the extension variables") {
  auto ts = enumerate_types(sig_graph(), {"x", "y"});
  const auto& glued = ts[0];     // x = y
  const auto& split = ts[2];     // x != y
  CHECK(dimension(split, {"y"}) == 1);
  CHECK(dimension(glued, {"y"}) == 0);
  CHECK(dimension(split, {"x", "y"}) == 2);
  CHECK(dimension(glued, {"x", "y"}) == 1);
  CHECK(dimension(split, {}) == 0);
}

TEST_CASE("restriction drops variables and renumbers classes") {
  auto ts = enumerate_types(sig_graph(), {"x", "y"});
  // distinct pair with only R(y,x) true: atom order R(x,x),R(x,y),R(y,x),R(y,y)
  const auto& p = ts[2 + 4];
  REQUIRE(type_literal(p, "R", {1, 0}));
  REQUIRE(!type_literal(p, "R", {0, 1}));

  AtomicType q = restrict_type(p, sig_graph(), {"y"});
  CHECK(q.vars == std::vector<std::string>{"y"});
  CHECK(q.cls == std::vector<int>{0});
  CHECK(q.lits == std::vector<bool>{false});  // R(y,y) is false in p

  // dropping the signature keeps just the identity pattern
  AtomicType id = restrict_type(p, Signature{}, {"x", "y"});
  CHECK(id.cls == std::vector<int>({0, 1}));
  CHECK(id.lits.empty());

  // restricting in two steps equals restricting once
  auto triple = enumerate_types(sig_graph(), {"x", "y", "z"});
  const auto& t3 = triple[triple.size() / 2];
  auto one_step = restrict_type(t3, sig_graph(), {"x"});
  auto two_step =
      restrict_type(restrict_type(t3, sig_graph(), {"x", "y"}), sig_graph(), {"x"});
  CHECK(same_type(one_step, two_step));
}

TEST_CASE("type satisfaction matches evaluation on a realizing structure") {
  auto ts = enumerate_types(sig_graph(), {"x", "y"});
  std::vector<FPtr> fs = {
      parse("R(x,y)", sig_graph()),
      parse("x=y & ~R(x,x)", sig_graph()),
      parse("R(x,y) | R(y,x)", sig_graph()),
      parse("R(x,x) -> R(y,y)", sig_graph()),
      parse("x!=y <-> R(x,y)", sig_graph()),
  };
  for (const auto& t : ts) {
    Assignment asg;
    Structure A = realize(t, asg);
    CHECK(evaluate(A, type_formula(t), asg));
    for (const auto& f : fs) {
      CAPTURE(render(type_formula(t)));
      CAPTURE(render(f));
      CHECK(type_satisfies(t, f) == evaluate(A, f, asg));
    }
  }
}

TEST_CASE("types are exhaustive and exclusive on every structure") {
  auto ts = enumerate_types(sig_graph(), {"x", "y"});
  for (int mask = 0; mask < 16; ++mask) {
    Structure A;
    A.n = 2;
    auto& rset = A.interp["R"];
    int bit = 0;
    for (int a = 1; a <= 2; ++a)
      for (int b = 1; b <= 2; ++b, ++bit)
        if (mask & (1 << bit)) rset.insert({a, b});
    for (int a = 1; a <= 2; ++a)
      for (int b = 1; b <= 2; ++b) {
        int hits = 0;
        for (const auto& t : ts)
          hits += evaluate(A, type_formula(t), {{"x", a}, {"y", b}});
        CHECK(hits == 1);
      }
  }
}

TEST_CASE("satisfaction through an explicit environment") {
  auto ts = enumerate_types(sig_graph(), {"x", "y"});
  const auto& t = ts[2 + 2];  // distinct, only R(x,y)
  // guard-style formula over x1,x2 mapped onto the type's classes
  auto g = f_atom("R", {"x1", "x2"});
  CHECK(type_satisfies_env(t, g, {{"x1", 0}, {"x2", 1}}));
  CHECK(!type_satisfies_env(t, g, {{"x1", 1}, {"x2", 0}}));
  CHECK_THROWS_AS(type_satisfies_env(t, g, {{"x1", 0}}), std::invalid_argument);
  CHECK_THROWS_AS(type_satisfies(t, parse("exists z : R(x,z)", sig_graph())),
                  std::logic_error);
}

TEST_CASE("type disjunctions select the satisfying types in enumeration order") {
  auto edge = parse("R(x,y)", sig_graph());
  auto sel = type_disjunction(edge, sig_graph(), {"x", "y"});
  CHECK(sel.size() == 9);  // 1 reflexive glued type + 8 distinct ones
  for (const auto& t : sel) CHECK(type_satisfies(t, edge));

  auto rest = type_disjunction(f_not(edge), sig_graph(), {"x", "y"});
  CHECK(sel.size() + rest.size() == 18);

  CHECK(type_disjunction(parse("x=y", sig_graph()), sig_graph(), {"x", "y"}).size() == 2);
  CHECK(type_disjunction(f_top(), sig_graph(), {"x", "y"}).size() == 18);
  CHECK(type_disjunction(f_not(f_top()), sig_graph(), {"x", "y"}).empty());
}

TEST_CASE("type keys identify types up to variable names") {
  auto a = enumerate_types(sig_graph(), {"x", "y"});
  auto b = enumerate_types(sig_graph(), {"u", "v"});
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(type_key(a[i]) == type_key(b[i]));
    CHECK(same_type(a[i], b[i]));
  }
  CHECK(type_key(a[3]) != type_key(a[4]));
}

TEST_CASE("enumeration rejects bad tuples and guards against explosion") {
  CHECK_THROWS(enumerate_types(sig_graph(), {}));
  CHECK_THROWS(enumerate_types(sig_graph(), {"x", "x"}));
  CHECK_THROWS_AS(enumerate_types(sig_graph(), {"v1", "v2", "v3", "v4", "v5"}),
                  std::domain_error);
}

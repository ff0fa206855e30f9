// Parser, renderer, and the formula measures.  The surface reductions
// (forall, !=, comparison sugar) are pinned here, as is the canonical text
// the renderer produces.

#include <doctest.h>

#include <cpl/formula.hpp>

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "nets.hpp"

using namespace cpl;
using testnets::sig_p;
using testnets::sig_pr;

namespace {
const char* kFriendship =
    "[ || [ ||M(y) : F(x,y)||{y} >= 1/3 ] -> M(x) : x=x ||{x} >= 1/2 ]";
Signature sig_mf() { return Signature({{"M", 1}, {"F", 2}}); }
}  // namespace

TEST_CASE("parse builds the expected tree for a simple existential") {
  auto f = parse("exists y : P(y)", sig_p());
  REQUIRE(f->kind == Kind::Exists);
  CHECK(f->vars == std::vector<std::string>{"y"});
  CHECK(f->a->kind == Kind::Atom);
  CHECK(formula_equal(f, f_exists({"y"}, f_atom("P", {"y"}))));
}

TEST_CASE("connectives bind tighter left to right: ~ & | -> <->") {
  auto f = parse("~P(x) & P(y) | P(z) -> P(x) <-> true", sig_p());
  REQUIRE(f->kind == Kind::Iff);
  REQUIRE(f->a->kind == Kind::Implies);
  REQUIRE(f->a->a->kind == Kind::Or);
  REQUIRE(f->a->a->a->kind == Kind::And);
  CHECK(f->a->a->a->a->kind == Kind::Not);
  CHECK(f->b->kind == Kind::Top);

  auto imp = parse("P(x) -> P(y) -> P(z)", sig_p());  // right-associative
  REQUIRE(imp->kind == Kind::Implies);
  CHECK(imp->a->kind == Kind::Atom);
  CHECK(imp->b->kind == Kind::Implies);

  auto iff = parse("P(x) <-> P(y) <-> P(z)", sig_p());  // left-associative
  REQUIRE(iff->kind == Kind::Iff);
  CHECK(iff->a->kind == Kind::Iff);
}

TEST_CASE("forall and != are rewritten away at parse time") {
  CHECK(formula_equal(parse("forall y : P(y)", sig_p()),
                      f_not(f_exists({"y"}, f_not(f_atom("P", {"y"}))))));
  CHECK(formula_equal(parse("x != y", sig_p()), f_not(f_equal("x", "y"))));
  // and the renderer folds both back
  CHECK(render(f_not(f_equal("x", "y"))) == "x!=y");
}

TEST_CASE("comparison sugar expands to a zero right-hand ratio") {
  auto f = parse("[ ||P(y) : y=y||{y} >= 1/3 ]", sig_p());
  REQUIRE(f->kind == Kind::Compare);
  CHECK(f->r == make_rat(1, 3));
  CHECK(f->r_side == RSide::Right);
  CHECK(f->vars == std::vector<std::string>{"y"});
  CHECK(formula_equal(f->num1, f_atom("P", {"y"})));
  CHECK(formula_equal(f->den1, f_equal("y", "y")));
  CHECK(formula_equal(f->num2, f_not(f_equal("y", "y"))));
  CHECK(formula_equal(f->den2, f_equal("y", "y")));
}

TEST_CASE("two-ratio comparisons keep the margin on the stated side") {
  auto left = parse("[ 1/4 + ||P(y) : y=y||{y} >= ||~P(y) : y=y||{y} ]", sig_p());
  REQUIRE(left->kind == Kind::Compare);
  CHECK(left->r_side == RSide::Left);
  CHECK(left->r == make_rat(1, 4));
  CHECK(formula_equal(left->num2, f_not(f_atom("P", {"y"}))));

  auto right = parse("[ ||P(y) : y=y||{y} >= ||~P(y) : y=y||{y} + 0.25 ]", sig_p());
  REQUIRE(right->kind == Kind::Compare);
  CHECK(right->r_side == RSide::Right);
  CHECK(right->r == make_rat(1, 4));  // decimal literal converts exactly
}

TEST_CASE("nested comparisons parse: the friendship sentence") {
  auto f = parse(kFriendship, sig_mf());
  REQUIRE(f->kind == Kind::Compare);
  CHECK(f->r == make_rat(1, 2));
  CHECK(f->vars == std::vector<std::string>{"x"});
  REQUIRE(f->num1->kind == Kind::Implies);
  REQUIRE(f->num1->a->kind == Kind::Compare);
  CHECK(f->num1->a->r == make_rat(1, 3));
  CHECK(free_vars(f).empty());
}

TEST_CASE("render produces the canonical text") {
  CHECK(render(f_atom("P", {"x"})) == "P(x)");
  CHECK(render(f_exists({"y"}, f_equal("x", "y"))) == "exists y : x=y");
  CHECK(render(f_not(f_top())) == "~true");
  CHECK(render(parse("[ ||P(y) : y=y||{y} >= 1/3 ]", sig_p())) ==
        "[ ||P(y) : y=y||{y} >= 1/3 ]");
  // parentheses appear exactly where binding requires them
  CHECK(render(parse("~(P(x) | P(y))", sig_p())) == "~(P(x) | P(y))");
  CHECK(render(parse("(P(x) | P(y)) & P(z)", sig_p())) == "(P(x) | P(y)) & P(z)");
  CHECK(render(parse("P(x) | P(y) & P(z)", sig_p())) == "P(x) | P(y) & P(z)");
}

TEST_CASE("parse after render is the identity") {
  const char* samples[] = {
      "P(x)",
      "x=y",
      "x!=y",
      "~true",
      "exists y : P(y)",
      "~exists x, y : x!=y & R(x,y)",
      "P(x) & P(y) | R(x,y) -> P(x) <-> true",
      "forall x : exists y : R(x,y)",
      "[ ||R(x,y) : y=y||{y} >= 2/5 ]",
      "[ 1/4 + ||P(y) : y=y||{y} >= ||~P(y) : R(y,y)||{y} ]",
  };
  for (const char* s : samples) {
    CAPTURE(s);
    auto f = parse(s, sig_pr());
    CHECK(formula_equal(parse(render(f), sig_pr()), f));
  }
}

TEST_CASE("quantifier rank counts binder nesting") {
  CHECK(quantifier_rank(f_atom("P", {"x"})) == 0);
  CHECK(quantifier_rank(f_not(f_atom("P", {"x"}))) == 0);
  CHECK(quantifier_rank(parse("exists x : exists y : R(x,y)", sig_pr())) == 2);
  CHECK(quantifier_rank(parse("exists x, y : R(x,y)", sig_pr())) == 2);
  // a comparison adds its bound tuple on top of the deepest subformula
  CHECK(quantifier_rank(parse("[ ||R(y1,y2) : y1=y1||{y1,y2} >= 1/2 ]", sig_pr())) == 2);
  CHECK(quantifier_rank(parse("exists x : [ ||R(x,y) : y=y||{y} >= 1/2 ]", sig_pr())) == 2);
  CHECK(quantifier_rank(parse(kFriendship, sig_mf())) == 2);
}

TEST_CASE("free variables are sorted and respect binders") {
  CHECK(free_vars(parse("R(x,y)", sig_pr())) == std::vector<std::string>({"x", "y"}));
  CHECK(free_vars(parse("R(y,x)", sig_pr())) == std::vector<std::string>({"x", "y"}));
  CHECK(free_vars(parse("exists y : R(x,y)", sig_pr())) == std::vector<std::string>({"x"}));
  CHECK(free_vars(parse("[ ||R(x,y) : y=y||{y} >= 1/3 ]", sig_pr())) ==
        std::vector<std::string>({"x"}));
  CHECK(free_vars(f_top()).empty());
  CHECK(free_vars(parse("exists x : P(x)", sig_p())).empty());
}

TEST_CASE("threshold constants collect every margin, including nested ones") {
  CHECK(threshold_constants(parse("exists x : P(x)", sig_p())).empty());
  CHECK(threshold_constants(parse("[ ||P(y) : y=y||{y} >= 1/3 ]", sig_p())) ==
        std::set<Rat>{make_rat(1, 3)});
  CHECK(threshold_constants(parse(kFriendship, sig_mf())) ==
        std::set<Rat>({make_rat(1, 3), make_rat(1, 2)}));
}

TEST_CASE("quantifier-freeness excludes comparisons too") {
  CHECK(is_quantifier_free(parse("P(x) & x!=y", sig_p())));
  CHECK(!is_quantifier_free(parse("exists x : P(x)", sig_p())));
  CHECK(!is_quantifier_free(parse("[ ||P(y) : y=y||{y} >= 1/3 ]", sig_p())));
}

TEST_CASE("formula length counts tokens of the canonical text") {
  CHECK(formula_length(parse("P(x)", sig_p())) == 4);
  CHECK(formula_length(parse("exists y : P(y)", sig_p())) == 7);
  // [ || P ( y ) : y = y || { y } >= 1 / 3 ]
  CHECK(formula_length(parse("[ ||P(y) : y=y||{y} >= 1/3 ]", sig_p())) == 19);
}

TEST_CASE("empty chain builders have the right units") {
  CHECK(formula_equal(f_or_all({}), f_not(f_top())));
  CHECK(formula_equal(f_and_all({}), f_top()));
  auto chain = f_or_all({f_atom("P", {"x"}), f_atom("P", {"y"}), f_atom("P", {"z"})});
  CHECK(render(chain) == "P(x) | P(y) | P(z)");
}

TEST_CASE("malformed input is rejected with a position") {
  CHECK_THROWS_AS(parse("Q(x)", sig_p()), std::invalid_argument);    // unknown relation
  CHECK_THROWS_AS(parse("P(x,y)", sig_p()), std::invalid_argument);  // arity mismatch
  CHECK_THROWS_AS(parse("exists y, y : P(y)", sig_p()), std::invalid_argument);
  CHECK_THROWS_AS(parse("[ ||P(y) : y=y||{y} >= -1/3 ]", sig_p()), std::invalid_argument);
  CHECK_THROWS_AS(parse("P(x", sig_p()), std::invalid_argument);
  CHECK_THROWS_AS(parse("", sig_p()), std::invalid_argument);
  try {
    parse("P(x) &", sig_p());
    FAIL("expected a parse error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("position") != std::string::npos);
  }
}

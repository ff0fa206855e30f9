// Formula ASTs for first-order logic extended with proportion comparisons.
//
// Design notes
// ------------
//  * Nodes are immutable and shared (shared_ptr<const Formula>); builders are
//    the only way to make them.  Structural equality is by shape, not pointer.
//  * The comparison node is a single normal form covering both placements of
//    the margin term r:
//        Left :  r + ||num1 : den1||{bound}  >=  ||num2 : den2||{bound}
//        Right:       ||num1 : den1||{bound} >=  ||num2 : den2||{bound} + r
//    The surface form "[ ||f : g||{ys} >= r ]" is sugar for a Right node whose
//    second ratio is degenerate: ||y1!=y1 : y1=y1||{ys} with y1 the first
//    bound variable, i.e. the constant 0.
//  * "x != y" is sugar for ~(x = y); there is no distinct node and the
//    renderer folds ~(x = y) back to the surface form.
//  * "forall ys : f" is sugar for ~exists ys : ~f.
//  * ~true is the canonical contradiction; there is no bottom node.
//
// Grammar accepted by parse() (binding looseness: <-> , -> , | , & , ~/exists):
//    formula := iff
//    iff     := imp ("<->" imp)*                 (left assoc)
//    imp     := or ("->" imp)?                   (right assoc)
//    or      := and ("|" and)*
//    and     := unary ("&" unary)*
//    unary   := "~" unary
//             | ("exists"|"forall") var ("," var)* ":" unary
//             | primary
//    primary := ident "(" var ("," var)* ")" | var "=" var | var "!=" var
//             | "true" | "(" formula ")" | compare
//    compare := "[" rat "+" ratio ">=" ratio "]"
//             | "[" ratio ">=" ratio "+" rat "]"
//             | "[" ratio ">=" rat "]"
//    ratio   := "||" formula ":" formula "||" "{" var ("," var)* "}"
//    rat     := integer | integer "/" integer | decimal

#pragma once

#include <cpl/rational.hpp>

#include <memory>
#include <set>
#include <string>
#include <vector>

namespace cpl {

// ── Signature ───────────────────────────────────────────────────────────────

struct RelSym {
  std::string name;
  int arity = 1;
  friend bool operator==(const RelSym&, const RelSym&) = default;
};

// Relation symbols, kept sorted by name; names unique, arities >= 1.
struct Signature {
  std::vector<RelSym> relations;

  Signature() = default;
  explicit Signature(std::vector<RelSym> rels);

  // Index into relations, or -1.
  int find(const std::string& name) const;
  int arity(const std::string& name) const;  // throws if unknown
  bool contains_all(const Signature& sub) const;
  friend bool operator==(const Signature&, const Signature&) = default;
};

// ── AST ─────────────────────────────────────────────────────────────────────

enum class Kind { Top, Atom, Equal, Not, And, Or, Implies, Iff, Exists, Compare };

// Which side of >= the margin r sits on.
enum class RSide { Left, Right };

struct Formula;
using FPtr = std::shared_ptr<const Formula>;

struct Formula {
  Kind kind;

  std::string rel;                // Atom: relation name
  std::vector<std::string> vars;  // Atom args; Equal {a,b}; Exists/Compare bound vars

  FPtr a, b;  // Not/Exists use a; And/Or/Implies/Iff use a,b

  // Compare payload.
  Rat r;
  RSide r_side = RSide::Right;
  FPtr num1, den1, num2, den2;
};

FPtr f_top();
FPtr f_atom(std::string rel, std::vector<std::string> args);
FPtr f_equal(std::string a, std::string b);
FPtr f_not(FPtr f);
FPtr f_and(FPtr a, FPtr b);
FPtr f_or(FPtr a, FPtr b);
FPtr f_implies(FPtr a, FPtr b);
FPtr f_iff(FPtr a, FPtr b);
FPtr f_exists(std::vector<std::string> vars, FPtr body);
FPtr f_compare(Rat r, RSide side, FPtr num1, FPtr den1, FPtr num2, FPtr den2,
               std::vector<std::string> bound);

// Left-assoc chains over a disjunct/conjunct list; empty disjunction is
// ~true, empty conjunction is true.
FPtr f_or_all(const std::vector<FPtr>& fs);
FPtr f_and_all(const std::vector<FPtr>& fs);

// ── Operations ──────────────────────────────────────────────────────────────

// Structural equality (rationals compared exactly).
bool formula_equal(const FPtr& a, const FPtr& b);

// Parses against sig (relation names/arities checked).  Throws
// std::invalid_argument with position info on lex/parse errors and on
// semantic ones: unknown relation, arity mismatch, negative margin r,
// repeated bound variable.
FPtr parse(const std::string& text, const Signature& sig);

// Canonical text.  parse(render(f)) == f for every valid f.
std::string render(const FPtr& f);

// Nesting depth of binders; a comparison adds |bound| on top of the deepest
// of its four subformulas.
int quantifier_rank(const FPtr& f);

// Free variables, sorted lexicographically.
std::vector<std::string> free_vars(const FPtr& f);

// Margin constants r of every comparison node, including nested ones.
std::set<Rat> threshold_constants(const FPtr& f);

bool is_quantifier_free(const FPtr& f);

// Length of the canonical text as a token count (symbols, not bytes).
std::size_t formula_length(const FPtr& f);

}  // namespace cpl

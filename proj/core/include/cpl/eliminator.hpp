// Almost-sure quantifier elimination.
//
// Over a network with noncritical quantifier-free guards, every formula
// within the variable budget is asymptotically equivalent to a disjunction of
// complete atomic types over its free variables.  The rewrite walks the AST
// bottom-up:
//
//  * exists y — group the satisfying types over (xs, y) by their restriction
//    to xs, drop measure-zero groups and members; a group survives iff some
//    extension keeps positive conditional mass (dimension 0 or 1 both get
//    realized eventually, so survival is all that matters);
//  * comparison — for each base type over xs, the two proportions concentrate
//    on ratios gamma of maximal-dimension conditional masses; bases where the
//    margin inequality holds on the limits form the output disjunction.
//    A base whose conditioning set dies on either side is excluded: an empty
//    denominator makes the comparison false.
//
// The entry point canonicalizes the result as a disjunction of complete types
// over the input's free variables (true/~true for sentences), in type
// enumeration order.
//
// Eliminator also performs the network transform: guards with quantifiers are
// eliminated bottom-up along the strata, each against the sub-network induced
// by the parent-closure of its relation's parents (whose guards are already
// quantifier-free at that point).  Guards equivalent to the full type space
// collapse to true, empty ones to ~true, and untouched quantifier-free guards
// are copied verbatim.
//
// Cost tallies count deterministic events, not wall time: arith = mass/ratio
// arithmetic, num_cmp = rational comparisons, lit_cmp = type-literal lookups.

#pragma once

#include <cpl/asymptotics.hpp>

#include <optional>
#include <string>
#include <vector>

namespace cpl {

struct CostTally {
  unsigned long long arith = 0;
  unsigned long long num_cmp = 0;
  unsigned long long lit_cmp = 0;
};

// Per-comparison record: surviving base types on each side with their limit
// ratios, the retained bases, and the work done.
struct ComparisonAnalysis {
  std::vector<AtomicType> bases;       // survivors of the left conditioning set
  std::vector<Rat> gamma;              // aligned with bases
  std::vector<AtomicType> bases_star;  // survivors of the right conditioning set
  std::vector<Rat> gamma_star;         // aligned with bases_star
  std::vector<std::size_t> retained;   // indices into bases kept in the output
  CostTally tally;
};

CostTally cost_report(const ComparisonAnalysis& analysis);

class Eliminator {
 public:
  // Builds the quantifier-free transform of net and its type-mass table.
  // Throws std::domain_error if a guard is critical or exceeds the budget k.
  explicit Eliminator(Network net, int k = 4);

  const Network& original() const { return net_; }
  const Network& transformed() const { return qfnet_; }
  const TypeProbTable& table() const { return *table_; }
  int k() const { return k_; }

  // Full rewrite + canonicalization.  Preconditions (std::domain_error):
  // |free_vars(f)| + quantifier_rank(f) <= k, and f noncritical.
  FPtr eliminate(const FPtr& f);

  // One existential step: body must be quantifier-free with free variables
  // inside xs + {y}.  Returns the canonical disjunction over xs (~true when
  // nothing survives, true/~true when xs is empty).
  FPtr eliminate_existential(const FPtr& body, const std::string& y,
                             const std::vector<std::string>& xs);

  // One comparison step: comp must be a Compare node with quantifier-free
  // subformulas.  analysis (optional) receives the survivor/ratio record.
  FPtr eliminate_comparison(const FPtr& comp, const std::vector<std::string>& xs,
                            ComparisonAnalysis* analysis = nullptr);

  // Limit probability that f holds on a tuple with the given equality
  // pattern: the mass of the matching disjuncts of eliminate(f).
  // Pattern syntax: "distinct" or comma-separated equalities "x=y,y=z".
  // Sentences ignore the pattern and yield 0 or 1.
  Rat limit_probability(const FPtr& f, const std::string& pattern = "distinct");

  const CostTally& cost() const { return cost_; }
  void reset_cost() { cost_ = {}; }

 private:
  Network net_;
  int k_;
  Network qfnet_;
  std::optional<TypeProbTable> table_;
  CostTally cost_;

  FPtr rewrite(const FPtr& f);
  FPtr canonical(const FPtr& qf, const std::vector<std::string>& fv);
};

// The asymptotically equivalent network with quantifier-free guards
// (fixpoint for networks that are already quantifier-free).
Network quantifier_free_network(const Network& net, int k = 4);

// Network-level conveniences; they build the transform internally.
CriticalSet critical_numbers(const Network& net, int m, int m_bound = 4, int k = 4);
NoncriticalReport is_noncritical(const Network& net, const FPtr& f, int k = 4);
std::optional<Rat> epsilon_margin(const Network& net, const FPtr& f, int k = 4);

}  // namespace cpl

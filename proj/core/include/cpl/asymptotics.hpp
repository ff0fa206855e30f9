// Asymptotic type masses and the critical-number machinery.
//
// For a network whose guards are quantifier-free, the limit probability that
// a fixed tuple realizes a complete atomic type factorizes exactly like a
// finite world does: one factor per relation and class tuple, picked by the
// unique rule whose guard the type itself satisfies.  TypeProbTable caches
// those masses.  On top of the masses sit:
//
//  * critical_numbers — every ratio a/(a+c) of disjoint subset sums of
//    positive conditional extension masses over splits with at most m
//    variables, plus all fractions with denominator up to the number of
//    zero-dimension (type, restriction) pairs, plus 0 and 1;
//  * is_noncritical — a formula's margins must avoid all differences of two
//    critical numbers at level l = |free variables| + quantifier rank;
//  * epsilon_margin — the slack with which strict critical comparisons
//    survive a (1+2*eps)^2 perturbation on both sides.
//
// Formulas without comparisons short-circuit: nothing can be critical and the
// margin is unbounded.

#pragma once

#include <cpl/atomic_types.hpp>
#include <cpl/network.hpp>

#include <map>
#include <optional>
#include <vector>

namespace cpl {

struct TypeProbTable {
  Network net;

  // Throws std::invalid_argument unless every guard is quantifier-free.
  explicit TypeProbTable(Network qf_net);

  mutable std::map<std::string, Rat> memo;
};

// Limit probability that a fixed tuple matching p's identity pattern
// realizes p.  Types no rule covers (possible after pruning) get mass 0;
// overlapping guards throw std::domain_error.
Rat msf_p(const TypeProbTable& table, const AtomicType& p);

// msf_p(p) / msf_p(q) where q must be p restricted to q's variables.
// Throws std::domain_error when msf_p(q) = 0 or q is not such a restriction.
Rat msf_p_cond(const TypeProbTable& table, const AtomicType& p, const AtomicType& q);

struct CriticalSet {
  int m = 0;
  std::vector<Rat> values;   // sorted, unique; always contains 0 and 1
  long long count_bound = 0; // the N feeding the denominator-bounded part
};

// Critical numbers with at most m variables; m must stay within m_bound and
// the internal subset-sum / fraction tables are explosion-guarded
// (std::domain_error past the caps).
CriticalSet critical_numbers(const TypeProbTable& table, int m, int m_bound = 4);

struct NoncriticalWitness {
  Rat r, alpha, beta;  // r = alpha - beta with alpha, beta critical
};

struct NoncriticalReport {
  bool ok = true;
  std::vector<NoncriticalWitness> witnesses;
};

// "(r=1/2, alpha=1/2, beta=0)"
std::string witness_str(const NoncriticalWitness& w);

// Every margin r in f must differ from every difference of two critical
// numbers at level |free_vars(f)| + quantifier_rank(f).
NoncriticalReport is_noncritical(const TypeProbTable& table, const FPtr& f,
                                 int m_bound = 4);

// Largest-found eps such that the strict comparisons behind f's margins
// survive scaling the two sides by (1+2*eps)^2 and 1/(1+2*eps)^2; the
// returned value satisfies the condition while 2*eps fails it.  Empty
// optional: f has no comparisons, every eps works.
std::optional<Rat> epsilon_margin(const TypeProbTable& table, const FPtr& f,
                                  int m_bound = 4);

}  // namespace cpl

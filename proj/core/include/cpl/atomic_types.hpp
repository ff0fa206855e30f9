// Complete atomic diagrams over a variable tuple.
//
// A type fixes (a) which variables are equal — a partition stored as a
// restricted-growth string, classes numbered by first occurrence — and
// (b) the truth of every relation atom over the classes.  Relation literals
// are indexed canonically: relations in signature order (sorted by name),
// argument tuples over class indices in lexicographic order with the first
// argument most significant.
//
// Enumeration order is the canonical order used everywhere a disjunction of
// types is produced: partitions in lexicographic restricted-growth order,
// then literal bitmasks ascending (atom 0 is the least significant bit).

#pragma once

#include <cpl/formula.hpp>

#include <map>
#include <string>
#include <vector>

namespace cpl {

struct AtomicType {
  Signature sig;
  std::vector<std::string> vars;
  std::vector<int> cls;    // cls[i] = equivalence class of vars[i]
  std::vector<bool> lits;  // truth per canonical atom index

  int classes() const;
  // Least variable name in the class (the canonical representative).
  const std::string& rep(int cls_index) const;
};

// All complete types over vars (throws if vars empty or has duplicates).
std::vector<AtomicType> enumerate_types(const Signature& sig,
                                        const std::vector<std::string>& vars);

// Number of classes that contain a ys-variable and no other variable.
int dimension(const AtomicType& p, const std::vector<std::string>& ys);

// Restriction to a subsignature and a variable subset (kept in p's tuple
// order); classes renumbered by first occurrence.
AtomicType restrict_type(const AtomicType& p, const Signature& sub,
                         const std::vector<std::string>& xs);

// Truth of a quantifier-free formula whose variables are interpreted by env
// (variable -> class index of p).  Throws std::logic_error on quantifiers or
// comparisons, std::invalid_argument on variables missing from env.
bool type_satisfies_env(const AtomicType& p, const FPtr& f,
                        const std::map<std::string, int>& env);

// Same, with every variable of p.vars bound to its own class.
bool type_satisfies(const AtomicType& p, const FPtr& f);

// Canonical conjunction: identity literals for variable pairs (i < j in
// tuple order), then relation literals in atom-index order, arguments named
// by class representatives.  A type with no literals at all renders as true.
FPtr type_formula(const AtomicType& p);

// Types satisfying a quantifier-free f, in enumeration order.
std::vector<AtomicType> type_disjunction(const FPtr& f, const Signature& sig,
                                         const std::vector<std::string>& vars);

// Truth of one relation literal at a class tuple.
bool type_literal(const AtomicType& p, const std::string& rel,
                  const std::vector<int>& cls_tuple);

// Key identifying the type up to variable names (partition + literals).
std::string type_key(const AtomicType& p);

// Partition + literals equal (variable names ignored).
bool same_type(const AtomicType& a, const AtomicType& b);

}  // namespace cpl

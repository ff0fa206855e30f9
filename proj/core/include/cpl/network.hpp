// Lifted Bayesian networks: a DAG over relation symbols where each relation
// carries rules (guard over the parents' vocabulary, probability).  A world
// over domain [n] is generated relation by relation along the DAG: for every
// tuple, the unique rule whose guard the already-generated part satisfies
// fires, and the tuple enters the relation with that rule's probability.
//
// Guards for a k-ary relation use the reserved variables x1..xk for the
// tuple's positions and may quantify over further variables.
//
// JSON schema (file order of relations is arbitrary):
//   { "relations": [ { "name": "Q", "arity": 1, "parents": ["P"],
//                      "rules": [ { "guard": "P(x1)", "prob": "3/4" },
//                                 { "guard": "~P(x1)", "prob": "1/4" } ] },
//                    ... ] }

#pragma once

#include <cpl/formula.hpp>

#include <optional>
#include <string>
#include <vector>

namespace cpl {

struct Rule {
  FPtr guard;
  Rat prob;
};

struct RelationDef {
  std::string name;
  int arity = 1;
  std::vector<std::string> parents;
  std::vector<Rule> rules;
};

struct Network {
  std::vector<RelationDef> relations;  // file order preserved

  const RelationDef& rel(const std::string& name) const;  // throws if missing
  bool has(const std::string& name) const;
  Signature signature() const;
};

// Parse/serialize the JSON schema above.  load_network throws
// std::invalid_argument on malformed input: bad JSON, duplicate or unknown
// names, arity < 1, parent cycles, probability outside [0,1], guard
// mentioning a non-parent relation or a variable beyond x1..xk.
Network load_network(const std::string& json_text);
Network load_network_file(const std::string& path);
std::string network_to_json(const Network& net);

// ── Structure checks ────────────────────────────────────────────────────────

struct Violation {
  std::string relation;
  std::string kind;  // "overlap" | "gap" | "cycle" | "scope"
  std::string witness;
};

struct ValidationReport {
  bool ok = true;
  std::vector<Violation> violations;
};

// Checks that the parent graph is acyclic, guards stay within scope, and each
// relation's guards are exhaustive and pairwise exclusive: exactly via type
// enumeration when every guard is quantifier-free, otherwise by enumerating
// all parent-structures of size 1..n_check and all argument tuples.
// Reports instead of throwing.
ValidationReport validate(const Network& net, int n_check = 4);

// ── Stratification ──────────────────────────────────────────────────────────

// Longest directed path from the relation along parent->child edges
// (so parents rank strictly above their children).
int mp_rank(const Network& net, const std::string& relation);

// Increasing chain of parent-closed signatures sigma_0 c ... c sigma_rho,
// sigma_i = relations of rank >= rho - i; the last one is the full signature.
std::vector<Signature> strata(const Network& net);

// Sub-network induced by a parent-closed set of relation names (throws if the
// set is not parent-closed or has unknown names).
Network subnetwork(const Network& net, const std::vector<std::string>& names);

// Smallest parent-closed superset of the given relation names.
std::vector<std::string> parent_closure(const Network& net,
                                        const std::vector<std::string>& names);

}  // namespace cpl

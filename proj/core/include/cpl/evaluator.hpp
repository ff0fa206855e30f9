// Truth evaluation over finite structures.
//
// A structure has domain {1..n} and an interpretation per relation symbol.
// Relations absent from the interpretation map are treated as empty.
//
// Proportion comparisons are evaluated exactly: both denominator sets must be
// nonempty, and the two proportions are compared as rationals with the margin
// on the stated side.  An empty denominator makes the comparison false — and
// the mirrored comparison false as well; negation is NOT pushed through a
// comparison.
//
// JSON schema: { "n": 3, "relations": { "R": [[1,2],[2,3]] } }
// (elements are 1-based; serialization sorts relation names and tuples).

#pragma once

#include <cpl/formula.hpp>

#include <map>
#include <set>
#include <string>
#include <vector>

namespace cpl {

struct Structure {
  int n = 0;
  std::map<std::string, std::set<std::vector<int>>> interp;

  bool holds(const std::string& rel, const std::vector<int>& tuple) const;
};

Structure structure_from_json(const std::string& json_text);
std::string structure_to_json(const Structure& s);

using Assignment = std::map<std::string, int>;

// Truth of f under asg.  Throws std::invalid_argument if a free variable is
// unassigned, std::domain_error if an assigned element is outside 1..n.
bool evaluate(const Structure& A, const FPtr& f, const Assignment& asg);

// All tuples over ys (lexicographic, first variable most significant) whose
// extension of asg satisfies f.  ys entries shadow asg entries.
std::vector<std::vector<int>> solution_set(const Structure& A, const FPtr& f,
                                           const Assignment& asg,
                                           const std::vector<std::string>& ys);

}  // namespace cpl

// Inline copies of the example networks shared across the test suite, plus
// the signatures they induce.  Kept in one place so every test file pins the
// same fixtures.

#pragma once

#include <cpl/formula.hpp>

namespace testnets {

// One fair unary coin.
inline const char* kCoin = R"json({
  "relations": [
    { "name": "P", "arity": 1, "parents": [],
      "rules": [ { "guard": "true", "prob": "1/2" } ] }
  ]
})json";

// Q depends on P: present elements boost Q to 3/4, absent ones drop it to 1/4.
inline const char* kPq = R"json({
  "relations": [
    { "name": "Q", "arity": 1, "parents": ["P"],
      "rules": [ { "guard": "P(x1)", "prob": "3/4" },
                 { "guard": "~P(x1)", "prob": "1/4" } ] },
    { "name": "P", "arity": 1, "parents": [],
      "rules": [ { "guard": "true", "prob": "1/2" } ] }
  ]
})json";

// Independent fair edges.
inline const char* kGraph = R"json({
  "relations": [
    { "name": "R", "arity": 2, "parents": [],
      "rules": [ { "guard": "true", "prob": "1/2" } ] }
  ]
})json";

// P holds surely.
inline const char* kSure = R"json({
  "relations": [
    { "name": "P", "arity": 1, "parents": [],
      "rules": [ { "guard": "true", "prob": "1" } ] }
  ]
})json";

// Q guarded by a quantified condition on the edge relation.
inline const char* kExistsR = R"json({
  "relations": [
    { "name": "R", "arity": 2, "parents": [],
      "rules": [ { "guard": "true", "prob": "1/2" } ] },
    { "name": "Q", "arity": 1, "parents": ["R"],
      "rules": [ { "guard": "exists y : R(x1,y)", "prob": "3/4" },
                 { "guard": "~exists y : R(x1,y)", "prob": "1/4" } ] }
  ]
})json";

inline cpl::Signature sig_p() { return cpl::Signature({{"P", 1}}); }
inline cpl::Signature sig_pq() { return cpl::Signature({{"P", 1}, {"Q", 1}}); }
inline cpl::Signature sig_graph() { return cpl::Signature({{"R", 2}}); }
inline cpl::Signature sig_pr() { return cpl::Signature({{"P", 1}, {"R", 2}}); }

}  // namespace testnets

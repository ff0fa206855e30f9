// Release acceptance suite: ten end-to-end checks covering exact world
// distributions, limit masses, the rewrite golden cases, convergence,
// sampled equivalence, the network transform, criticality detection, the
// zero-one law, cost scaling, and sampler fidelity.  One PASS/FAIL line per
// check; returns true when every check passes.

#pragma once

#include <iosfwd>

namespace cpl {

bool run_acceptance(std::ostream& out);

}  // namespace cpl

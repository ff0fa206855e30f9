// Finite random worlds of a lifted Bayesian network.
//
// The probability of a concrete world factorizes over relation/tuple pairs:
// each tuple contributes mu or 1-mu for the unique rule whose guard the world
// satisfies.  Exact probabilities enumerate all worlds (guarded by a cap on
// the atom count); sampling is counter-based — every Bernoulli draw is keyed
// by (seed, relation, tuple), so a sample is a pure function of its seed and
// replay is bit-identical.  Draws are exact: a uniform integer below the
// probability's denominator is produced by rejection, never by floating
// point.

#pragma once

#include <cpl/evaluator.hpp>
#include <cpl/network.hpp>

#include <cstdint>

namespace cpl {

// Probability that the generation process yields exactly A (domain A.n).
// Throws std::domain_error if some tuple matches no or several guards.
Rat world_probability(const Network& net, const Structure& A);

// Sum of world_probability over all worlds with domain n satisfying (f, asg).
// cap_bits bounds the enumeration: the atom count must be <= cap_bits
// (default 24, i.e. at most 2^24 worlds).  threads > 1 splits the world range.
Rat exact_probability(const Network& net, int n, const FPtr& f,
                      const Assignment& asg = {}, int cap_bits = 24,
                      int threads = 1);

// One world with domain {1..n}; deterministic in (net, n, seed).
Structure sample_world(const Network& net, int n, std::uint64_t seed);

struct Estimate {
  double estimate = 0.0;
  double half_width_95 = 0.0;  // 1.96 * sqrt(p(1-p)/samples)
};

// Monte Carlo estimate of the probability of (f, asg) at domain size n,
// using sample_world(net, n, seed + i) for i in [0, samples).
Estimate estimate_probability(const Network& net, int n, const FPtr& f,
                              const Assignment& asg, long samples,
                              std::uint64_t seed);

}  // namespace cpl

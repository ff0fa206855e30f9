#include <cpl/worlds.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

namespace cpl {

namespace {

std::vector<std::string> tuple_vars(int arity) {
  std::vector<std::string> vs;
  for (int i = 1; i <= arity; ++i) vs.push_back("x" + std::to_string(i));
  return vs;
}

// The unique rule index matching tuple `tup` of relation `r` in world A.
int matching_rule(const Network& net, const RelationDef& r, const Structure& A,
                  const std::vector<int>& tup) {
  Assignment asg;
  for (std::size_t i = 0; i < tup.size(); ++i)
    asg["x" + std::to_string(i + 1)] = tup[i];
  int hit = -1;
  for (std::size_t i = 0; i < r.rules.size(); ++i) {
    if (evaluate(A, r.rules[i].guard, asg)) {
      if (hit >= 0)
        throw std::domain_error("guards of " + r.name + " overlap at a tuple");
      hit = static_cast<int>(i);
    }
  }
  if (hit < 0)
    throw std::domain_error("guards of " + r.name + " leave a gap at a tuple");
  return hit;
}

template <class Fn>
void for_each_tuple(int n, int arity, Fn&& fn) {
  if (n <= 0) return;
  std::vector<int> tup(arity, 1);
  for (;;) {
    fn(static_cast<const std::vector<int>&>(tup));
    int i = arity - 1;
    while (i >= 0 && ++tup[i] > n) tup[i--] = 1;
    if (i < 0) return;
  }
}

// All ground atoms at domain size n, relations sorted by name, tuples lex.
std::vector<std::pair<std::string, std::vector<int>>> ground_atoms(
    const Signature& sig, int n) {
  std::vector<std::pair<std::string, std::vector<int>>> atoms;
  for (const auto& sym : sig.relations)
    for_each_tuple(n, sym.arity,
                   [&](const std::vector<int>& t) { atoms.emplace_back(sym.name, t); });
  return atoms;
}

// ── Counter-based randomness ────────────────────────────────────────────────

std::uint64_t mix64(std::uint64_t z) {
  // splitmix64 finalizer
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::uint64_t hash_str(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

struct AtomKey {
  std::uint64_t state;
  explicit AtomKey(std::uint64_t seed, const std::string& rel,
                   const std::vector<int>& tup) {
    state = mix64(seed ^ 0x5851f42d4c957f2dull);
    state = mix64(state ^ hash_str(rel));
    for (int e : tup) state = mix64(state ^ static_cast<std::uint64_t>(e));
  }
  std::uint64_t block(std::uint64_t i) const { return mix64(state + i * 0x9e3779b97f4a7c15ull); }
};

// Exact Bernoulli(num/den): uniform below den by rejection, accept iff < num.
bool bernoulli_exact(const Rat& p, const AtomKey& key) {
  const mpz_class &num = p.get_num(), &den = p.get_den();
  if (num == 0) return false;
  if (num == den) return true;
  std::uint64_t ctr = 0;
  if (den.fits_ulong_p()) {
    unsigned long d = den.get_ui(), nm = num.get_ui();
    std::uint64_t limit = ~0ull - (~0ull % d + 1) % d;  // multiple-of-d cutoff
    for (;;) {
      std::uint64_t u = key.block(ctr++);
      if (u <= limit) return u % d < nm;
    }
  }
  std::size_t bits = mpz_sizeinbase(den.get_mpz_t(), 2);
  std::size_t words = (bits + 63) / 64;
  mpz_class z;
  for (;;) {
    z = 0;
    for (std::size_t w = 0; w < words; ++w) {
      mpz_mul_2exp(z.get_mpz_t(), z.get_mpz_t(), 64);
      z += mpz_class(static_cast<unsigned long>(key.block(ctr++)));
    }
    mpz_fdiv_r_2exp(z.get_mpz_t(), z.get_mpz_t(), bits);
    if (z < den) return z < num;
  }
}

}  // namespace

Rat world_probability(const Network& net, const Structure& A) {
  Rat prob = 1;
  for (const auto& r : net.relations) {
    for_each_tuple(A.n, r.arity, [&](const std::vector<int>& tup) {
      const Rule& rule = r.rules[matching_rule(net, r, A, tup)];
      if (A.holds(r.name, tup)) prob *= rule.prob;
      else prob *= Rat(1) - rule.prob;
    });
  }
  return prob;
}

Rat exact_probability(const Network& net, int n, const FPtr& f, const Assignment& asg,
                      int cap_bits, int threads) {
  if (n < 0) throw std::domain_error("domain size must be >= 0");
  auto atoms = ground_atoms(net.signature(), n);
  if (atoms.size() > static_cast<std::size_t>(cap_bits))
    throw std::domain_error("world count 2^" + std::to_string(atoms.size()) +
                            " exceeds the enumeration cap 2^" +
                            std::to_string(cap_bits));
  const std::uint64_t total = 1ull << atoms.size();
  threads = std::max(1, std::min<int>(threads, 64));

  auto run = [&](std::uint64_t lo, std::uint64_t hi) {
    Rat sum = 0;
    Structure A;
    A.n = n;
    for (const auto& [rel, tup] : atoms) A.interp[rel];  // fixed key set
    for (std::uint64_t mask = lo; mask < hi; ++mask) {
      for (auto& [rel, set] : A.interp) set.clear();
      for (std::size_t a = 0; a < atoms.size(); ++a)
        if ((mask >> a) & 1) A.interp[atoms[a].first].insert(atoms[a].second);
      if (evaluate(A, f, asg)) sum += world_probability(net, A);
    }
    return sum;
  };

  if (threads == 1 || total < 1024) return run(0, total);

  std::vector<Rat> parts(threads, Rat(0));
  std::vector<std::thread> pool;
  std::uint64_t chunk = total / threads + 1;
  for (int t = 0; t < threads; ++t) {
    std::uint64_t lo = std::min<std::uint64_t>(total, t * chunk);
    std::uint64_t hi = std::min<std::uint64_t>(total, lo + chunk);
    pool.emplace_back([&, t, lo, hi] { parts[t] = run(lo, hi); });
  }
  for (auto& th : pool) th.join();
  Rat sum = 0;
  for (const auto& p : parts) sum += p;
  return sum;
}

Structure sample_world(const Network& net, int n, std::uint64_t seed) {
  if (n < 0) throw std::domain_error("domain size must be >= 0");
  Structure A;
  A.n = n;
  for (const auto& r : net.relations) A.interp[r.name];

  // Parents before children: walk the strata, instantiating each relation the
  // first time it appears.  Guards only read relations from earlier strata.
  auto levels = strata(net);
  std::set<std::string> done;
  for (const auto& level : levels) {
    for (const auto& sym : level.relations) {
      if (!done.insert(sym.name).second) continue;
      const RelationDef& r = net.rel(sym.name);
      for_each_tuple(n, r.arity, [&](const std::vector<int>& tup) {
        const Rule& rule = r.rules[matching_rule(net, r, A, tup)];
        if (bernoulli_exact(rule.prob, AtomKey(seed, r.name, tup)))
          A.interp[r.name].insert(tup);
      });
    }
  }
  return A;
}

Estimate estimate_probability(const Network& net, int n, const FPtr& f,
                              const Assignment& asg, long samples,
                              std::uint64_t seed) {
  if (samples <= 0) throw std::domain_error("sample count must be positive");
  long hits = 0;
  for (long i = 0; i < samples; ++i) {
    Structure A = sample_world(net, n, seed + static_cast<std::uint64_t>(i));
    if (evaluate(A, f, asg)) ++hits;
  }
  double p = static_cast<double>(hits) / static_cast<double>(samples);
  double hw = 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
  return {p, hw};
}

}  // namespace cpl

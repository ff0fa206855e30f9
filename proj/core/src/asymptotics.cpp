#include <cpl/asymptotics.hpp>

#include <algorithm>
#include <set>
#include <stdexcept>

namespace cpl {

namespace {

constexpr std::size_t kPairCap = 200000;   // subset-sum (a,c) states
constexpr long long kFareyCap = 512;       // denominator bound materialization

std::vector<std::string> canon_vars(int count, int offset = 0) {
  std::vector<std::string> vs;
  for (int i = 1; i <= count; ++i) vs.push_back("v" + std::to_string(i + offset));
  return vs;
}

}  // namespace

TypeProbTable::TypeProbTable(Network qf_net) : net(std::move(qf_net)) {
  for (const auto& r : net.relations)
    for (const auto& rule : r.rules)
      if (!is_quantifier_free(rule.guard))
        throw std::invalid_argument("type-mass table needs quantifier-free guards (" +
                                    r.name + ")");
}

Rat msf_p(const TypeProbTable& table, const AtomicType& p) {
  // The type may live over any stratum signature: a subset of the network's
  // relations that is closed under parents, so every guard stays decidable.
  const Signature net_sig = table.net.signature();
  for (const auto& sym : p.sig.relations) {
    int at = net_sig.find(sym.name);
    if (at < 0 || net_sig.relations[at].arity != sym.arity)
      throw std::invalid_argument("type signature differs from the network's");
    for (const auto& parent : table.net.rel(sym.name).parents)
      if (p.sig.find(parent) < 0)
        throw std::invalid_argument("type signature is not parent-closed (" +
                                    sym.name + " needs " + parent + ")");
  }
  std::string key = type_key(p);
  if (auto it = table.memo.find(key); it != table.memo.end()) return it->second;

  int classes = p.classes();
  Rat mass = 1;
  for (const auto& r : table.net.relations) {
    if (p.sig.find(r.name) < 0) continue;
    std::vector<int> tup(r.arity, 0);
    for (;;) {
      std::map<std::string, int> env;
      for (int i = 0; i < r.arity; ++i) env["x" + std::to_string(i + 1)] = tup[i];
      int hit = -1;
      for (std::size_t i = 0; i < r.rules.size(); ++i) {
        if (type_satisfies_env(p, r.rules[i].guard, env)) {
          if (hit >= 0) throw std::domain_error("guards of " + r.name + " overlap");
          hit = static_cast<int>(i);
        }
      }
      if (hit < 0) {
        mass = 0;  // no rule covers this type (prunable corner); mass zero
        break;
      }
      const Rat& mu = r.rules[hit].prob;
      mass *= type_literal(p, r.name, tup) ? mu : Rat(1) - mu;
      if (mass == 0) break;
      int i = r.arity - 1;
      while (i >= 0 && ++tup[i] == classes) tup[i--] = 0;
      if (i < 0) break;
    }
    if (mass == 0) break;
  }
  table.memo.emplace(std::move(key), mass);
  return mass;
}

Rat msf_p_cond(const TypeProbTable& table, const AtomicType& p, const AtomicType& q) {
  AtomicType q2 = restrict_type(p, q.sig, q.vars);
  if (!(q2.vars == q.vars) || !same_type(q2, q))
    throw std::domain_error("conditioning type is not the matching restriction");
  Rat mq = msf_p(table, q);
  if (mq == 0) throw std::domain_error("conditioning on a measure-zero type");
  return msf_p(table, p) / mq;
}

// ── Critical numbers ────────────────────────────────────────────────────────

namespace {

// All a/(a+c) over disjoint subset sums of `masses` with a > 0.
void subset_sum_ratios(const std::vector<Rat>& masses, std::set<Rat>& out) {
  std::set<std::pair<Rat, Rat>> pairs{{Rat(0), Rat(0)}};
  for (const Rat& m : masses) {
    std::set<std::pair<Rat, Rat>> next = pairs;
    for (const auto& [a, c] : pairs) {
      next.emplace(a + m, c);
      next.emplace(a, c + m);
    }
    if (next.size() > kPairCap)
      throw std::domain_error("critical-number subset sums exceed the explosion cap");
    pairs = std::move(next);
  }
  for (const auto& [a, c] : pairs)
    if (a > 0) out.insert(a / (a + c));
}

}  // namespace

CriticalSet critical_numbers(const TypeProbTable& table, int m, int m_bound) {
  if (m < 1) throw std::domain_error("m must be >= 1");
  if (m > m_bound)
    throw std::domain_error("m = " + std::to_string(m) + " exceeds the bound " +
                            std::to_string(m_bound));
  Signature sig = table.net.signature();
  std::set<Rat> values{Rat(0), Rat(1)};

  // Ratio part: conditional extension masses over splits (first j variables
  // conditioned on, the rest extending), for every total tuple size <= m.
  for (int tot = 1; tot <= m; ++tot) {
    auto vars = canon_vars(tot);
    auto exts = enumerate_types(sig, vars);
    for (int j = 0; j + 1 <= tot; ++j) {
      if (j == 0) {
        std::vector<Rat> masses;
        for (const auto& p : exts) {
          Rat mp = msf_p(table, p);
          if (mp > 0) masses.push_back(mp);
        }
        subset_sum_ratios(masses, values);
        continue;
      }
      std::vector<std::string> xs(vars.begin(), vars.begin() + j);
      std::map<std::string, std::vector<Rat>> by_base;  // base type key -> masses
      std::set<std::string> dead;                       // measure-zero bases
      for (const auto& p : exts) {
        AtomicType q = restrict_type(p, sig, xs);
        std::string qk = type_key(q);
        if (dead.count(qk)) continue;
        Rat mq = msf_p(table, q);
        if (mq == 0) {
          dead.insert(qk);
          continue;
        }
        Rat mp = msf_p(table, p);
        if (mp > 0) by_base[qk].push_back(mp / mq);
      }
      for (const auto& [qk, masses] : by_base) subset_sum_ratios(masses, values);
    }
  }

  // Denominator part: fractions l'/l for l up to the number of
  // zero-dimension (extension, restriction) pairs.
  long long N = 0;
  for (int mp = 1; mp <= m; ++mp) {
    auto vars = canon_vars(mp);
    auto types = enumerate_types(sig, vars);
    for (int d = 1; d < mp; ++d) {
      std::vector<std::string> ys(vars.begin() + d, vars.end());
      for (const auto& p : types)
        if (dimension(p, ys) == 0) ++N;
    }
  }
  if (N > kFareyCap)
    throw std::domain_error("critical-number denominator bound " + std::to_string(N) +
                            " exceeds the explosion cap");
  for (long long l = 1; l <= N; ++l)
    for (long long lp = 0; lp <= l; ++lp) values.insert(make_rat(lp, l));

  CriticalSet out;
  out.m = m;
  out.count_bound = N;
  out.values.assign(values.begin(), values.end());
  return out;
}

std::string witness_str(const NoncriticalWitness& w) {
  return "(r=" + rat_str(w.r) + ", alpha=" + rat_str(w.alpha) + ", beta=" +
         rat_str(w.beta) + ")";
}

NoncriticalReport is_noncritical(const TypeProbTable& table, const FPtr& f,
                                 int m_bound) {
  NoncriticalReport rep;
  std::set<Rat> rs = threshold_constants(f);
  if (rs.empty()) return rep;

  int l = static_cast<int>(free_vars(f).size()) + quantifier_rank(f);
  CriticalSet crit = critical_numbers(table, l, m_bound);
  std::set<Rat> vals(crit.values.begin(), crit.values.end());
  for (const Rat& r : rs)
    for (const Rat& alpha : crit.values) {
      Rat beta = alpha - r;
      if (vals.count(beta)) {
        rep.ok = false;
        rep.witnesses.push_back({r, alpha, beta});
      }
    }
  return rep;
}

std::optional<Rat> epsilon_margin(const TypeProbTable& table, const FPtr& f,
                                  int m_bound) {
  std::set<Rat> rs = threshold_constants(f);
  if (rs.empty()) return std::nullopt;  // no comparisons: every margin works

  NoncriticalReport rep = is_noncritical(table, f, m_bound);
  if (!rep.ok) throw std::domain_error("epsilon margin needs a noncritical formula");

  int l = static_cast<int>(free_vars(f).size()) + quantifier_rank(f);
  CriticalSet crit = critical_numbers(table, l, m_bound);

  auto holds = [&](const Rat& eps) {
    Rat s = (Rat(1) + 2 * eps) * (Rat(1) + 2 * eps);
    for (const Rat& r : rs)
      for (const Rat& alpha : crit.values)
        for (const Rat& beta : crit.values) {
          if (r + alpha > beta && !(r + alpha / s > beta * s)) return false;
          if (alpha > beta + r && !(alpha / s > beta * s + r)) return false;
        }
    return true;
  };

  Rat eps(1);
  if (holds(eps)) {
    // Grow until failure; the pair (eps, 2*eps) then brackets the margin.
    while (holds(2 * eps)) {
      eps *= 2;
      if (eps > Rat(1000000000))
        throw std::domain_error("epsilon margin search failed to bracket");
    }
    return eps;
  }
  for (int i = 0; i < 256; ++i) {
    eps /= 2;
    if (holds(eps)) return eps;
  }
  throw std::domain_error("epsilon margin search failed to find a witness");
}

}  // namespace cpl

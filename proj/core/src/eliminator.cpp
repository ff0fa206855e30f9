#include <cpl/eliminator.hpp>

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace cpl {

CostTally cost_report(const ComparisonAnalysis& analysis) { return analysis.tally; }

namespace {

void add(CostTally& into, const CostTally& t) {
  into.arith += t.arith;
  into.num_cmp += t.num_cmp;
  into.lit_cmp += t.lit_cmp;
}

bool fold_bool(const Formula& f) {
  switch (f.kind) {
    case Kind::Top: return true;
    case Kind::Not: return !fold_bool(*f.a);
    case Kind::And: return fold_bool(*f.a) && fold_bool(*f.b);
    case Kind::Or: return fold_bool(*f.a) || fold_bool(*f.b);
    case Kind::Implies: return !fold_bool(*f.a) || fold_bool(*f.b);
    case Kind::Iff: return fold_bool(*f.a) == fold_bool(*f.b);
    default:
      throw std::logic_error("variable-free formula expected");
  }
}

// true / ~true when the disjunction covers the whole type space / nothing.
FPtr collapse_guard(const FPtr& star, const Signature& sig,
                    const std::vector<std::string>& fv) {
  if (fv.empty()) return star;
  std::size_t covered = type_disjunction(star, sig, fv).size();
  std::size_t total = enumerate_types(sig, fv).size();
  if (covered == total) return f_top();
  if (covered == 0) return f_not(f_top());
  return star;
}

}  // namespace

// ── Network transform ───────────────────────────────────────────────────────

Eliminator::Eliminator(Network net, int k) : net_(std::move(net)), k_(k) {
  if (k_ < 1) throw std::domain_error("k must be >= 1");
  auto levels = strata(net_);  // throws on parent cycles

  qfnet_ = net_;
  std::set<std::string> done;
  for (const auto& level : levels) {
    for (const auto& sym : level.relations) {
      if (!done.insert(sym.name).second) continue;
      RelationDef* r = nullptr;
      for (auto& cand : qfnet_.relations)
        if (cand.name == sym.name) r = &cand;
      bool all_qf = std::all_of(r->rules.begin(), r->rules.end(), [](const Rule& u) {
        return is_quantifier_free(u.guard);
      });
      if (all_qf) continue;

      // Lower-strata context: parents and their ancestors, already rewritten.
      auto closure = parent_closure(qfnet_, r->parents);
      Network subnet = subnetwork(qfnet_, closure);
      Eliminator sub(subnet, k_);
      Signature closure_sig = subnet.signature();
      std::set<std::string> parent_set(r->parents.begin(), r->parents.end());
      bool beyond_parents = closure.size() != parent_set.size();

      for (auto& rule : r->rules) {
        if (is_quantifier_free(rule.guard)) continue;
        auto rep = is_noncritical(sub.table(), rule.guard, k_);
        if (!rep.ok)
          throw std::domain_error("guard of " + r->name + " has a critical margin " +
                                  witness_str(rep.witnesses[0]));
        auto fv = free_vars(rule.guard);
        FPtr star = sub.eliminate(rule.guard);

        if (beyond_parents && !fv.empty()) {
          // The rewrite talks about ancestor relations beyond par(R).  When
          // the retained set is a union of fibers over the parent-only
          // restriction, project it back; otherwise widen the parent list.
          std::vector<RelSym> psyms;
          for (const auto& p : r->parents) psyms.push_back({p, net_.rel(p).arity});
          Signature par_sig(psyms);
          std::set<std::string> keys;
          for (const auto& t : type_disjunction(star, closure_sig, fv))
            keys.insert(type_key(restrict_type(t, par_sig, fv)));
          bool fibered = true;
          for (const auto& t : enumerate_types(closure_sig, fv)) {
            bool in_star = type_satisfies(t, star);
            bool in_fiber = keys.count(type_key(restrict_type(t, par_sig, fv))) > 0;
            if (in_star != in_fiber) {
              fibered = false;
              break;
            }
          }
          if (fibered) {
            std::vector<FPtr> ds;
            for (const auto& t : enumerate_types(par_sig, fv))
              if (keys.count(type_key(t))) ds.push_back(type_formula(t));
            star = f_or_all(ds);
            rule.guard = collapse_guard(star, par_sig, fv);
            continue;
          }
          r->parents = closure;
        }
        rule.guard = collapse_guard(star, closure_sig, fv);
      }
    }
  }
  table_.emplace(qfnet_);
}

Network quantifier_free_network(const Network& net, int k) {
  return Eliminator(net, k).transformed();
}

// ── Rewrite ─────────────────────────────────────────────────────────────────

FPtr Eliminator::eliminate(const FPtr& f) {
  auto fv = free_vars(f);
  int l = static_cast<int>(fv.size()) + quantifier_rank(f);
  if (l > k_)
    throw std::domain_error("free variables + quantifier rank = " + std::to_string(l) +
                            " exceeds the budget k = " + std::to_string(k_));
  auto rep = cpl::is_noncritical(*table_, f, k_);
  if (!rep.ok)
    throw std::domain_error("critical margin " + witness_str(rep.witnesses[0]));
  return canonical(rewrite(f), fv);
}

FPtr Eliminator::canonical(const FPtr& qf, const std::vector<std::string>& fv) {
  if (fv.empty()) return fold_bool(*qf) ? f_top() : f_not(f_top());
  std::vector<FPtr> ds;
  for (const auto& t : type_disjunction(qf, net_.signature(), fv))
    ds.push_back(type_formula(t));
  return f_or_all(ds);
}

FPtr Eliminator::rewrite(const FPtr& f) {
  switch (f->kind) {
    case Kind::Top:
    case Kind::Atom:
    case Kind::Equal: return f;
    case Kind::Not: return f_not(rewrite(f->a));
    case Kind::And: return f_and(rewrite(f->a), rewrite(f->b));
    case Kind::Or: return f_or(rewrite(f->a), rewrite(f->b));
    case Kind::Implies: return f_implies(rewrite(f->a), rewrite(f->b));
    case Kind::Iff: return f_iff(rewrite(f->a), rewrite(f->b));
    case Kind::Exists: {
      FPtr body = rewrite(f->a);
      // Innermost first: unroll the variable list right to left.
      for (auto it = f->vars.rbegin(); it != f->vars.rend(); ++it) {
        auto xs = free_vars(f_exists({*it}, body));
        body = eliminate_existential(body, *it, xs);
      }
      return body;
    }
    case Kind::Compare: {
      FPtr comp = f_compare(f->r, f->r_side, rewrite(f->num1), rewrite(f->den1),
                            rewrite(f->num2), rewrite(f->den2), f->vars);
      return eliminate_comparison(comp, free_vars(comp));
    }
  }
  return f;
}

// ── Existential step ────────────────────────────────────────────────────────

FPtr Eliminator::eliminate_existential(const FPtr& body, const std::string& y,
                                       const std::vector<std::string>& xs) {
  if (!is_quantifier_free(body))
    throw std::logic_error("existential step needs a quantifier-free body");
  for (const auto& x : xs)
    if (x == y) throw std::invalid_argument("bound variable listed in xs: " + y);
  {
    std::set<std::string> scope(xs.begin(), xs.end());
    scope.insert(y);
    for (const auto& v : free_vars(body))
      if (!scope.count(v))
        throw std::invalid_argument("body variable outside xs + {y}: " + v);
  }
  Signature sig = net_.signature();

  if (xs.empty()) {
    bool any = false;
    for (const auto& p : enumerate_types(sig, {y})) {
      cost_.lit_cmp += p.lits.size();
      if (!type_satisfies(p, body)) continue;
      ++cost_.arith;
      ++cost_.num_cmp;
      if (msf_p(*table_, p) > 0) {
        any = true;
        break;
      }
    }
    return any ? f_top() : f_not(f_top());
  }

  auto bases = enumerate_types(sig, xs);
  std::map<std::string, std::size_t> base_index;
  std::vector<char> alive(bases.size());
  for (std::size_t i = 0; i < bases.size(); ++i) {
    base_index[type_key(bases[i])] = i;
    ++cost_.arith;
    ++cost_.num_cmp;
    alive[i] = msf_p(*table_, bases[i]) > 0;
  }

  std::vector<std::string> vars = xs;
  vars.push_back(y);
  std::vector<char> retained(bases.size(), 0);
  for (const auto& p : enumerate_types(sig, vars)) {
    cost_.lit_cmp += p.lits.size();
    if (!type_satisfies(p, body)) continue;
    std::size_t i = base_index.at(type_key(restrict_type(p, sig, xs)));
    if (!alive[i] || retained[i]) continue;
    // Positive conditional mass reduces to positive extension mass here.
    ++cost_.arith;
    ++cost_.num_cmp;
    if (msf_p(*table_, p) > 0) retained[i] = 1;
  }

  std::vector<FPtr> ds;
  for (std::size_t i = 0; i < bases.size(); ++i)
    if (retained[i]) ds.push_back(type_formula(bases[i]));
  return f_or_all(ds);
}

// ── Comparison step ─────────────────────────────────────────────────────────

namespace {

// Accumulates one side of a comparison for one base type: conditional masses
// of denominator/numerator extensions, bucketed by dimension.
struct SideAccum {
  bool den_alive = false;
  std::vector<Rat> den_by_dim, num_by_dim;  // sums per dimension
  int den_max = -1, num_max = -1;

  explicit SideAccum(int max_dim)
      : den_by_dim(max_dim + 1, Rat(0)), num_by_dim(max_dim + 1, Rat(0)) {}

  void feed(int dim, const Rat& cond, bool in_num) {
    den_alive = true;
    den_by_dim[dim] += cond;
    den_max = std::max(den_max, dim);
    if (in_num) {
      num_by_dim[dim] += cond;
      num_max = std::max(num_max, dim);
    }
  }

  // Limit of the proportion: mass ratio at the top dimension; numerators
  // concentrated strictly below the denominator's dimension vanish.
  Rat gamma() const {
    if (num_max < 0) return Rat(0);
    if (num_max < den_max) return Rat(0);
    return num_by_dim[num_max] / den_by_dim[den_max];
  }
};

}  // namespace

FPtr Eliminator::eliminate_comparison(const FPtr& comp, const std::vector<std::string>& xs,
                                      ComparisonAnalysis* analysis) {
  if (comp->kind != Kind::Compare)
    throw std::invalid_argument("comparison step needs a comparison node");
  for (const FPtr& part : {comp->num1, comp->den1, comp->num2, comp->den2})
    if (!is_quantifier_free(part))
      throw std::logic_error("comparison step needs quantifier-free subformulas");
  const auto& ys = comp->vars;
  {
    std::set<std::string> bound(ys.begin(), ys.end());
    for (const auto& x : xs)
      if (bound.count(x)) throw std::invalid_argument("bound variable listed in xs: " + x);
    std::set<std::string> scope(xs.begin(), xs.end());
    for (const auto& v : free_vars(comp))
      if (!scope.count(v))
        throw std::invalid_argument("comparison variable outside xs: " + v);
  }

  CostTally tally;
  Signature sig = net_.signature();
  std::vector<std::string> vars = xs;
  vars.insert(vars.end(), ys.begin(), ys.end());
  int max_dim = static_cast<int>(ys.size());

  std::size_t nbases = 1;  // virtual base when xs is empty
  std::vector<AtomicType> bases;
  std::map<std::string, std::size_t> base_index;
  std::vector<char> alive;
  if (!xs.empty()) {
    bases = enumerate_types(sig, xs);
    nbases = bases.size();
    alive.assign(nbases, 0);
    for (std::size_t i = 0; i < nbases; ++i) {
      base_index[type_key(bases[i])] = i;
      ++tally.arith;
      ++tally.num_cmp;
      alive[i] = msf_p(*table_, bases[i]) > 0;
    }
  } else {
    alive.assign(1, 1);
  }

  std::vector<SideAccum> left(nbases, SideAccum(max_dim));
  std::vector<SideAccum> right(nbases, SideAccum(max_dim));

  for (const auto& p : enumerate_types(sig, vars)) {
    tally.lit_cmp += p.lits.size();
    bool in_d1 = type_satisfies(p, comp->den1);
    bool in_d2 = type_satisfies(p, comp->den2);
    if (!in_d1 && !in_d2) continue;

    std::size_t i = 0;
    Rat denom(1);
    if (!xs.empty()) {
      AtomicType q = restrict_type(p, sig, xs);
      i = base_index.at(type_key(q));
      if (!alive[i]) continue;
      denom = msf_p(*table_, bases[i]);
    }
    ++tally.arith;
    ++tally.num_cmp;
    Rat mp = msf_p(*table_, p);
    if (mp == 0) continue;
    Rat cond = mp / denom;
    ++tally.arith;
    int dim = dimension(p, ys);

    if (in_d1) {
      tally.lit_cmp += p.lits.size();
      left[i].feed(dim, cond, type_satisfies(p, comp->num1));
      ++tally.arith;
    }
    if (in_d2) {
      tally.lit_cmp += p.lits.size();
      right[i].feed(dim, cond, type_satisfies(p, comp->num2));
      ++tally.arith;
    }
  }

  std::vector<std::size_t> retained;
  std::vector<FPtr> ds;
  ComparisonAnalysis local;
  for (std::size_t i = 0; i < nbases; ++i) {
    if (!alive[i]) continue;
    bool has_left = left[i].den_alive, has_right = right[i].den_alive;
    if (!has_left && !has_right) continue;
    Rat g = has_left ? left[i].gamma() : Rat(0);
    Rat gs = has_right ? right[i].gamma() : Rat(0);
    tally.arith += 2;
    if (has_left) {
      local.bases.push_back(xs.empty() ? AtomicType{} : bases[i]);
      local.gamma.push_back(g);
    }
    if (has_right) {
      local.bases_star.push_back(xs.empty() ? AtomicType{} : bases[i]);
      local.gamma_star.push_back(gs);
    }
    // Both conditioning sets must survive, else the comparison is false on
    // this base.
    if (!has_left || !has_right) continue;
    ++tally.num_cmp;
    Rat lhs = comp->r_side == RSide::Left ? comp->r + g : g;
    Rat rhs = comp->r_side == RSide::Left ? gs : gs + comp->r;
    if (lhs == rhs)
      throw std::domain_error(
          "comparison margin is critical at a base type (r=" + rat_str(comp->r) + ")");
    if (lhs > rhs) {
      retained.push_back(local.bases.size() - 1);
      if (!xs.empty()) ds.push_back(type_formula(bases[i]));
    }
  }

  local.retained = retained;
  local.tally = tally;
  add(cost_, tally);
  if (analysis) *analysis = std::move(local);

  if (xs.empty()) return retained.empty() ? f_not(f_top()) : f_top();
  return f_or_all(ds);
}

// ── Limits ──────────────────────────────────────────────────────────────────

namespace {

std::vector<int> parse_pattern(const std::string& pattern,
                               const std::vector<std::string>& fv) {
  std::map<std::string, std::string> root;
  for (const auto& v : fv) root[v] = v;
  auto find = [&](std::string v) {
    while (root.at(v) != v) v = root.at(v);
    return v;
  };
  if (pattern != "distinct" && !pattern.empty()) {
    std::size_t pos = 0;
    while (pos < pattern.size()) {
      std::size_t comma = pattern.find(',', pos);
      std::string part = pattern.substr(pos, comma == std::string::npos ? std::string::npos
                                                                        : comma - pos);
      std::size_t eq = part.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("pattern needs var=var pairs or \"distinct\"");
      auto trim = [](std::string s) {
        s.erase(0, s.find_first_not_of(" \t"));
        s.erase(s.find_last_not_of(" \t") + 1);
        return s;
      };
      std::string a = trim(part.substr(0, eq)), b = trim(part.substr(eq + 1));
      if (!root.count(a)) throw std::invalid_argument("pattern variable not free: " + a);
      if (!root.count(b)) throw std::invalid_argument("pattern variable not free: " + b);
      root[find(a)] = find(b);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  }
  std::vector<int> rgs;
  std::map<std::string, int> cls;
  for (const auto& v : fv) {
    std::string r = find(v);
    auto it = cls.find(r);
    if (it == cls.end()) it = cls.emplace(r, static_cast<int>(cls.size())).first;
    rgs.push_back(it->second);
  }
  return rgs;
}

}  // namespace

Rat Eliminator::limit_probability(const FPtr& f, const std::string& pattern) {
  FPtr star = eliminate(f);
  auto fv = free_vars(f);
  if (fv.empty()) return formula_equal(star, f_top()) ? Rat(1) : Rat(0);
  std::vector<int> pat = parse_pattern(pattern, fv);
  Rat d = 0;
  for (const auto& t : type_disjunction(star, net_.signature(), fv))
    if (t.cls == pat) d += msf_p(*table_, t);
  return d;
}

// ── Network-level wrappers ──────────────────────────────────────────────────

CriticalSet critical_numbers(const Network& net, int m, int m_bound, int k) {
  Eliminator e(net, k);
  return critical_numbers(e.table(), m, m_bound);
}

NoncriticalReport is_noncritical(const Network& net, const FPtr& f, int k) {
  Eliminator e(net, k);
  return is_noncritical(e.table(), f, k);
}

std::optional<Rat> epsilon_margin(const Network& net, const FPtr& f, int k) {
  Eliminator e(net, k);
  return epsilon_margin(e.table(), f, k);
}

}  // namespace cpl

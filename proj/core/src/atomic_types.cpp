#include <cpl/atomic_types.hpp>

#include <algorithm>
#include <set>
#include <stdexcept>

namespace cpl {

namespace {

// Power c^k for small ints.
std::size_t ipow(std::size_t c, int k) {
  std::size_t r = 1;
  while (k-- > 0) r *= c;
  return r;
}

// Atoms for each relation start at offsets[rel]; offsets.back() = total.
std::vector<std::size_t> atom_offsets(const Signature& sig, int classes) {
  std::vector<std::size_t> off(sig.relations.size() + 1, 0);
  for (std::size_t i = 0; i < sig.relations.size(); ++i)
    off[i + 1] = off[i] + ipow(classes, sig.relations[i].arity);
  return off;
}

std::size_t atom_index(const Signature& sig, int classes, int rel,
                       const std::vector<int>& tuple) {
  std::size_t idx = 0;
  for (int t : tuple) idx = idx * classes + static_cast<std::size_t>(t);
  return atom_offsets(sig, classes)[rel] + idx;
}

}  // namespace

int AtomicType::classes() const {
  int c = 0;
  for (int x : cls) c = std::max(c, x + 1);
  return c;
}

const std::string& AtomicType::rep(int cls_index) const {
  const std::string* best = nullptr;
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (cls[i] == cls_index && (!best || vars[i] < *best)) best = &vars[i];
  if (!best) throw std::out_of_range("class index out of range");
  return *best;
}

std::vector<AtomicType> enumerate_types(const Signature& sig,
                                        const std::vector<std::string>& vars) {
  if (vars.empty()) throw std::invalid_argument("type over empty variable tuple");
  {
    std::set<std::string> uniq(vars.begin(), vars.end());
    if (uniq.size() != vars.size())
      throw std::invalid_argument("repeated variable in type tuple");
  }
  // All restricted-growth strings over |vars| positions, lexicographic.
  std::vector<std::vector<int>> parts;
  std::vector<int> rgs(vars.size(), 0);
  auto gen = [&](auto&& self, std::size_t i, int mx) -> void {
    if (i == vars.size()) {
      parts.push_back(rgs);
      return;
    }
    for (int c = 0; c <= mx + 1; ++c) {
      rgs[i] = c;
      self(self, i + 1, std::max(mx, c));
    }
  };
  rgs[0] = 0;
  gen(gen, 1, 0);

  // Explosion guard: refuse before allocating, not after.
  constexpr std::size_t kMaxTypes = 1u << 18;
  std::size_t total = 0;
  for (const auto& part : parts) {
    int classes = *std::max_element(part.begin(), part.end()) + 1;
    std::size_t natoms = atom_offsets(sig, classes).back();
    total += natoms >= 18 ? kMaxTypes + 1 : (std::size_t{1} << natoms);
    if (total > kMaxTypes)
      throw std::domain_error("type space too large to enumerate (over " +
                              std::to_string(kMaxTypes) + " types)");
  }

  std::vector<AtomicType> out;
  out.reserve(total);
  for (const auto& part : parts) {
    int classes = *std::max_element(part.begin(), part.end()) + 1;
    std::size_t natoms = atom_offsets(sig, classes).back();
    for (std::size_t mask = 0; mask < (std::size_t{1} << natoms); ++mask) {
      AtomicType t{sig, vars, part, std::vector<bool>(natoms)};
      for (std::size_t a = 0; a < natoms; ++a) t.lits[a] = (mask >> a) & 1;
      out.push_back(std::move(t));
    }
  }
  return out;
}

int dimension(const AtomicType& p, const std::vector<std::string>& ys) {
  std::set<std::string> in_ys(ys.begin(), ys.end());
  int c = p.classes();
  std::vector<bool> has_y(c, false), has_other(c, false);
  for (std::size_t i = 0; i < p.vars.size(); ++i) {
    if (in_ys.count(p.vars[i])) has_y[p.cls[i]] = true;
    else has_other[p.cls[i]] = true;
  }
  int d = 0;
  for (int k = 0; k < c; ++k)
    if (has_y[k] && !has_other[k]) ++d;
  return d;
}

AtomicType restrict_type(const AtomicType& p, const Signature& sub,
                         const std::vector<std::string>& xs) {
  if (!p.sig.contains_all(sub))
    throw std::invalid_argument("restriction signature is not a subsignature");
  std::set<std::string> keep(xs.begin(), xs.end());
  for (const auto& x : xs)
    if (std::find(p.vars.begin(), p.vars.end(), x) == p.vars.end())
      throw std::invalid_argument("restriction variable not in type: " + x);

  AtomicType q;
  q.sig = sub;
  std::vector<int> new_of_old(p.classes(), -1);
  int next = 0;
  for (std::size_t i = 0; i < p.vars.size(); ++i) {
    if (!keep.count(p.vars[i])) continue;
    q.vars.push_back(p.vars[i]);
    int& m = new_of_old[p.cls[i]];
    if (m < 0) m = next++;
    q.cls.push_back(m);
  }
  if (q.vars.empty()) throw std::invalid_argument("restriction to empty tuple");

  // old class for each new class
  std::vector<int> old_of_new(next, -1);
  for (int oc = 0; oc < static_cast<int>(new_of_old.size()); ++oc)
    if (new_of_old[oc] >= 0) old_of_new[new_of_old[oc]] = oc;

  std::size_t natoms = atom_offsets(sub, next).back();
  q.lits.assign(natoms, false);
  for (std::size_t r = 0; r < sub.relations.size(); ++r) {
    int old_rel = p.sig.find(sub.relations[r].name);
    int k = sub.relations[r].arity;
    std::vector<int> tup(k, 0);
    for (;;) {
      std::vector<int> old_tup(k);
      for (int i = 0; i < k; ++i) old_tup[i] = old_of_new[tup[i]];
      q.lits[atom_index(sub, next, static_cast<int>(r), tup)] =
          p.lits[atom_index(p.sig, p.classes(), old_rel, old_tup)];
      int i = k - 1;
      while (i >= 0 && ++tup[i] == next) tup[i--] = 0;
      if (i < 0) break;
    }
  }
  return q;
}

namespace {

bool sat(const AtomicType& p, int classes, const Formula& f,
         const std::map<std::string, int>& env) {
  auto cls_of = [&](const std::string& v) {
    auto it = env.find(v);
    if (it == env.end())
      throw std::invalid_argument("variable not bound in type environment: " + v);
    return it->second;
  };
  switch (f.kind) {
    case Kind::Top: return true;
    case Kind::Equal: return cls_of(f.vars[0]) == cls_of(f.vars[1]);
    case Kind::Atom: {
      int rel = p.sig.find(f.rel);
      if (rel < 0) throw std::invalid_argument("relation not in type signature: " + f.rel);
      std::vector<int> tup(f.vars.size());
      for (std::size_t i = 0; i < f.vars.size(); ++i) tup[i] = cls_of(f.vars[i]);
      return p.lits[atom_index(p.sig, classes, rel, tup)];
    }
    case Kind::Not: return !sat(p, classes, *f.a, env);
    case Kind::And: return sat(p, classes, *f.a, env) && sat(p, classes, *f.b, env);
    case Kind::Or: return sat(p, classes, *f.a, env) || sat(p, classes, *f.b, env);
    case Kind::Implies: return !sat(p, classes, *f.a, env) || sat(p, classes, *f.b, env);
    case Kind::Iff: return sat(p, classes, *f.a, env) == sat(p, classes, *f.b, env);
    case Kind::Exists:
    case Kind::Compare:
      throw std::logic_error("type satisfaction needs a quantifier-free formula");
  }
  return false;
}

}  // namespace

bool type_satisfies_env(const AtomicType& p, const FPtr& f,
                        const std::map<std::string, int>& env) {
  return sat(p, p.classes(), *f, env);
}

bool type_satisfies(const AtomicType& p, const FPtr& f) {
  std::map<std::string, int> env;
  for (std::size_t i = 0; i < p.vars.size(); ++i) env[p.vars[i]] = p.cls[i];
  return sat(p, p.classes(), *f, env);
}

FPtr type_formula(const AtomicType& p) {
  std::vector<FPtr> lits;
  for (std::size_t i = 0; i < p.vars.size(); ++i)
    for (std::size_t j = i + 1; j < p.vars.size(); ++j) {
      FPtr eq = f_equal(p.vars[i], p.vars[j]);
      lits.push_back(p.cls[i] == p.cls[j] ? eq : f_not(eq));
    }
  int classes = p.classes();
  for (std::size_t r = 0; r < p.sig.relations.size(); ++r) {
    int k = p.sig.relations[r].arity;
    std::vector<int> tup(k, 0);
    for (;;) {
      std::vector<std::string> args(k);
      for (int i = 0; i < k; ++i) args[i] = p.rep(tup[i]);
      FPtr atom = f_atom(p.sig.relations[r].name, std::move(args));
      bool val = p.lits[atom_index(p.sig, classes, static_cast<int>(r), tup)];
      lits.push_back(val ? atom : f_not(atom));
      int i = k - 1;
      while (i >= 0 && ++tup[i] == classes) tup[i--] = 0;
      if (i < 0) break;
    }
  }
  return f_and_all(lits);
}

std::vector<AtomicType> type_disjunction(const FPtr& f, const Signature& sig,
                                         const std::vector<std::string>& vars) {
  std::vector<AtomicType> out;
  for (auto& t : enumerate_types(sig, vars))
    if (type_satisfies(t, f)) out.push_back(std::move(t));
  return out;
}

bool type_literal(const AtomicType& p, const std::string& rel,
                  const std::vector<int>& cls_tuple) {
  int r = p.sig.find(rel);
  if (r < 0) throw std::invalid_argument("relation not in type signature: " + rel);
  int c = p.classes();
  for (int t : cls_tuple)
    if (t < 0 || t >= c) throw std::out_of_range("class index out of range");
  return p.lits[atom_index(p.sig, c, r, cls_tuple)];
}

std::string type_key(const AtomicType& p) {
  std::string k;
  for (const auto& sym : p.sig.relations) {
    k += sym.name;
    k += '/';
    k += std::to_string(sym.arity);
    k += ';';
  }
  k += '|';
  for (int c : p.cls) {
    k += std::to_string(c);
    k += '.';
  }
  k += '|';
  for (bool b : p.lits) k += b ? '1' : '0';
  return k;
}

bool same_type(const AtomicType& a, const AtomicType& b) {
  return a.cls == b.cls && a.lits == b.lits && a.sig == b.sig;
}

}  // namespace cpl

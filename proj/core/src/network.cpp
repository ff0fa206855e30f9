#include <cpl/network.hpp>

#include <cpl/atomic_types.hpp>
#include <cpl/evaluator.hpp>

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace cpl {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

const RelationDef& Network::rel(const std::string& name) const {
  for (const auto& r : relations)
    if (r.name == name) return r;
  throw std::invalid_argument("unknown relation: " + name);
}

bool Network::has(const std::string& name) const {
  for (const auto& r : relations)
    if (r.name == name) return true;
  return false;
}

Signature Network::signature() const {
  std::vector<RelSym> syms;
  for (const auto& r : relations) syms.push_back({r.name, r.arity});
  return Signature(std::move(syms));
}

// ── Guard inspection ────────────────────────────────────────────────────────

namespace {

void collect_relations(const Formula& f, std::set<std::string>& out) {
  switch (f.kind) {
    case Kind::Atom: out.insert(f.rel); return;
    case Kind::Not:
    case Kind::Exists: collect_relations(*f.a, out); return;
    case Kind::And:
    case Kind::Or:
    case Kind::Implies:
    case Kind::Iff:
      collect_relations(*f.a, out);
      collect_relations(*f.b, out);
      return;
    case Kind::Compare:
      collect_relations(*f.num1, out);
      collect_relations(*f.den1, out);
      collect_relations(*f.num2, out);
      collect_relations(*f.den2, out);
      return;
    default: return;
  }
}

std::vector<std::string> tuple_vars(int arity) {
  std::vector<std::string> vs;
  for (int i = 1; i <= arity; ++i) vs.push_back("x" + std::to_string(i));
  return vs;
}

// Scope errors for one relation's guards; empty when clean.
std::vector<std::string> scope_errors(const Network& net, const RelationDef& r) {
  std::vector<std::string> errs;
  std::set<std::string> par(r.parents.begin(), r.parents.end());
  for (const auto& p : r.parents)
    if (!net.has(p)) errs.push_back("unknown parent '" + p + "'");
  const auto tv = tuple_vars(r.arity);
  std::set<std::string> allowed_vars(tv.begin(), tv.end());
  for (std::size_t i = 0; i < r.rules.size(); ++i) {
    const Rule& rule = r.rules[i];
    if (rule.prob < 0 || rule.prob > 1)
      errs.push_back("rule " + std::to_string(i) + ": probability " +
                     rat_str(rule.prob) + " outside [0,1]");
    std::set<std::string> rels;
    collect_relations(*rule.guard, rels);
    for (const auto& s : rels)
      if (!par.count(s))
        errs.push_back("rule " + std::to_string(i) + ": guard mentions non-parent '" +
                       s + "'");
    for (const auto& v : free_vars(rule.guard))
      if (!allowed_vars.count(v))
        errs.push_back("rule " + std::to_string(i) + ": guard has free variable '" + v +
                       "' beyond x1..x" + std::to_string(r.arity));
  }
  return errs;
}

}  // namespace

// ── JSON I/O ────────────────────────────────────────────────────────────────

Network load_network(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad network JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("relations") || !j["relations"].is_array())
    throw std::invalid_argument("network JSON needs a \"relations\" array");

  // First pass: declared symbols, so guards can be parsed against the full
  // signature (scope narrowing to parents is checked afterwards).
  std::vector<RelSym> syms;
  for (const auto& rj : j["relations"]) {
    if (!rj.contains("name") || !rj["name"].is_string())
      throw std::invalid_argument("relation entry without a name");
    if (!rj.contains("arity") || !rj["arity"].is_number_integer())
      throw std::invalid_argument("relation entry without an integer arity");
    int arity = rj["arity"].get<int>();
    if (arity < 1)
      throw std::invalid_argument("relation arity must be >= 1: " +
                                  rj["name"].get<std::string>());
    syms.push_back({rj["name"].get<std::string>(), arity});
  }
  Signature sig(syms);  // throws on duplicates

  Network net;
  for (const auto& rj : j["relations"]) {
    RelationDef def;
    def.name = rj["name"].get<std::string>();
    def.arity = rj["arity"].get<int>();
    if (rj.contains("parents")) {
      if (!rj["parents"].is_array())
        throw std::invalid_argument(def.name + ": \"parents\" must be an array");
      for (const auto& p : rj["parents"]) {
        if (!p.is_string())
          throw std::invalid_argument(def.name + ": parent names must be strings");
        def.parents.push_back(p.get<std::string>());
      }
    }
    if (!rj.contains("rules") || !rj["rules"].is_array() || rj["rules"].empty())
      throw std::invalid_argument(def.name + ": nonempty \"rules\" array required");
    for (const auto& uj : rj["rules"]) {
      if (!uj.contains("guard") || !uj["guard"].is_string())
        throw std::invalid_argument(def.name + ": rule without a guard string");
      if (!uj.contains("prob"))
        throw std::invalid_argument(def.name + ": rule without a prob");
      Rule rule;
      try {
        rule.guard = parse(uj["guard"].get<std::string>(), sig);
      } catch (const std::exception& e) {
        throw std::invalid_argument(def.name + ": bad guard: " + e.what());
      }
      if (uj["prob"].is_string())
        rule.prob = parse_rat(uj["prob"].get<std::string>());
      else if (uj["prob"].is_number_integer())
        rule.prob = Rat(uj["prob"].get<long>());
      else
        throw std::invalid_argument(def.name +
                                    ": prob must be a rational string or integer");
      def.rules.push_back(std::move(rule));
    }
    net.relations.push_back(std::move(def));
  }

  for (const auto& r : net.relations)
    for (const auto& e : scope_errors(net, r))
      throw std::invalid_argument(r.name + ": " + e);
  return net;
}

Network load_network_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open network file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_network(ss.str());
}

std::string network_to_json(const Network& net) {
  ojson rels = ojson::array();
  for (const auto& r : net.relations) {
    ojson rj;
    rj["name"] = r.name;
    rj["arity"] = r.arity;
    rj["parents"] = r.parents;
    ojson rules = ojson::array();
    for (const auto& u : r.rules) {
      ojson uj;
      uj["guard"] = render(u.guard);
      uj["prob"] = rat_str(u.prob);
      rules.push_back(std::move(uj));
    }
    rj["rules"] = std::move(rules);
    rels.push_back(std::move(rj));
  }
  ojson j;
  j["relations"] = std::move(rels);
  return j.dump(2);
}

// ── Validation ──────────────────────────────────────────────────────────────

namespace {

// Returns a cycle as "A -> B -> A", or empty if acyclic.
std::string find_cycle(const Network& net) {
  std::map<std::string, int> state;  // 0 new, 1 active, 2 done
  std::vector<std::string> stack;
  std::string cycle;
  auto dfs = [&](auto&& self, const std::string& v) -> bool {
    state[v] = 1;
    stack.push_back(v);
    if (net.has(v)) {
      for (const auto& p : net.rel(v).parents) {
        if (!net.has(p)) continue;
        if (state[p] == 1) {
          auto it = std::find(stack.begin(), stack.end(), p);
          for (auto j = it; j != stack.end(); ++j) cycle += *j + " -> ";
          cycle += p;
          return true;
        }
        if (state[p] == 0 && self(self, p)) return true;
      }
    }
    stack.pop_back();
    state[v] = 2;
    return false;
  };
  for (const auto& r : net.relations)
    if (state[r.name] == 0 && dfs(dfs, r.name)) return cycle;
  return "";
}

Signature parent_signature(const Network& net, const RelationDef& r) {
  std::vector<RelSym> syms;
  for (const auto& p : r.parents) syms.push_back({p, net.rel(p).arity});
  return Signature(std::move(syms));
}

// Exhaustiveness/exclusivity of quantifier-free guards, checked exactly over
// complete parent-types of the argument tuple.
void check_rules_qf(const Network& net, const RelationDef& r,
                    std::vector<Violation>& out) {
  Signature psig = parent_signature(net, r);
  for (const auto& t : enumerate_types(psig, tuple_vars(r.arity))) {
    int hits = 0;
    for (const auto& rule : r.rules)
      if (type_satisfies(t, rule.guard)) ++hits;
    if (hits != 1)
      out.push_back({r.name, hits == 0 ? "gap" : "overlap", render(type_formula(t))});
  }
}

// General case: enumerate parent-structures of size 1..n_check and argument
// tuples.  Bounded work: sizes whose world count would exceed the budget are
// skipped (exactness then rests on the sizes that were checked).
void check_rules_general(const Network& net, const RelationDef& r, int n_check,
                         std::vector<Violation>& out) {
  Signature psig = parent_signature(net, r);
  for (int n = 1; n <= n_check; ++n) {
    std::size_t natoms = 0;
    std::vector<std::pair<std::string, std::vector<int>>> atoms;
    for (const auto& sym : psig.relations) {
      std::vector<int> tup(sym.arity, 1);
      for (;;) {
        atoms.emplace_back(sym.name, tup);
        int i = sym.arity - 1;
        while (i >= 0 && ++tup[i] > n) tup[i--] = 1;
        if (i < 0) break;
      }
    }
    natoms = atoms.size();
    double worlds = natoms >= 63 ? 1e30 : static_cast<double>(1ull << natoms);
    if (worlds * n > 4e6) continue;  // budget guard

    std::vector<int> tup(r.arity, 1);
    for (std::size_t mask = 0; mask < (std::size_t{1} << natoms); ++mask) {
      Structure A;
      A.n = n;
      for (std::size_t a = 0; a < natoms; ++a)
        if ((mask >> a) & 1) A.interp[atoms[a].first].insert(atoms[a].second);
      std::fill(tup.begin(), tup.end(), 1);
      for (;;) {
        Assignment asg;
        for (int i = 0; i < r.arity; ++i) asg["x" + std::to_string(i + 1)] = tup[i];
        int hits = 0;
        for (const auto& rule : r.rules)
          if (evaluate(A, rule.guard, asg)) ++hits;
        if (hits != 1) {
          std::string tuple_txt = "(";
          for (int i = 0; i < r.arity; ++i)
            tuple_txt += (i ? "," : "") + std::to_string(tup[i]);
          tuple_txt += ")";
          out.push_back({r.name, hits == 0 ? "gap" : "overlap",
                         structure_to_json(A) + " at " + tuple_txt});
          // One witness per structure size keeps reports readable.
          goto next_size;
        }
        int i = r.arity - 1;
        while (i >= 0 && ++tup[i] > n) tup[i--] = 1;
        if (i < 0) break;
      }
    }
  next_size:;
  }
}

}  // namespace

ValidationReport validate(const Network& net, int n_check) {
  ValidationReport rep;
  auto add = [&rep](std::string rel, std::string kind, std::string wit) {
    rep.ok = false;
    rep.violations.push_back({std::move(rel), std::move(kind), std::move(wit)});
  };

  std::set<std::string> seen;
  for (const auto& r : net.relations) {
    if (!seen.insert(r.name).second) add(r.name, "scope", "duplicate relation name");
    if (r.arity < 1) add(r.name, "scope", "arity must be >= 1");
    if (r.rules.empty()) add(r.name, "scope", "no rules");
    for (const auto& e : scope_errors(net, r)) add(r.name, "scope", e);
  }

  std::string cycle = find_cycle(net);
  if (!cycle.empty())
    add(cycle.substr(0, cycle.find(' ')), "cycle", cycle);

  if (!rep.ok) return rep;  // guard checks assume a structurally sane net

  for (const auto& r : net.relations) {
    bool all_qf = std::all_of(r.rules.begin(), r.rules.end(), [](const Rule& u) {
      return is_quantifier_free(u.guard);
    });
    try {
      if (all_qf) check_rules_qf(net, r, rep.violations);
      else check_rules_general(net, r, n_check, rep.violations);
    } catch (const std::exception& e) {
      rep.violations.push_back({r.name, "scope", e.what()});
    }
  }
  rep.ok = rep.violations.empty();
  return rep;
}

// ── Stratification ──────────────────────────────────────────────────────────

namespace {

int rank_of(const Network& net, const std::string& name,
            std::map<std::string, int>& memo, std::set<std::string>& active) {
  auto it = memo.find(name);
  if (it != memo.end()) return it->second;
  if (!active.insert(name).second)
    throw std::domain_error("parent cycle through " + name);
  int best = 0;
  // Children: relations that list `name` as a parent.
  for (const auto& s : net.relations)
    for (const auto& p : s.parents)
      if (p == name) best = std::max(best, 1 + rank_of(net, s.name, memo, active));
  active.erase(name);
  memo[name] = best;
  return best;
}

}  // namespace

int mp_rank(const Network& net, const std::string& relation) {
  if (!net.has(relation)) throw std::invalid_argument("unknown relation: " + relation);
  std::map<std::string, int> memo;
  std::set<std::string> active;
  return rank_of(net, relation, memo, active);
}

std::vector<Signature> strata(const Network& net) {
  std::map<std::string, int> memo;
  std::set<std::string> active;
  int rho = 0;
  for (const auto& r : net.relations)
    rho = std::max(rho, rank_of(net, r.name, memo, active));
  std::vector<Signature> out;
  for (int i = 0; i <= rho; ++i) {
    std::vector<RelSym> syms;
    for (const auto& r : net.relations)
      if (memo[r.name] >= rho - i) syms.push_back({r.name, r.arity});
    out.emplace_back(std::move(syms));
  }
  return out;
}

std::vector<std::string> parent_closure(const Network& net,
                                        const std::vector<std::string>& names) {
  std::set<std::string> closed;
  std::vector<std::string> todo = names;
  while (!todo.empty()) {
    std::string v = todo.back();
    todo.pop_back();
    if (!closed.insert(v).second) continue;
    for (const auto& p : net.rel(v).parents) todo.push_back(p);
  }
  // Net order, for determinism.
  std::vector<std::string> out;
  for (const auto& r : net.relations)
    if (closed.count(r.name)) out.push_back(r.name);
  if (out.size() != closed.size())
    throw std::invalid_argument("closure contains unknown relations");
  return out;
}

Network subnetwork(const Network& net, const std::vector<std::string>& names) {
  std::set<std::string> keep(names.begin(), names.end());
  for (const auto& n : names)
    if (!net.has(n)) throw std::invalid_argument("unknown relation: " + n);
  for (const auto& n : names)
    for (const auto& p : net.rel(n).parents)
      if (!keep.count(p))
        throw std::invalid_argument("relation set is not parent-closed: " + n +
                                    " needs " + p);
  Network sub;
  for (const auto& r : net.relations)
    if (keep.count(r.name)) sub.relations.push_back(r);
  return sub;
}

}  // namespace cpl

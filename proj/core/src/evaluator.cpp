#include <cpl/evaluator.hpp>

#include <json.hpp>

#include <stdexcept>

namespace cpl {

using json = nlohmann::json;

bool Structure::holds(const std::string& rel, const std::vector<int>& tuple) const {
  auto it = interp.find(rel);
  return it != interp.end() && it->second.count(tuple) > 0;
}

Structure structure_from_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad structure JSON: ") + e.what());
  }
  Structure s;
  if (!j.is_object() || !j.contains("n") || !j["n"].is_number_integer())
    throw std::invalid_argument("structure JSON needs an integer field \"n\"");
  s.n = j["n"].get<int>();
  if (s.n < 0) throw std::invalid_argument("structure domain size must be >= 0");
  if (j.contains("relations")) {
    if (!j["relations"].is_object())
      throw std::invalid_argument("\"relations\" must be an object");
    for (auto& [name, tuples] : j["relations"].items()) {
      auto& set = s.interp[name];
      if (!tuples.is_array())
        throw std::invalid_argument("relation " + name + " must map to an array");
      for (auto& t : tuples) {
        if (!t.is_array())
          throw std::invalid_argument("tuples of " + name + " must be arrays");
        std::vector<int> tup;
        for (auto& e : t) {
          if (!e.is_number_integer())
            throw std::invalid_argument("tuple elements must be integers");
          int v = e.get<int>();
          if (v < 1 || v > s.n)
            throw std::invalid_argument("tuple element outside 1.." +
                                        std::to_string(s.n) + " in " + name);
          tup.push_back(v);
        }
        if (tup.empty())
          throw std::invalid_argument("empty tuple in relation " + name);
        set.insert(std::move(tup));
      }
    }
  }
  return s;
}

std::string structure_to_json(const Structure& s) {
  json rels = json::object();
  for (const auto& [name, tuples] : s.interp) {
    json arr = json::array();
    for (const auto& t : tuples) arr.push_back(t);
    rels[name] = std::move(arr);
  }
  json j;
  j["n"] = s.n;
  j["relations"] = std::move(rels);
  return j.dump(2);
}

namespace {

bool eval(const Structure& A, const Formula& f, Assignment& asg);

int lookup(const Assignment& asg, const std::string& v) {
  auto it = asg.find(v);
  if (it == asg.end())
    throw std::invalid_argument("unassigned free variable: " + v);
  return it->second;
}

// Iterates asg extensions over vars through [1..n]^|vars|, calling fn; stops
// early when fn returns false.  Restores/erases extension entries on exit.
template <class Fn>
void for_each_extension(const Structure& A, Assignment& asg,
                        const std::vector<std::string>& vars, Fn&& fn) {
  std::vector<std::pair<bool, int>> saved;  // (had value, old value)
  saved.reserve(vars.size());
  for (const auto& v : vars) {
    auto it = asg.find(v);
    saved.emplace_back(it != asg.end(), it != asg.end() ? it->second : 0);
  }
  std::vector<int> tup(vars.size(), 1);
  bool go = A.n > 0;
  while (go) {
    for (std::size_t i = 0; i < vars.size(); ++i) asg[vars[i]] = tup[i];
    if (!fn(static_cast<const std::vector<int>&>(tup))) break;
    int i = static_cast<int>(vars.size()) - 1;
    while (i >= 0 && ++tup[i] > A.n) tup[i--] = 1;
    if (i < 0) go = false;
  }
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (saved[i].first) asg[vars[i]] = saved[i].second;
    else asg.erase(vars[i]);
  }
}

bool eval_compare(const Structure& A, const Formula& f, Assignment& asg) {
  long long n1 = 0, d1 = 0, n2 = 0, d2 = 0;
  for_each_extension(A, asg, f.vars, [&](const std::vector<int>&) {
    if (eval(A, *f.den1, asg)) {
      ++d1;
      if (eval(A, *f.num1, asg)) ++n1;
    }
    if (eval(A, *f.den2, asg)) {
      ++d2;
      if (eval(A, *f.num2, asg)) ++n2;
    }
    return true;
  });
  // Both conditioning sets must be witnessed, else the comparison is false
  // regardless of which side the margin sits on.
  if (d1 == 0 || d2 == 0) return false;
  Rat lhs = make_rat(n1, d1), rhs = make_rat(n2, d2);
  return f.r_side == RSide::Left ? f.r + lhs >= rhs : lhs >= rhs + f.r;
}

bool eval(const Structure& A, const Formula& f, Assignment& asg) {
  switch (f.kind) {
    case Kind::Top: return true;
    case Kind::Atom: {
      std::vector<int> tup(f.vars.size());
      for (std::size_t i = 0; i < f.vars.size(); ++i) tup[i] = lookup(asg, f.vars[i]);
      return A.holds(f.rel, tup);
    }
    case Kind::Equal: return lookup(asg, f.vars[0]) == lookup(asg, f.vars[1]);
    case Kind::Not: return !eval(A, *f.a, asg);
    case Kind::And: return eval(A, *f.a, asg) && eval(A, *f.b, asg);
    case Kind::Or: return eval(A, *f.a, asg) || eval(A, *f.b, asg);
    case Kind::Implies: return !eval(A, *f.a, asg) || eval(A, *f.b, asg);
    case Kind::Iff: return eval(A, *f.a, asg) == eval(A, *f.b, asg);
    case Kind::Exists: {
      bool found = false;
      for_each_extension(A, asg, f.vars, [&](const std::vector<int>&) {
        found = eval(A, *f.a, asg);
        return !found;
      });
      return found;
    }
    case Kind::Compare: return eval_compare(A, f, asg);
  }
  return false;
}

}  // namespace

bool evaluate(const Structure& A, const FPtr& f, const Assignment& asg) {
  for (const auto& [v, e] : asg)
    if (e < 1 || e > A.n)
      throw std::domain_error("assignment maps " + v + " outside 1.." +
                              std::to_string(A.n));
  Assignment work = asg;
  return eval(A, *f, work);
}

std::vector<std::vector<int>> solution_set(const Structure& A, const FPtr& f,
                                           const Assignment& asg,
                                           const std::vector<std::string>& ys) {
  for (const auto& [v, e] : asg)
    if (e < 1 || e > A.n)
      throw std::domain_error("assignment maps " + v + " outside 1.." +
                              std::to_string(A.n));
  Assignment work = asg;
  std::vector<std::vector<int>> out;
  for_each_extension(A, work, ys, [&](const std::vector<int>& tup) {
    if (eval(A, *f, work)) out.push_back(tup);
    return true;
  });
  return out;
}

}  // namespace cpl

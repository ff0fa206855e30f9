#include <cpl/formula.hpp>

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <unordered_set>

namespace cpl {

// ── Signature ───────────────────────────────────────────────────────────────

Signature::Signature(std::vector<RelSym> rels) : relations(std::move(rels)) {
  std::sort(relations.begin(), relations.end(),
            [](const RelSym& a, const RelSym& b) { return a.name < b.name; });
  for (std::size_t i = 0; i < relations.size(); ++i) {
    if (relations[i].arity < 1)
      throw std::invalid_argument("relation arity must be >= 1: " + relations[i].name);
    if (i > 0 && relations[i].name == relations[i - 1].name)
      throw std::invalid_argument("duplicate relation name: " + relations[i].name);
  }
}

int Signature::find(const std::string& name) const {
  for (std::size_t i = 0; i < relations.size(); ++i)
    if (relations[i].name == name) return static_cast<int>(i);
  return -1;
}

int Signature::arity(const std::string& name) const {
  int i = find(name);
  if (i < 0) throw std::invalid_argument("unknown relation: " + name);
  return relations[i].arity;
}

bool Signature::contains_all(const Signature& sub) const {
  for (const auto& r : sub.relations) {
    int i = find(r.name);
    if (i < 0 || relations[i].arity != r.arity) return false;
  }
  return true;
}

// ── Builders ────────────────────────────────────────────────────────────────

static FPtr mk(Formula f) { return std::make_shared<const Formula>(std::move(f)); }

FPtr f_top() {
  static const FPtr t = mk({.kind = Kind::Top});
  return t;
}
FPtr f_atom(std::string rel, std::vector<std::string> args) {
  return mk({.kind = Kind::Atom, .rel = std::move(rel), .vars = std::move(args)});
}
FPtr f_equal(std::string a, std::string b) {
  return mk({.kind = Kind::Equal, .vars = {std::move(a), std::move(b)}});
}
FPtr f_not(FPtr f) { return mk({.kind = Kind::Not, .a = std::move(f)}); }
FPtr f_and(FPtr a, FPtr b) { return mk({.kind = Kind::And, .a = std::move(a), .b = std::move(b)}); }
FPtr f_or(FPtr a, FPtr b) { return mk({.kind = Kind::Or, .a = std::move(a), .b = std::move(b)}); }
FPtr f_implies(FPtr a, FPtr b) {
  return mk({.kind = Kind::Implies, .a = std::move(a), .b = std::move(b)});
}
FPtr f_iff(FPtr a, FPtr b) { return mk({.kind = Kind::Iff, .a = std::move(a), .b = std::move(b)}); }
FPtr f_exists(std::vector<std::string> vars, FPtr body) {
  if (vars.empty()) throw std::invalid_argument("exists with no variables");
  return mk({.kind = Kind::Exists, .vars = std::move(vars), .a = std::move(body)});
}
FPtr f_compare(Rat r, RSide side, FPtr num1, FPtr den1, FPtr num2, FPtr den2,
               std::vector<std::string> bound) {
  if (bound.empty()) throw std::invalid_argument("comparison with no bound variables");
  if (r < 0) throw std::invalid_argument("negative margin in comparison");
  Formula f{.kind = Kind::Compare, .vars = std::move(bound)};
  f.r = std::move(r);
  f.r_side = side;
  f.num1 = std::move(num1);
  f.den1 = std::move(den1);
  f.num2 = std::move(num2);
  f.den2 = std::move(den2);
  return mk(std::move(f));
}

FPtr f_or_all(const std::vector<FPtr>& fs) {
  if (fs.empty()) return f_not(f_top());
  FPtr acc = fs[0];
  for (std::size_t i = 1; i < fs.size(); ++i) acc = f_or(acc, fs[i]);
  return acc;
}
FPtr f_and_all(const std::vector<FPtr>& fs) {
  if (fs.empty()) return f_top();
  FPtr acc = fs[0];
  for (std::size_t i = 1; i < fs.size(); ++i) acc = f_and(acc, fs[i]);
  return acc;
}

// ── Structural equality ─────────────────────────────────────────────────────

bool formula_equal(const FPtr& a, const FPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Kind::Top: return true;
    case Kind::Atom: return a->rel == b->rel && a->vars == b->vars;
    case Kind::Equal: return a->vars == b->vars;
    case Kind::Not: return formula_equal(a->a, b->a);
    case Kind::And:
    case Kind::Or:
    case Kind::Implies:
    case Kind::Iff: return formula_equal(a->a, b->a) && formula_equal(a->b, b->b);
    case Kind::Exists: return a->vars == b->vars && formula_equal(a->a, b->a);
    case Kind::Compare:
      return a->vars == b->vars && a->r == b->r && a->r_side == b->r_side &&
             formula_equal(a->num1, b->num1) && formula_equal(a->den1, b->den1) &&
             formula_equal(a->num2, b->num2) && formula_equal(a->den2, b->den2);
  }
  return false;
}

// ── Lexer ───────────────────────────────────────────────────────────────────

namespace {

enum class Tok {
  Ident, Num, LParen, RParen, LBrack, RBrack, LBrace, RBrace,
  Comma, Colon, Eq, Neq, Tilde, Amp, Pipe, DblPipe, Arrow, DArrow,
  Geq, Plus, Minus, Slash, End,
};

struct Token {
  Tok type;
  std::string text;
  std::size_t pos = 0;
};

[[noreturn]] void lex_fail(std::size_t pos, const std::string& what) {
  throw std::invalid_argument("at position " + std::to_string(pos) + ": " + what);
}

std::vector<Token> lex(const std::string& s) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto push = [&](Tok t, std::size_t start, std::size_t len) {
    out.push_back({t, s.substr(start, len), start});
  };
  while (i < s.size()) {
    char c = s[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') { ++i; continue; }
    if (isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() &&
             (isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      push(Tok::Ident, i, j - i);
      i = j;
      continue;
    }
    if (isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < s.size() && isdigit(static_cast<unsigned char>(s[j]))) ++j;
      if (j < s.size() && s[j] == '.') {
        ++j;
        if (j >= s.size() || !isdigit(static_cast<unsigned char>(s[j])))
          lex_fail(j, "digits expected after decimal point");
        while (j < s.size() && isdigit(static_cast<unsigned char>(s[j]))) ++j;
      }
      push(Tok::Num, i, j - i);
      i = j;
      continue;
    }
    switch (c) {
      case '(': push(Tok::LParen, i, 1); ++i; break;
      case ')': push(Tok::RParen, i, 1); ++i; break;
      case '[': push(Tok::LBrack, i, 1); ++i; break;
      case ']': push(Tok::RBrack, i, 1); ++i; break;
      case '{': push(Tok::LBrace, i, 1); ++i; break;
      case '}': push(Tok::RBrace, i, 1); ++i; break;
      case ',': push(Tok::Comma, i, 1); ++i; break;
      case ':': push(Tok::Colon, i, 1); ++i; break;
      case '=': push(Tok::Eq, i, 1); ++i; break;
      case '~': push(Tok::Tilde, i, 1); ++i; break;
      case '&': push(Tok::Amp, i, 1); ++i; break;
      case '+': push(Tok::Plus, i, 1); ++i; break;
      case '/': push(Tok::Slash, i, 1); ++i; break;
      case '|':
        if (i + 1 < s.size() && s[i + 1] == '|') { push(Tok::DblPipe, i, 2); i += 2; }
        else { push(Tok::Pipe, i, 1); ++i; }
        break;
      case '!':
        if (i + 1 < s.size() && s[i + 1] == '=') { push(Tok::Neq, i, 2); i += 2; }
        else lex_fail(i, "'=' expected after '!'");
        break;
      case '-':
        if (i + 1 < s.size() && s[i + 1] == '>') { push(Tok::Arrow, i, 2); i += 2; }
        else { push(Tok::Minus, i, 1); ++i; }
        break;
      case '<':
        if (i + 2 < s.size() && s[i + 1] == '-' && s[i + 2] == '>') {
          push(Tok::DArrow, i, 3); i += 3;
        } else lex_fail(i, "'<->' expected");
        break;
      case '>':
        if (i + 1 < s.size() && s[i + 1] == '=') { push(Tok::Geq, i, 2); i += 2; }
        else lex_fail(i, "'>=' expected");
        break;
      default: lex_fail(i, std::string("unexpected character '") + c + "'");
    }
  }
  out.push_back({Tok::End, "", s.size()});
  return out;
}

bool is_keyword(const std::string& s) {
  return s == "exists" || s == "forall" || s == "true";
}

// ── Parser ──────────────────────────────────────────────────────────────────

class Parser {
 public:
  Parser(const std::string& text, const Signature& sig)
      : toks_(lex(text)), sig_(sig) {}

  FPtr run() {
    FPtr f = formula();
    expect(Tok::End, "end of input");
    return f;
  }

 private:
  std::vector<Token> toks_;
  std::size_t at_ = 0;
  const Signature& sig_;

  const Token& cur() const { return toks_[at_]; }
  const Token& peek(std::size_t k = 1) const {
    return toks_[std::min(at_ + k, toks_.size() - 1)];
  }
  Token advance() { return toks_[at_++]; }
  bool accept(Tok t) {
    if (cur().type == t) { ++at_; return true; }
    return false;
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("at position " + std::to_string(cur().pos) + ": " + what);
  }
  Token expect(Tok t, const std::string& what) {
    if (cur().type != t) fail(what + " expected");
    return advance();
  }

  std::string variable() {
    Token t = expect(Tok::Ident, "variable");
    if (is_keyword(t.text)) fail("keyword '" + t.text + "' used as variable");
    return t.text;
  }

  std::vector<std::string> var_list() {
    std::vector<std::string> vs{variable()};
    while (accept(Tok::Comma)) vs.push_back(variable());
    std::unordered_set<std::string> seen;
    for (const auto& v : vs)
      if (!seen.insert(v).second) fail("repeated bound variable '" + v + "'");
    return vs;
  }

  Rat margin() {
    bool neg = accept(Tok::Minus);
    Token n = expect(Tok::Num, "rational constant");
    Rat r;
    if (n.text.find('.') == std::string::npos && accept(Tok::Slash)) {
      Token d = expect(Tok::Num, "denominator");
      if (d.text.find('.') != std::string::npos) fail("integer denominator expected");
      r = parse_rat(n.text + "/" + d.text);
    } else {
      r = parse_rat(n.text);
    }
    if (neg) fail("negative margin in comparison");
    return r;
  }

  struct Ratio {
    FPtr num, den;
    std::vector<std::string> bound;
  };

  Ratio ratio() {
    expect(Tok::DblPipe, "'||'");
    FPtr num = formula();
    expect(Tok::Colon, "':'");
    FPtr den = formula();
    expect(Tok::DblPipe, "'||'");
    expect(Tok::LBrace, "'{'");
    std::vector<std::string> bound = var_list();
    expect(Tok::RBrace, "'}'");
    return {std::move(num), std::move(den), std::move(bound)};
  }

  FPtr compare() {
    // '[' already consumed.
    if (cur().type == Tok::DblPipe) {
      Ratio lhs = ratio();
      expect(Tok::Geq, "'>='");
      if (cur().type == Tok::DblPipe) {
        Ratio rhs = ratio();
        if (rhs.bound != lhs.bound) fail("comparison ratios bind different tuples");
        expect(Tok::Plus, "'+'");
        Rat r = margin();
        expect(Tok::RBrack, "']'");
        return f_compare(std::move(r), RSide::Right, lhs.num, lhs.den, rhs.num, rhs.den,
                         lhs.bound);
      }
      // "[ ratio >= rat ]" sugar: proportion at least r, i.e. the right-hand
      // ratio is the constant 0 built from the first bound variable.
      Rat r = margin();
      expect(Tok::RBrack, "']'");
      const std::string& y1 = lhs.bound[0];
      return f_compare(std::move(r), RSide::Right, lhs.num, lhs.den,
                       f_not(f_equal(y1, y1)), f_equal(y1, y1), lhs.bound);
    }
    Rat r = margin();
    expect(Tok::Plus, "'+'");
    Ratio lhs = ratio();
    expect(Tok::Geq, "'>='");
    Ratio rhs = ratio();
    if (rhs.bound != lhs.bound) fail("comparison ratios bind different tuples");
    expect(Tok::RBrack, "']'");
    return f_compare(std::move(r), RSide::Left, lhs.num, lhs.den, rhs.num, rhs.den,
                     lhs.bound);
  }

  FPtr primary() {
    if (accept(Tok::LParen)) {
      FPtr f = formula();
      expect(Tok::RParen, "')'");
      return f;
    }
    if (accept(Tok::LBrack)) return compare();
    if (cur().type == Tok::Ident) {
      if (cur().text == "true") { advance(); return f_top(); }
      if (is_keyword(cur().text)) fail("unexpected keyword '" + cur().text + "'");
      if (peek().type == Tok::LParen) {
        Token name = advance();
        advance();  // '('
        std::vector<std::string> args{variable()};
        while (accept(Tok::Comma)) args.push_back(variable());
        expect(Tok::RParen, "')'");
        int idx = sig_.find(name.text);
        if (idx < 0) fail("unknown relation '" + name.text + "'");
        int want = sig_.relations[idx].arity;
        if (static_cast<int>(args.size()) != want)
          fail("relation '" + name.text + "' expects " + std::to_string(want) +
               " argument(s), got " + std::to_string(args.size()));
        return f_atom(name.text, std::move(args));
      }
      std::string a = variable();
      if (accept(Tok::Eq)) return f_equal(a, variable());
      if (accept(Tok::Neq)) return f_not(f_equal(a, variable()));
      fail("'=' or '!=' expected after variable");
    }
    fail("formula expected");
  }

  FPtr unary() {
    if (accept(Tok::Tilde)) return f_not(unary());
    if (cur().type == Tok::Ident && (cur().text == "exists" || cur().text == "forall")) {
      bool universal = cur().text == "forall";
      advance();
      std::vector<std::string> vs = var_list();
      expect(Tok::Colon, "':'");
      FPtr body = unary();
      if (universal) return f_not(f_exists(std::move(vs), f_not(std::move(body))));
      return f_exists(std::move(vs), std::move(body));
    }
    return primary();
  }

  FPtr conjunction() {
    FPtr f = unary();
    while (accept(Tok::Amp)) f = f_and(f, unary());
    return f;
  }

  FPtr disjunction() {
    FPtr f = conjunction();
    while (accept(Tok::Pipe)) f = f_or(f, conjunction());
    return f;
  }

  FPtr implication() {
    FPtr f = disjunction();
    if (accept(Tok::Arrow)) return f_implies(f, implication());
    return f;
  }

  FPtr formula() {
    FPtr f = implication();
    while (accept(Tok::DArrow)) f = f_iff(f, implication());
    return f;
  }
};

}  // namespace

FPtr parse(const std::string& text, const Signature& sig) {
  return Parser(text, sig).run();
}

// ── Renderer ────────────────────────────────────────────────────────────────

namespace {

// Binding levels; a node is parenthesized when it binds looser than its
// context requires.  ~(x=y) prints as the primary-level x!=y.
int level(const Formula& f) {
  switch (f.kind) {
    case Kind::Iff: return 0;
    case Kind::Implies: return 1;
    case Kind::Or: return 2;
    case Kind::And: return 3;
    case Kind::Not: return f.a->kind == Kind::Equal ? 5 : 4;
    case Kind::Exists: return 4;
    default: return 5;  // Top, Atom, Equal, Compare
  }
}

void rend(const Formula& f, int min_level, std::string& out);

void join_vars(const std::vector<std::string>& vs, const char* sep, std::string& out) {
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (i) out += sep;
    out += vs[i];
  }
}

void ratio_str(const Formula& cmp, const FPtr& num, const FPtr& den, std::string& out) {
  out += "||";
  rend(*num, 0, out);
  out += " : ";
  rend(*den, 0, out);
  out += "||{";
  join_vars(cmp.vars, ",", out);
  out += "}";
}

void raw(const Formula& f, std::string& out) {
  switch (f.kind) {
    case Kind::Top: out += "true"; return;
    case Kind::Atom:
      out += f.rel;
      out += "(";
      join_vars(f.vars, ",", out);
      out += ")";
      return;
    case Kind::Equal:
      out += f.vars[0];
      out += "=";
      out += f.vars[1];
      return;
    case Kind::Not:
      if (f.a->kind == Kind::Equal) {
        out += f.a->vars[0];
        out += "!=";
        out += f.a->vars[1];
        return;
      }
      out += "~";
      rend(*f.a, 4, out);
      return;
    case Kind::And:
      rend(*f.a, 3, out);
      out += " & ";
      rend(*f.b, 4, out);
      return;
    case Kind::Or:
      rend(*f.a, 2, out);
      out += " | ";
      rend(*f.b, 3, out);
      return;
    case Kind::Implies:
      rend(*f.a, 2, out);
      out += " -> ";
      rend(*f.b, 1, out);
      return;
    case Kind::Iff:
      rend(*f.a, 0, out);
      out += " <-> ";
      rend(*f.b, 1, out);
      return;
    case Kind::Exists:
      out += "exists ";
      join_vars(f.vars, ", ", out);
      out += " : ";
      rend(*f.a, 4, out);
      return;
    case Kind::Compare: {
      out += "[ ";
      // Fold the degenerate second ratio back to the surface sugar
      // "[ ||f : g||{ys} >= r ]".
      const std::string& y1 = f.vars[0];
      bool zero_rhs = f.r_side == RSide::Right && f.num2->kind == Kind::Not &&
                      f.num2->a->kind == Kind::Equal &&
                      f.num2->a->vars == std::vector<std::string>{y1, y1} &&
                      f.den2->kind == Kind::Equal &&
                      f.den2->vars == std::vector<std::string>{y1, y1};
      if (zero_rhs) {
        ratio_str(f, f.num1, f.den1, out);
        out += " >= ";
        out += rat_str(f.r);
      } else if (f.r_side == RSide::Left) {
        out += rat_str(f.r);
        out += " + ";
        ratio_str(f, f.num1, f.den1, out);
        out += " >= ";
        ratio_str(f, f.num2, f.den2, out);
      } else {
        ratio_str(f, f.num1, f.den1, out);
        out += " >= ";
        ratio_str(f, f.num2, f.den2, out);
        out += " + ";
        out += rat_str(f.r);
      }
      out += " ]";
      return;
    }
  }
}

void rend(const Formula& f, int min_level, std::string& out) {
  if (level(f) < min_level) {
    out += "(";
    raw(f, out);
    out += ")";
  } else {
    raw(f, out);
  }
}

}  // namespace

std::string render(const FPtr& f) {
  std::string out;
  rend(*f, 0, out);
  return out;
}

// ── Measures ────────────────────────────────────────────────────────────────

int quantifier_rank(const FPtr& f) {
  switch (f->kind) {
    case Kind::Top:
    case Kind::Atom:
    case Kind::Equal: return 0;
    case Kind::Not: return quantifier_rank(f->a);
    case Kind::And:
    case Kind::Or:
    case Kind::Implies:
    case Kind::Iff: return std::max(quantifier_rank(f->a), quantifier_rank(f->b));
    case Kind::Exists: return quantifier_rank(f->a) + static_cast<int>(f->vars.size());
    case Kind::Compare: {
      int m = std::max(std::max(quantifier_rank(f->num1), quantifier_rank(f->den1)),
                       std::max(quantifier_rank(f->num2), quantifier_rank(f->den2)));
      return m + static_cast<int>(f->vars.size());
    }
  }
  return 0;
}

namespace {

void collect_free(const Formula& f, std::set<std::string>& out) {
  switch (f.kind) {
    case Kind::Top: return;
    case Kind::Atom:
    case Kind::Equal:
      out.insert(f.vars.begin(), f.vars.end());
      return;
    case Kind::Not: collect_free(*f.a, out); return;
    case Kind::And:
    case Kind::Or:
    case Kind::Implies:
    case Kind::Iff:
      collect_free(*f.a, out);
      collect_free(*f.b, out);
      return;
    case Kind::Exists: {
      std::set<std::string> inner;
      collect_free(*f.a, inner);
      for (const auto& v : f.vars) inner.erase(v);
      out.insert(inner.begin(), inner.end());
      return;
    }
    case Kind::Compare: {
      std::set<std::string> inner;
      collect_free(*f.num1, inner);
      collect_free(*f.den1, inner);
      collect_free(*f.num2, inner);
      collect_free(*f.den2, inner);
      for (const auto& v : f.vars) inner.erase(v);
      out.insert(inner.begin(), inner.end());
      return;
    }
  }
}

}  // namespace

std::vector<std::string> free_vars(const FPtr& f) {
  std::set<std::string> s;
  collect_free(*f, s);
  return {s.begin(), s.end()};
}

std::set<Rat> threshold_constants(const FPtr& f) {
  std::set<Rat> out;
  auto walk = [&out](auto&& self, const Formula& g) -> void {
    switch (g.kind) {
      case Kind::Not: self(self, *g.a); return;
      case Kind::And:
      case Kind::Or:
      case Kind::Implies:
      case Kind::Iff:
        self(self, *g.a);
        self(self, *g.b);
        return;
      case Kind::Exists: self(self, *g.a); return;
      case Kind::Compare:
        out.insert(g.r);
        self(self, *g.num1);
        self(self, *g.den1);
        self(self, *g.num2);
        self(self, *g.den2);
        return;
      default: return;
    }
  };
  walk(walk, *f);
  return out;
}

bool is_quantifier_free(const FPtr& f) {
  switch (f->kind) {
    case Kind::Top:
    case Kind::Atom:
    case Kind::Equal: return true;
    case Kind::Not: return is_quantifier_free(f->a);
    case Kind::And:
    case Kind::Or:
    case Kind::Implies:
    case Kind::Iff: return is_quantifier_free(f->a) && is_quantifier_free(f->b);
    case Kind::Exists:
    case Kind::Compare: return false;
  }
  return false;
}

std::size_t formula_length(const FPtr& f) {
  // Token count of the canonical text ("length as a symbol sequence").
  // The terminating End token is not counted.
  return lex(render(f)).size() - 1;
}

}  // namespace cpl

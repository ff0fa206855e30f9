// Exact rational arithmetic for the whole library.
//
// Thin layer over GMP's mpq_class.  The one real job of this header is to
// make construction safe: mpq_class built from "a/b" strings or from a
// numerator/denominator pair is NOT canonicalized by GMP, and comparisons on
// non-canonical values are garbage.  Everything below routes through
// canonicalize().

#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cpl {

using Rat = mpq_class;

// num/den with canonicalization (den must be nonzero).
inline Rat make_rat(long num, long den) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  Rat r(num, den);
  r.canonicalize();
  return r;
}

// Parses "12", "3/4" or an exact decimal like "0.25" / "-1.5".
// Decimals convert exactly (base-10 scaling), never via floating point.
inline Rat parse_rat(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty rational literal");
  auto dot = text.find('.');
  if (dot == std::string::npos) {
    if (text.find('/') != std::string::npos) {
      Rat r;
      if (r.set_str(text, 10) != 0)
        throw std::invalid_argument("bad rational literal: " + text);
      if (r.get_den() == 0)
        throw std::domain_error("rational with zero denominator: " + text);
      r.canonicalize();
      return r;
    }
    mpz_class z;
    if (z.set_str(text, 10) != 0)
      throw std::invalid_argument("bad integer literal: " + text);
    return Rat(z);
  }
  // decimal: sign? digits '.' digits
  std::string head = text.substr(0, dot), tail = text.substr(dot + 1);
  bool neg = false;
  if (!head.empty() && (head[0] == '-' || head[0] == '+')) {
    neg = head[0] == '-';
    head.erase(0, 1);
  }
  if (tail.empty() || tail.find_first_not_of("0123456789") != std::string::npos ||
      head.find_first_not_of("0123456789") != std::string::npos)
    throw std::invalid_argument("bad decimal literal: " + text);
  if (head.empty()) head = "0";
  mpz_class ip(head, 10), fp(tail, 10), scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, tail.size());
  Rat r = Rat(ip) + Rat(fp) / Rat(scale);
  if (neg) r = -r;
  r.canonicalize();
  return r;
}

// Canonical text form: "n" for integers, "n/d" otherwise.
inline std::string rat_str(const Rat& r) { return r.get_str(); }

inline double rat_double(const Rat& r) { return r.get_d(); }

}  // namespace cpl

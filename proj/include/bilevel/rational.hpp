#ifndef BILEVEL_RATIONAL_HPP
#define BILEVEL_RATIONAL_HPP

#include <gmpxx.h>

#include <string>

#include "bilevel/errors.hpp"

namespace bilevel {

// Exact rational number. mpq_class keeps the canonical form invariants
// (positive denominator, coprime numerator/denominator) after every
// operation, and all arithmetic is exact.
using Rational = mpq_class;

inline Rational rat(long num, long den = 1) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

// Largest integer <= q.
inline Rational rat_floor(const Rational& q) {
  mpz_class z;
  mpz_fdiv_q(z.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return Rational(z);
}

inline bool rat_is_integer(const Rational& q) { return q.get_den() == 1; }

// Parses "p", "-p" or "p/q". Decimal notation is rejected on purpose:
// the file format carries exact rationals only.
inline Rational rat_parse(const std::string& text) {
  if (text.empty()) throw ValidationError("empty rational literal");
  for (char ch : text) {
    bool ok = (ch >= '0' && ch <= '9') || ch == '-' || ch == '+' || ch == '/';
    if (!ok)
      throw ValidationError("invalid rational literal '" + text +
                            "' (use integer or p/q form)");
  }
  Rational q;
  if (q.set_str(text, 10) != 0)
    throw ValidationError("invalid rational literal '" + text + "'");
  if (q.get_den() == 0) throw ValidationError("zero denominator in '" + text + "'");
  q.canonicalize();
  return q;
}

// Canonical short form: "p" for integers, "p/q" otherwise.
inline std::string rat_str(const Rational& q) { return q.get_str(); }

// Fraction form with explicit denominator, e.g. "-2/1".
inline std::string rat_frac_str(const Rational& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

}  // namespace bilevel

#endif  // BILEVEL_RATIONAL_HPP

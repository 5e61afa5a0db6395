#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <limits>
#include <string>

namespace polyreg {

using Rational = mpq_class;
using Integer = mpz_class;

inline Rational make_rational(long num, long den = 1) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

inline Rational pow_int(const Rational& base, unsigned k) {
  Rational out(1);
  mpz_pow_ui(out.get_num_mpz_t(), base.get_num_mpz_t(), k);
  mpz_pow_ui(out.get_den_mpz_t(), base.get_den_mpz_t(), k);
  return out;
}

inline Integer factorial(unsigned k) {
  Integer f;
  mpz_fac_ui(f.get_mpz_t(), k);
  return f;
}

inline Integer binomial(unsigned n, unsigned k) {
  Integer b;
  mpz_bin_uiui(b.get_mpz_t(), n, k);
  return b;
}

// Two-stage conversion keeps the full 64-bit long double mantissa.
inline long double to_ld(const Rational& r) {
  const double hi = r.get_d();
  Rational rest = r - Rational(hi);
  return static_cast<long double>(hi) + static_cast<long double>(rest.get_d());
}

inline bool is_integer(const Rational& r) { return r.get_den() == 1; }

inline bool fits_int64(const Integer& z) {
  static const Integer lo(std::to_string(std::numeric_limits<std::int64_t>::min()));
  static const Integer hi(std::to_string(std::numeric_limits<std::int64_t>::max()));
  return z >= lo && z <= hi;
}

inline std::string to_string(const Rational& r) { return r.get_str(); }

}  // namespace polyreg

#pragma once

// Symbols of the conjugated polyharmonic operators in the log-radial variable t = log(1/|x|).
//
// Odd n:  L(s, d)   = (-1)^m prod_j ((-s + m - n/2 + 1/2 - 2j)(-s + m + n/2 - 3/2 - 2j) + d)
// Even n: L_o(s, d) = (-1)^m prod_j ((-s + m - n/2 - 2j)(-s + m + n/2 - 2 - 2j) + d)
// with d = -q(q+n-2) on the q-th spherical harmonic.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "polyreg/errors.hpp"
#include "polyreg/exppoly.hpp"
#include "polyreg/poly.hpp"
#include "polyreg/rational.hpp"

namespace polyreg {

struct SymbolParams {
  int m = 1;
  int n = 3;
  int q = 0;
};

struct SymbolPoly {
  RatPoly re;
  RatPoly im;
};

inline void require_odd(int n, const char* who) {
  if (n % 2 == 0) throw ParityError(std::string(who) + ": dimension must be odd");
}
inline void require_even(int n, const char* who) {
  if (n % 2 != 0) throw ParityError(std::string(who) + ": dimension must be even");
}
inline void require_dims(int m, int n, const char* who) {
  if (m < 1) throw RangeError(std::string(who) + ": m must be at least 1");
  if (n < 2 || n > 2 * m + 1) throw RangeError(std::string(who) + ": need 2 <= n <= 2m+1");
}

inline Rational eigenvalue(int q, int n) { return Rational(q) * Rational(q + n - 2); }

// ---- direct expansions -------------------------------------------------------

// L^{m,n}(i g, -q(q+n-2)) expanded as re + i*im, with p = q + (n-3)/2.
inline SymbolPoly symbol_product(const SymbolParams& sp) {
  require_odd(sp.n, "symbol_product");
  const int m = sp.m;
  const int p = sp.q + (sp.n - 3) / 2;
  RatPoly re = RatPoly::constant(Rational(m % 2 == 0 ? 1 : -1));
  RatPoly im;
  // each factor is x - i g
  auto times = [&](const Rational& x) {
    const RatPoly fr = RatPoly::constant(x);
    const RatPoly fi{Rational(0), Rational(-1)};
    RatPoly nr = re * fr - im * fi;
    RatPoly ni = re * fi + im * fr;
    re = std::move(nr);
    im = std::move(ni);
  };
  for (int j = 0; j < m; ++j) {
    times(Rational(m - 1 - 2 * j - p));
    times(Rational(m - 2 * j + p));
  }
  return {re, im};
}

// L^{m,n}(s, delta) as a polynomial in s, straight from its defining product.
inline RatPoly odd_operator_poly(int m, int n, const Rational& delta) {
  require_odd(n, "odd_operator_poly");
  RatPoly out = RatPoly::constant(Rational(m % 2 == 0 ? 1 : -1));
  for (int j = 0; j < m; ++j) {
    const Rational A = make_rational(2 * m - n + 1, 2) - Rational(2 * j);
    const Rational B = make_rational(2 * m + n - 3, 2) - Rational(2 * j);
    out = out * (RatPoly{A, Rational(-1)} * RatPoly{B, Rational(-1)} + RatPoly::constant(delta));
  }
  return out;
}

inline RatPoly even_operator_poly(int m, int n, const Rational& delta) {
  require_even(n, "even_operator_poly");
  RatPoly out = RatPoly::constant(Rational(m % 2 == 0 ? 1 : -1));
  for (int j = 0; j < m; ++j) {
    const Rational A(m - n / 2 - 2 * j);
    const Rational B(m + n / 2 - 2 - 2 * j);
    out = out * (RatPoly{A, Rational(-1)} * RatPoly{B, Rational(-1)} + RatPoly::constant(delta));
  }
  return out;
}

// Substitutes s -> -s.
inline RatPoly reflect(const RatPoly& p) {
  auto c = p.coeffs();
  for (std::size_t k = 1; k < c.size(); k += 2) c[k] = -c[k];
  return RatPoly(std::move(c));
}

// ---- recurrences -------------------------------------------------------------

namespace detail {

inline RatPoly gk(long k) { return RatPoly{Rational(k * k), Rational(0), Rational(1)}; }
inline RatPoly gamma_poly() { return RatPoly{Rational(0), Rational(1)}; }

// prod_{k=a}^{b} (g^2 + k^2), with the reciprocal convention prod_{a}^{b} = 1/prod_{b+1}^{a-1}
// when b < a - 1; returned as numerator/denominator.
inline std::pair<RatPoly, RatPoly> gprod(long a, long b) {
  RatPoly num = RatPoly::constant(Rational(1));
  RatPoly den = RatPoly::constant(Rational(1));
  if (b >= a) {
    for (long k = a; k <= b; ++k) num = num * gk(k);
  } else {
    for (long k = b + 1; k <= a - 1; ++k) den = den * gk(k);
  }
  return {num, den};
}

inline std::vector<RatPoly> recurrence(int m, int p_max, bool real_part) {
  if (m < 1 || p_max < 0) throw RangeError("recurrence: need m >= 1 and p >= 0");
  std::vector<RatPoly> seq;
  const RatPoly g = gamma_poly();
  if (real_part) {
    seq.push_back(gprod(0, m - 1).first);
    if (p_max >= 1) {
      const RatPoly lead{Rational(static_cast<long>(m) * m + 1), Rational(0), Rational(1)};
      auto [num, den] = gprod(0, m - 2);
      seq.push_back((lead * num).exact_div(den));
    }
  } else {
    auto [n0, d0] = gprod(1, m - 1);
    seq.push_back((g * Rational(m) * n0).exact_div(d0));
    if (p_max >= 1) {
      const RatPoly lead{Rational(static_cast<long>(m) * m - 1), Rational(0), Rational(1)};
      auto [n1, d1] = gprod(1, m - 2);
      seq.push_back((g * Rational(m) * lead * n1).exact_div(d1));
    }
  }
  for (int p = 2; p <= p_max; ++p) {
    const Rational lin(real_part ? 2 * p - 1 : -(2 * p - 1));
    RatPoly num = lin * seq[static_cast<std::size_t>(p - 1)] +
                  gk(p - 1 + m) * seq[static_cast<std::size_t>(p - 2)];
    seq.push_back(num.exact_div(gk(m - p)));
  }
  return seq;
}

}  // namespace detail

inline std::vector<RatPoly> a_sequence(int m, int p_max) { return detail::recurrence(m, p_max, true); }
inline std::vector<RatPoly> b_sequence(int m, int p_max) { return detail::recurrence(m, p_max, false); }
inline RatPoly a_recurrence(int m, int p) { return a_sequence(m, p).back(); }
inline RatPoly b_recurrence(int m, int p) { return b_sequence(m, p).back(); }

inline Integer a_m_at_zero_closed_form(int m) {
  Integer out = 1;
  for (int j = 0; j < m; ++j) out *= Integer((1 + 2 * j) * (2 * m - 2 * j));
  return out;
}
inline Integer a_m1_at_zero_closed_form(int m) {
  Integer out = 1;
  for (int j = 0; j < m; ++j) out *= Integer((2 + 2 * j) * (2 * m + 1 - 2 * j));
  return out;
}

struct IdentityResult {
  bool real_ok = true;
  bool imag_ok = true;
  bool parity_ok = true;
  int cases = 0;
  [[nodiscard]] bool ok() const { return real_ok && imag_ok && parity_ok; }
};

// Exact identity between the direct product and the recurrences, q = 0..q_max.
inline IdentityResult check_symbol_identity(int m, int n, int q_max) {
  require_odd(n, "check_symbol_identity");
  require_dims(m, n, "check_symbol_identity");
  const int shift = (n - 3) / 2;
  const auto a = a_sequence(m, q_max + shift);
  const auto b = b_sequence(m, q_max + shift);
  IdentityResult r;
  for (int q = 0; q <= q_max; ++q) {
    const auto s = symbol_product({m, n, q});
    const auto idx = static_cast<std::size_t>(q + shift);
    r.real_ok = r.real_ok && s.re == a[idx];
    r.imag_ok = r.imag_ok && s.im == b[idx];
    r.parity_ok = r.parity_ok && s.re.is_even() && s.im.is_odd();
    ++r.cases;
  }
  return r;
}

inline bool check_real_part(int m, int n, int q_max) { return check_symbol_identity(m, n, q_max).real_ok; }

// ---- even dimensions ---------------------------------------------------------

inline long B_j(int m, int n, int j, long q) { return q + n / 2 + m - 2 * j - 2; }

// L_o(d/dt, -q(q+n-2)) = prod (-d^2 + B_j^2), even in d/dt, so the same DiffOp serves -d/dt.
inline DiffOp even_symbol(const SymbolParams& sp) {
  require_even(sp.n, "even_symbol");
  if (sp.n > 2 * sp.m) throw RangeError("even_symbol: need n <= 2m");
  DiffOp d;
  d.sign = sp.m % 2 == 0 ? 1 : -1;
  for (int j = 0; j < sp.m; ++j) {
    const Rational b(B_j(sp.m, sp.n, j, sp.q));
    d.roots.push_back(-b);
    d.roots.push_back(b);
  }
  std::sort(d.roots.begin(), d.roots.end());
  return d;
}

// L^{m,n}(-d/dt, -p(p+n-2)) = (-1)^m prod (d - c_j - p)(d + c_j + 1 + p), c_j = 2j - (m - (n-1)/2).
inline DiffOp odd_symbol(int m, int n, int p) {
  require_odd(n, "odd_symbol");
  require_dims(m, n, "odd_symbol");
  DiffOp d;
  d.sign = m % 2 == 0 ? 1 : -1;
  const int k = m - (n - 1) / 2;
  for (int j = 0; j < m; ++j) {
    const int c = 2 * j - k;
    d.roots.push_back(Rational(c + p));
    d.roots.push_back(Rational(-c - 1 - p));
  }
  std::sort(d.roots.begin(), d.roots.end());
  return d;
}

// L_o(0, -q(q+n-2)) via the closed product forms (separate branches for m even / odd).
inline Rational even_zero_symbol(const SymbolParams& sp) {
  require_even(sp.n, "even_zero_symbol");
  const Rational lam = eigenvalue(sp.q, sp.n);
  auto mu = [&](long p) -> Rational { return Rational(p) * Rational(p + sp.n - 2); };
  Rational out = 1;
  if (sp.m % 2 == 0) {
    for (int j = 1; j <= sp.m / 2; ++j) {
      const Rational f = lam - mu(-sp.n / 2 + 2 * j);
      out *= f * f;
    }
  } else {
    for (int j = 1; j <= (sp.m - 1) / 2; ++j) {
      const Rational f = lam - mu(-sp.n / 2 + 1 + 2 * j);
      out *= f * f;
    }
    const Rational h(sp.n / 2 - 1);
    out *= lam + h * h;
  }
  return out;
}

inline Rational even_zero_symbol_from_B(const SymbolParams& sp) {
  Rational out = 1;
  for (int j = 0; j < sp.m; ++j) {
    const Rational b(B_j(sp.m, sp.n, j, sp.q));
    out *= b * b;
  }
  return out;
}

// ---- lower-bound sweeps ------------------------------------------------------

struct BoundReport {
  int m = 0;
  int n = 0;
  int q_max = 0;
  double window = 0;
  double step = 0;
  double min_ratio = std::numeric_limits<double>::infinity();
  int argmin_q = -1;
  double argmin_gamma = 0;
  bool certified = false;
  bool tail_ok = false;
  std::vector<std::string> exceptions;
  // extra diagnostics
  long monotone_checks = 0;
  long monotone_violations = 0;
  double C_m = 0;        // 2^{m+4} m
  double D_base = 0;     // min{a_m, a_{m+1}} over |g| <= C(m)+1
  double D_m = 0;        // D_base / prod(C(m)(C(m)+1) - p(p+1))
  double tail_C = 0;    // constant certified for every q > m - n/2 in the even bound
  double criterion_sup = 0;  // largest C allowed by the bare large-q inequality
  bool criterion_sup_ok = true;  // whether that supremum actually satisfies the bound on the grid
};

inline nlohmann::ordered_json to_json(const BoundReport& r) {
  nlohmann::ordered_json j;
  j["m"] = r.m;
  j["n"] = r.n;
  j["q_max"] = r.q_max;
  j["grid"] = {{"window", r.window}, {"step", r.step}};
  j["min_ratio"] = r.min_ratio;
  j["certified"] = r.certified;
  j["exceptions"] = r.exceptions;
  j["argmin"] = {{"q", r.argmin_q}, {"gamma", r.argmin_gamma}};
  j["tail_ok"] = r.tail_ok;
  if (r.monotone_checks > 0)
    j["monotone"] = {{"checks", r.monotone_checks}, {"violations", r.monotone_violations}};
  if (r.C_m > 0) j["constants"] = {{"C_m", r.C_m}, {"D", r.D_base}, {"D_m", r.D_m}};
  if (r.tail_C > 0) {
    j["large_q_constant"] = r.tail_C;
    j["large_q_criterion_sup"] = r.criterion_sup;
    j["large_q_criterion_sup_holds"] = r.criterion_sup_ok;
  }
  return j;
}

namespace detail {

inline std::vector<long double> to_ld_coeffs(const RatPoly& p) {
  std::vector<long double> c;
  for (const auto& x : p.coeffs()) c.push_back(to_ld(x));
  return c;
}

inline long double horner(const std::vector<long double>& c, long double x) {
  long double acc = 0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

}  // namespace detail

// Product term of the odd lower bound: prod_{s} (q(q+n-2) - s(s+n-2)), s = 3/2-n/2 .. m-n/2+1/2.
inline Rational odd_product_term(int m, int n, int q) {
  const Rational lam = eigenvalue(q, n);
  Rational out = 1;
  for (int i = 0; i < m; ++i) {
    const Rational s = make_rational(3 - n, 2) + Rational(i);
    out *= lam - s * (s + Rational(n - 2));
  }
  return out;
}

// a_{q+(n-3)/2}(g) >= C (sum_k g^{2k} + product term) on a g-grid over q <= q_max.
inline BoundReport sweep_2_28(int m, int n, int q_max, double window = 60, double step = 1.0 / 64) {
  require_odd(n, "sweep_2_28");
  require_dims(m, n, "sweep_2_28");
  if (!(step > 0) || !(window > 0)) throw RangeError("sweep_2_28: window and step must be positive");
  BoundReport r;
  r.m = m;
  r.n = n;
  r.q_max = q_max;
  r.window = window;
  r.step = step;
  const int shift = (n - 3) / 2;
  const auto a = a_sequence(m, q_max + shift);
  const auto K = static_cast<long>(std::floor(window / step));

  std::vector<long double> grid;
  for (long k = 0; k <= K; ++k) grid.push_back(static_cast<long double>(k) * step);

  // sum_{k=1}^m g^{2k}
  auto sum_powers = [m](long double g) {
    long double acc = 0, g2 = g * g, pw = 1;
    for (int k = 1; k <= m; ++k) {
      pw *= g2;
      acc += pw;
    }
    return acc;
  };

  std::vector<std::vector<long double>> vals(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto c = detail::to_ld_coeffs(a[i]);
    vals[i].reserve(grid.size());
    for (auto g : grid) vals[i].push_back(detail::horner(c, g));
  }

  bool tail = true;
  for (int q = 0; q <= q_max; ++q) {
    const auto idx = static_cast<std::size_t>(q + shift);
    const long double prod = to_ld(odd_product_term(m, n, q));
    // tail: both sides have degree 2m with unit leading coefficient
    tail = tail && a[idx].degree() == 2 * m && a[idx].leading() > 0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const long double rhs = sum_powers(grid[k]) + prod;
      if (rhs <= 0) {
        if (k == 0) r.exceptions.push_back("q=" + std::to_string(q) + " at g=0 (right side vanishes)");
        continue;
      }
      const double ratio = static_cast<double>(vals[idx][k] / rhs);
      if (ratio < r.min_ratio) {
        r.min_ratio = ratio;
        r.argmin_q = q;
        r.argmin_gamma = static_cast<double>(grid[k]);
      }
    }
  }
  // a_p >= a_{p-2} on the grid, p >= 2
  for (std::size_t p = 2; p < a.size(); ++p)
    for (std::size_t k = 0; k < grid.size(); ++k) {
      ++r.monotone_checks;
      const long double lhs = vals[p][k], rhs = vals[p - 2][k];
      if (lhs < rhs - 1e-15L * std::max<long double>(1, std::fabs(rhs))) ++r.monotone_violations;
    }

  // staged constants: C(m) and D(m)
  const long Cm = (1L << (m + 4)) * m;
  r.C_m = static_cast<double>(Cm);
  if (n == 3) {
    const auto am = a_sequence(m, m + 1);
    const auto c0 = detail::to_ld_coeffs(am[static_cast<std::size_t>(m)]);
    const auto c1 = detail::to_ld_coeffs(am[static_cast<std::size_t>(m + 1)]);
    long double D = std::numeric_limits<long double>::infinity();
    for (long double g = 0; g <= static_cast<long double>(Cm + 1); g += step)
      D = std::min({D, detail::horner(c0, g), detail::horner(c1, g)});
    long double prod = 1;
    for (int p = 0; p < m; ++p)
      prod *= static_cast<long double>(Cm) * static_cast<long double>(Cm + 1) - static_cast<long double>(p) * (p + 1);
    r.D_base = static_cast<double>(D);
    r.D_m = static_cast<double>(D / prod);
  }
  r.tail_ok = tail;
  r.certified = r.min_ratio > 0 && std::isfinite(r.min_ratio) && tail;
  return r;
}

// B_j(q)^2 >= C q(q+n-2) away from the zero set q = 2j - m - n/2 + 2.
inline BoundReport sweep_5_8(int m, int n, int q_max) {
  require_even(n, "sweep_5_8");
  if (n > 2 * m) throw RangeError("sweep_5_8: need n <= 2m");
  BoundReport r;
  r.m = m;
  r.n = n;
  r.q_max = q_max;
  bool zero_set_exact = true;
  for (int j = 0; j < m; ++j) {
    const long q_zero = 2L * j - m - n / 2 + 2;
    for (long q = 0; q <= q_max; ++q) {
      const long b = B_j(m, n, j, q);
      const bool excluded = q == q_zero;
      zero_set_exact = zero_set_exact && ((b == 0) == excluded);
      if (excluded) {
        r.exceptions.push_back("j=" + std::to_string(j) + ",q=" + std::to_string(q));
        continue;
      }
      const long lam = q * (q + n - 2);
      if (lam == 0) continue;
      const double ratio = static_cast<double>(b) * static_cast<double>(b) / static_cast<double>(lam);
      if (ratio < r.min_ratio) {
        r.min_ratio = ratio;
        r.argmin_q = static_cast<int>(q);
        r.argmin_gamma = j;
      }
    }
  }
  // For q > k = m-n/2, B_j(q) >= q - k and (q-k)^2 / (q(q+n-2)) increases with q, so 1/((k+1)(k+n-1))
  // bounds every larger q. The supremum allowed by (1-C) q(q+n-2) > k(m+n/2-2) alone is too
  // large in general (m=2, n=2, j=1, q=2 gives B^2 = 1 < 3/4 * 4), so it is only reported.
  const long k = m - n / 2;
  const long q1 = k + 1;
  const double rhs = static_cast<double>(k) * static_cast<double>(m + n / 2 - 2);
  r.criterion_sup = 1.0 - rhs / static_cast<double>(q1 * (q1 + n - 2));
  r.tail_C = 1.0 / static_cast<double>(q1 * (q1 + n - 1));  // below the value at q1 and below 1
  bool large_q_ok = (1 - r.tail_C) * static_cast<double>(q1 * (q1 + n - 2)) > rhs;
  r.criterion_sup_ok = true;
  for (int j = 0; j < m; ++j)
    for (long q = q1; q <= q_max; ++q) {
      const double b = static_cast<double>(B_j(m, n, j, q));
      const double lam = static_cast<double>(q * (q + n - 2));
      large_q_ok = large_q_ok && b * b >= r.tail_C * lam;
      r.criterion_sup_ok = r.criterion_sup_ok && b * b >= r.criterion_sup * lam;
    }
  r.tail_ok = large_q_ok && zero_set_exact;
  r.certified = r.min_ratio > 0 && std::isfinite(r.min_ratio) && r.tail_ok;
  return r;
}

}  // namespace polyreg

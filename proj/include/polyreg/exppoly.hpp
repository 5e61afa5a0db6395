#pragma once

// Exact algebra of distributions on the line of the form
//   sum c t^k e^{a t} on t<0,  sum c t^k e^{a t} on t>0,  plus atoms delta^{(j)} at 0.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "polyreg/errors.hpp"
#include "polyreg/poly.hpp"
#include "polyreg/rational.hpp"

namespace polyreg {

struct ExpTerm {
  Rational coeff;
  Rational exponent;
  unsigned power = 0;

  friend bool operator==(const ExpTerm& a, const ExpTerm& b) {
    return a.coeff == b.coeff && a.exponent == b.exponent && a.power == b.power;
  }
};

struct DeltaAtom {
  unsigned order = 0;
  Rational weight;

  friend bool operator==(const DeltaAtom& a, const DeltaAtom& b) {
    return a.order == b.order && a.weight == b.weight;
  }
};

using Side = std::vector<ExpTerm>;

namespace detail {

inline Side normalize_side(const Side& in) {
  std::map<std::pair<Rational, unsigned>, Rational> acc;
  for (auto t : in) {
    t.exponent.canonicalize();
    t.coeff.canonicalize();
    acc[{t.exponent, t.power}] += t.coeff;
  }
  Side out;
  out.reserve(acc.size());
  for (auto& [key, c] : acc)
    if (c != 0) out.push_back({c, key.first, key.second});
  return out;
}

inline std::vector<DeltaAtom> normalize_atoms(const std::vector<DeltaAtom>& in) {
  std::map<unsigned, Rational> acc;
  for (auto a : in) {
    a.weight.canonicalize();
    acc[a.order] += a.weight;
  }
  std::vector<DeltaAtom> out;
  for (auto& [k, w] : acc)
    if (w != 0) out.push_back({k, w});
  return out;
}

// k-th derivative of t^p e^{a t} at t = 0.
inline Rational term_derivative_at_zero(const ExpTerm& t, unsigned k) {
  if (k < t.power) return 0;
  const Integer falling = factorial(k) / factorial(k - t.power);
  return t.coeff * Rational(falling) * pow_int(t.exponent, k - t.power);
}

}  // namespace detail

class PiecewiseExpPoly {
 public:
  PiecewiseExpPoly() = default;
  PiecewiseExpPoly(const Side& neg, const Side& pos, const std::vector<DeltaAtom>& atoms = {})
      : neg_(detail::normalize_side(neg)),
        pos_(detail::normalize_side(pos)),
        atoms_(detail::normalize_atoms(atoms)) {}

  static PiecewiseExpPoly delta(const Rational& weight = 1, unsigned order = 0) {
    return PiecewiseExpPoly({}, {}, {{order, weight}});
  }

  [[nodiscard]] const Side& neg() const { return neg_; }
  [[nodiscard]] const Side& pos() const { return pos_; }
  [[nodiscard]] const std::vector<DeltaAtom>& atoms() const { return atoms_; }
  [[nodiscard]] bool is_zero() const { return neg_.empty() && pos_.empty() && atoms_.empty(); }
  [[nodiscard]] bool has_atoms() const { return !atoms_.empty(); }
  [[nodiscard]] Rational atom_weight(unsigned order) const {
    for (const auto& a : atoms_)
      if (a.order == order) return a.weight;
    return 0;
  }

  // One-sided limits of the k-th derivative at 0.
  [[nodiscard]] Rational limit_pos(unsigned k = 0) const { return side_limit(pos_, k); }
  [[nodiscard]] Rational limit_neg(unsigned k = 0) const { return side_limit(neg_, k); }

  // Value of the smooth part at t != 0 (long double).
  [[nodiscard]] long double operator()(long double t) const {
    return eval_side(t > 0 ? pos_ : neg_, t);
  }

  friend bool operator==(const PiecewiseExpPoly& a, const PiecewiseExpPoly& b) {
    return a.neg_ == b.neg_ && a.pos_ == b.pos_ && a.atoms_ == b.atoms_;
  }
  friend PiecewiseExpPoly operator+(const PiecewiseExpPoly& a, const PiecewiseExpPoly& b) {
    return {concat(a.neg_, b.neg_), concat(a.pos_, b.pos_), concat(a.atoms_, b.atoms_)};
  }
  friend PiecewiseExpPoly operator*(const Rational& s, const PiecewiseExpPoly& f) {
    Side n = f.neg_, p = f.pos_;
    auto atoms = f.atoms_;
    for (auto& t : n) t.coeff *= s;
    for (auto& t : p) t.coeff *= s;
    for (auto& a : atoms) a.weight *= s;
    return {n, p, atoms};
  }
  friend PiecewiseExpPoly operator-(const PiecewiseExpPoly& a, const PiecewiseExpPoly& b) {
    return a + Rational(-1) * b;
  }

 private:
  template <class V>
  static V concat(V a, const V& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  }
  static Rational side_limit(const Side& s, unsigned k) {
    Rational acc = 0;
    for (const auto& t : s) acc += detail::term_derivative_at_zero(t, k);
    return acc;
  }
  static long double eval_side(const Side& s, long double t) {
    long double acc = 0;
    for (const auto& term : s)
      acc += to_ld(term.coeff) * std::pow(t, static_cast<long double>(term.power)) *
             std::exp(to_ld(term.exponent) * t);
    return acc;
  }

  Side neg_;
  Side pos_;
  std::vector<DeltaAtom> atoms_;
};

// sign * prod (d/dt - r).
struct DiffOp {
  int sign = 1;
  std::vector<Rational> roots;

  [[nodiscard]] std::size_t order() const { return roots.size(); }

  // Coefficients of the characteristic polynomial, lowest degree first.
  [[nodiscard]] RatPoly characteristic() const {
    RatPoly p = RatPoly::constant(Rational(sign));
    for (const auto& r : roots) p = p * RatPoly{-r, Rational(1)};
    return p;
  }

  [[nodiscard]] std::vector<Rational> sorted_roots() const {
    auto r = roots;
    std::sort(r.begin(), r.end());
    return r;
  }

  [[nodiscard]] bool has_root(const Rational& x) const {
    return std::find(roots.begin(), roots.end(), x) != roots.end();
  }
};

inline PiecewiseExpPoly differentiate(const PiecewiseExpPoly& f) {
  auto diff_side = [](const Side& s) {
    Side out;
    for (const auto& t : s) {
      if (t.exponent != 0) out.push_back({t.coeff * t.exponent, t.exponent, t.power});
      if (t.power > 0) out.push_back({t.coeff * Rational(t.power), t.exponent, t.power - 1});
    }
    return out;
  };
  std::vector<DeltaAtom> atoms;
  for (const auto& a : f.atoms()) atoms.push_back({a.order + 1, a.weight});
  atoms.push_back({0, f.limit_pos() - f.limit_neg()});
  return {diff_side(f.neg()), diff_side(f.pos()), atoms};
}

// (d/dt - r) f
inline PiecewiseExpPoly apply_first_order(const Rational& r, const PiecewiseExpPoly& f) {
  return differentiate(f) - r * f;
}

inline PiecewiseExpPoly apply_op(const DiffOp& d, PiecewiseExpPoly f) {
  for (const auto& r : d.roots) f = apply_first_order(r, f);
  return Rational(d.sign) * f;
}

namespace detail {

enum class Half { Neg, Pos };

struct RawTerm {
  Half side;
  Rational coeff;
  Rational exponent;
  unsigned power;
};

// Antiderivative of u^N e^{g u} (g != 0): e^{g u} * sum_j c_j u^{N-j}; returns (power, coeff) pairs.
inline std::vector<std::pair<unsigned, Rational>> antiderivative(unsigned N, const Rational& g) {
  std::vector<std::pair<unsigned, Rational>> out;
  Rational falling = 1;  // N!/(N-j)!
  for (unsigned j = 0; j <= N; ++j) {
    if (j > 0) falling *= Rational(N - j + 1);
    Rational c = falling / pow_int(g, j + 1);
    if (j % 2 == 1) c = -c;
    out.emplace_back(N - j, c);
  }
  return out;
}

// Convolution of c1 t^a e^{al t} on side s1 with c2 t^b e^{be t} on side s2.
inline void convolve_terms(const ExpTerm& f, Half sf, const ExpTerm& g, Half sg,
                           std::vector<RawTerm>& out) {
  const Rational gam = f.exponent - g.exponent;
  const unsigned a = f.power;
  const unsigned b = g.power;
  const Rational base = f.coeff * g.coeff;
  // (t-u)^b = sum_i C(b,i) t^{b-i} (-u)^i ; integrand then u^{a+i} e^{gam u} e^{be t}.
  auto emit_upper = [&](Half side, const Rational& scale) {
    // scale * e^{be t} t^{b-i} * F(t), F the antiderivative of u^{a+i} e^{gam u}.
    for (unsigned i = 0; i <= b; ++i) {
      Rational ci = base * Rational(binomial(b, i)) * scale;
      if (i % 2 == 1) ci = -ci;
      const unsigned N = a + i;
      if (gam == 0) {
        out.push_back({side, ci / Rational(N + 1), g.exponent, b - i + N + 1});
      } else {
        for (auto& [pw, c] : antiderivative(N, gam))
          out.push_back({side, ci * c, f.exponent, b - i + pw});
      }
    }
  };
  auto emit_zero = [&](Half side, const Rational& scale) {
    // scale * e^{be t} t^{b-i} * F(0).
    for (unsigned i = 0; i <= b; ++i) {
      Rational ci = base * Rational(binomial(b, i)) * scale;
      if (i % 2 == 1) ci = -ci;
      const unsigned N = a + i;
      if (gam == 0) continue;  // F(0) = 0 for the polynomial antiderivative
      Rational f0 = Rational(factorial(N)) / pow_int(gam, N + 1);
      if (N % 2 == 1) f0 = -f0;
      out.push_back({side, ci * f0, g.exponent, b - i});
    }
  };

  if (sf == Half::Pos && sg == Half::Pos) {
    // int_0^t: F(t) - F(0), result on t>0
    emit_upper(Half::Pos, 1);
    emit_zero(Half::Pos, -1);
  } else if (sf == Half::Neg && sg == Half::Neg) {
    // int_t^0: F(0) - F(t), result on t<0
    emit_zero(Half::Neg, 1);
    emit_upper(Half::Neg, -1);
  } else if (sf == Half::Pos && sg == Half::Neg) {
    // int_{max(0,t)}^inf, needs gam < 0
    if (!(gam < 0))
      throw DivergentConvolution("positive-side exponent " + f.exponent.get_str() +
                                 " does not undercut negative-side exponent " + g.exponent.get_str());
    emit_upper(Half::Pos, -1);
    emit_zero(Half::Neg, -1);
  } else {
    // int_{-inf}^{min(0,t)}, needs gam > 0
    if (!(gam > 0))
      throw DivergentConvolution("negative-side exponent " + f.exponent.get_str() +
                                 " does not exceed positive-side exponent " + g.exponent.get_str());
    emit_upper(Half::Neg, 1);
    emit_zero(Half::Pos, 1);
  }
}

inline PiecewiseExpPoly nth_derivative(PiecewiseExpPoly f, unsigned k) {
  for (unsigned i = 0; i < k; ++i) f = differentiate(f);
  return f;
}

}  // namespace detail

inline PiecewiseExpPoly convolve(const PiecewiseExpPoly& f, const PiecewiseExpPoly& g) {
  using detail::Half;
  std::vector<detail::RawTerm> raw;
  const std::pair<const Side*, Half> fs[] = {{&f.neg(), Half::Neg}, {&f.pos(), Half::Pos}};
  const std::pair<const Side*, Half> gs[] = {{&g.neg(), Half::Neg}, {&g.pos(), Half::Pos}};
  for (const auto& [sf, hf] : fs)
    for (const auto& tf : *sf)
      for (const auto& [sg, hg] : gs)
        for (const auto& tg : *sg) detail::convolve_terms(tf, hf, tg, hg, raw);

  Side neg, pos;
  for (auto& r : raw) (r.side == Half::Neg ? neg : pos).push_back({r.coeff, r.exponent, r.power});
  PiecewiseExpPoly out(neg, pos);

  // Atoms act by differentiation; the piece*piece part above is atom-free.
  const PiecewiseExpPoly f_smooth(f.neg(), f.pos());
  const PiecewiseExpPoly g_smooth(g.neg(), g.pos());
  for (const auto& a : f.atoms()) out = out + a.weight * detail::nth_derivative(g_smooth, a.order);
  for (const auto& a : g.atoms()) out = out + a.weight * detail::nth_derivative(f_smooth, a.order);
  std::vector<DeltaAtom> aa;
  for (const auto& a : f.atoms())
    for (const auto& b : g.atoms()) aa.push_back({a.order + b.order, a.weight * b.weight});
  return out + PiecewiseExpPoly({}, {}, aa);
}

enum class DecayClass { ExpDecayBoth, ExpDecayPlusBoundedMinus, LinearGrowthMinus, Other };

inline std::string to_string(DecayClass c) {
  switch (c) {
    case DecayClass::ExpDecayBoth: return "ExpDecayBoth";
    case DecayClass::ExpDecayPlusBoundedMinus: return "ExpDecayPlusBoundedMinus";
    case DecayClass::LinearGrowthMinus: return "LinearGrowthMinus";
    case DecayClass::Other: return "Other";
  }
  return "Other";
}

inline DecayClass decay_class(const PiecewiseExpPoly& f) {
  const bool pos_decays = std::all_of(f.pos().begin(), f.pos().end(),
                                      [](const ExpTerm& t) { return t.exponent < 0; });
  if (!pos_decays) return DecayClass::Other;
  bool neg_decays = true;
  unsigned zero_power = 0;
  bool has_zero = false;
  for (const auto& t : f.neg()) {
    if (t.exponent > 0) continue;
    neg_decays = false;
    if (t.exponent < 0) return DecayClass::Other;
    has_zero = true;
    zero_power = std::max(zero_power, t.power);
  }
  if (neg_decays) return DecayClass::ExpDecayBoth;
  if (has_zero && zero_power == 0) return DecayClass::ExpDecayPlusBoundedMinus;
  if (has_zero && zero_power == 1) return DecayClass::LinearGrowthMinus;
  return DecayClass::Other;
}

inline bool decays_both_sides(const PiecewiseExpPoly& f) {
  return decay_class(f) == DecayClass::ExpDecayBoth;
}

// Sign (+1, 0, -1) of the dominant term as t -> +inf (pos side) or t -> -inf (neg side).
inline int tail_sign(const Side& s, bool plus_infinity) {
  if (s.empty()) return 0;
  const ExpTerm* best = &s.front();
  for (const auto& t : s) {
    if (plus_infinity) {
      if (t.exponent > best->exponent || (t.exponent == best->exponent && t.power > best->power)) best = &t;
    } else {
      if (t.exponent < best->exponent || (t.exponent == best->exponent && t.power > best->power)) best = &t;
    }
  }
  int sg = sgn(best->coeff);
  if (!plus_infinity && best->power % 2 == 1) sg = -sg;
  return sg;
}

struct LowerBound {
  long double min = 0;
  long double argmin = 0;
  int tail_plus = 0;
  int tail_minus = 0;
  bool certified = false;
};

inline LowerBound lower_bound(const PiecewiseExpPoly& f, long double window = 60,
                              long double step = 1.0L / 128) {
  if (!(window > 0) || !(step > 0)) throw RangeError("lower_bound needs positive window and step");
  LowerBound lb;
  lb.min = std::numeric_limits<long double>::infinity();
  auto consider = [&](long double v, long double t) {
    if (v < lb.min) {
      lb.min = v;
      lb.argmin = t;
    }
  };
  consider(to_ld(f.limit_pos()), 0);
  consider(to_ld(f.limit_neg()), -0.0L);
  const auto k_max = static_cast<long>(std::floor(window / step));
  for (long k = 1; k <= k_max; ++k) {
    const long double t = static_cast<long double>(k) * step;
    consider(f(t), t);
    consider(f(-t), -t);
  }
  lb.tail_plus = tail_sign(f.pos(), true);
  lb.tail_minus = tail_sign(f.neg(), false);
  lb.certified = lb.min > 0 && lb.tail_plus > 0 && lb.tail_minus > 0;
  return lb;
}

// Floating-point mirror used on hot numerical paths.
class ExpPolyEvaluator {
 public:
  ExpPolyEvaluator() = default;
  explicit ExpPolyEvaluator(const PiecewiseExpPoly& f) {
    auto conv = [](const Side& s) {
      std::vector<Term> out;
      for (const auto& t : s) out.push_back({to_ld(t.coeff), to_ld(t.exponent), t.power});
      return out;
    };
    neg_ = conv(f.neg());
    pos_ = conv(f.pos());
  }

  // k-th derivative of the smooth part at t (t > 0 uses the positive side; t == 0 follows right_at_zero).
  [[nodiscard]] long double derivative(long double t, unsigned k, bool right_at_zero = true) const {
    const bool use_pos = t > 0 || (t == 0 && right_at_zero);
    long double acc = 0;
    for (const auto& term : use_pos ? pos_ : neg_) acc += term_derivative(term, t, k);
    return acc;
  }
  [[nodiscard]] long double operator()(long double t) const { return derivative(t, 0); }

 private:
  struct Term {
    long double c;
    long double a;
    unsigned p;
  };
  static long double term_derivative(const Term& term, long double t, unsigned k) {
    // d^k (t^p e^{a t}) = e^{a t} sum_i C(k,i) p!/(p-i)! t^{p-i} a^{k-i}
    long double acc = 0;
    long double binom = 1;
    long double falling = 1;
    for (unsigned i = 0; i <= std::min(k, term.p); ++i) {
      if (i > 0) {
        binom = binom * static_cast<long double>(k - i + 1) / static_cast<long double>(i);
        falling *= static_cast<long double>(term.p - i + 1);
      }
      acc += binom * falling * std::pow(t, static_cast<long double>(term.p - i)) *
             std::pow(term.a, static_cast<long double>(k - i));
    }
    return term.c * acc * std::exp(term.a * t);
  }
  std::vector<Term> neg_;
  std::vector<Term> pos_;
};

// ---- canonical JSON --------------------------------------------------------

namespace detail {

inline nlohmann::ordered_json integer_to_json(const Integer& z) {
  if (fits_int64(z)) return static_cast<std::int64_t>(z.get_si());
  return z.get_str();
}

inline Integer integer_from_json(const nlohmann::ordered_json& j) {
  if (j.is_string()) return Integer(j.get<std::string>());
  if (j.is_number_integer()) return Integer(std::to_string(j.get<std::int64_t>()));
  throw Error("expected an integer or an integer string in PiecewiseExpPoly JSON");
}

inline nlohmann::ordered_json side_to_json(const Side& s) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& t : s)
    arr.push_back({integer_to_json(t.coeff.get_num()), integer_to_json(t.coeff.get_den()),
                   integer_to_json(t.exponent.get_num()), integer_to_json(t.exponent.get_den()),
                   t.power});
  return arr;
}

inline Rational rational_from(const nlohmann::ordered_json& num, const nlohmann::ordered_json& den) {
  Rational r(integer_from_json(num), integer_from_json(den));
  if (r.get_den() == 0) throw Error("zero denominator in PiecewiseExpPoly JSON");
  r.canonicalize();
  return r;
}

inline Side side_from_json(const nlohmann::ordered_json& arr) {
  Side s;
  for (const auto& e : arr) {
    if (!e.is_array() || e.size() != 5) throw Error("each term must be [cn, cd, en, ed, power]");
    s.push_back({rational_from(e[0], e[1]), rational_from(e[2], e[3]), e[4].get<unsigned>()});
  }
  return s;
}

}  // namespace detail

inline nlohmann::ordered_json to_json(const PiecewiseExpPoly& f) {
  nlohmann::ordered_json j;
  j["neg"] = detail::side_to_json(f.neg());
  j["pos"] = detail::side_to_json(f.pos());
  auto atoms = nlohmann::ordered_json::array();
  for (const auto& a : f.atoms())
    atoms.push_back({a.order, detail::integer_to_json(a.weight.get_num()),
                     detail::integer_to_json(a.weight.get_den())});
  j["atoms"] = atoms;
  return j;
}

inline PiecewiseExpPoly exppoly_from_json(const nlohmann::ordered_json& j) {
  std::vector<DeltaAtom> atoms;
  for (const auto& a : j.at("atoms")) {
    if (!a.is_array() || a.size() != 3) throw Error("each atom must be [order, num, den]");
    atoms.push_back({a[0].get<unsigned>(), detail::rational_from(a[1], a[2])});
  }
  return {detail::side_from_json(j.at("neg")), detail::side_from_json(j.at("pos")), atoms};
}

inline std::string describe(const PiecewiseExpPoly& f) {
  auto side = [](const Side& s) {
    if (s.empty()) return std::string("0");
    std::string out;
    for (const auto& t : s) {
      if (!out.empty()) out += " + ";
      out += "(" + t.coeff.get_str() + ")";
      if (t.power > 0) out += "*t^" + std::to_string(t.power);
      if (t.exponent != 0) out += "*exp(" + t.exponent.get_str() + "*t)";
    }
    return out;
  };
  std::string out = "{t<0: " + side(f.neg()) + "; t>0: " + side(f.pos());
  for (const auto& a : f.atoms())
    out += "; delta^(" + std::to_string(a.order) + ")*" + a.weight.get_str();
  return out + "}";
}

}  // namespace polyreg

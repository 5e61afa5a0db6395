#pragma once

// Exact derivatives of u = d_{x1}^k |x|^{2m-n} away from the origin, k = m - (n+1)/2,
// represented as finite sums c x^alpha r^e with rational c and odd e.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "polyreg/errors.hpp"
#include "polyreg/rational.hpp"
#include "polyreg/symbols.hpp"

namespace polyreg {

class RadialMonomialSum {
 public:
  using Key = std::pair<std::vector<int>, int>;  // (alpha, e)

  RadialMonomialSum() = default;
  explicit RadialMonomialSum(int n) : n_(n) {}

  static RadialMonomialSum radial_power(int n, int e) {
    RadialMonomialSum s(n);
    s.terms_[{std::vector<int>(static_cast<std::size_t>(n), 0), e}] = 1;
    return s;
  }

  [[nodiscard]] int dim() const { return n_; }
  [[nodiscard]] const std::map<Key, Rational>& terms() const { return terms_; }
  [[nodiscard]] bool is_zero() const { return terms_.empty(); }

  // d/dx_i (x^alpha r^e) = alpha_i x^{alpha - e_i} r^e + e x_i x^alpha r^{e-2}
  [[nodiscard]] RadialMonomialSum partial(int i) const {
    RadialMonomialSum out(n_);
    const auto ii = static_cast<std::size_t>(i);
    for (const auto& [key, c] : terms_) {
      const auto& [alpha, e] = key;
      if (alpha[ii] > 0) {
        auto a = alpha;
        --a[ii];
        out.add({a, e}, c * alpha[ii]);
      }
      if (e != 0) {
        auto a = alpha;
        ++a[ii];
        out.add({a, e - 2}, c * e);
      }
    }
    return out;
  }

  [[nodiscard]] RadialMonomialSum laplacian() const {
    RadialMonomialSum out(n_);
    for (int i = 0; i < n_; ++i) out = out + partial(i).partial(i);
    return out;
  }

  // Common homogeneity degree, or nullopt-like flag when mixed.
  [[nodiscard]] std::pair<bool, int> degree() const {
    bool first = true;
    int d = 0;
    for (const auto& [key, c] : terms_) {
      int k = key.second;
      for (int a : key.first) k += a;
      if (first) d = k, first = false;
      else if (k != d) return {false, 0};
    }
    return {true, d};
  }

  // Exact value at x with |x| = r (r rational, supplied by the caller).
  [[nodiscard]] Rational operator()(const std::vector<Rational>& x, const Rational& r) const {
    Rational acc = 0;
    for (const auto& [key, c] : terms_) {
      Rational v = c;
      for (std::size_t i = 0; i < x.size(); ++i) v *= pow_int(x[i], static_cast<unsigned>(key.first[i]));
      const int e = key.second;
      v *= e >= 0 ? pow_int(r, static_cast<unsigned>(e)) : Rational(1) / pow_int(r, static_cast<unsigned>(-e));
      acc += v;
    }
    return acc;
  }

  friend RadialMonomialSum operator+(RadialMonomialSum a, const RadialMonomialSum& b) {
    for (const auto& [k, c] : b.terms_) a.add(k, c);
    return a;
  }

 private:
  void add(const Key& k, const Rational& c) {
    auto& slot = terms_[k];
    slot += c;
    if (slot == 0) terms_.erase(k);
  }

  int n_ = 0;
  std::map<Key, Rational> terms_;
};

struct RationalPoint {
  std::string name;
  std::vector<Rational> x;
  Rational r;
};

// Directions with rational norm 1.
inline std::vector<RationalPoint> rational_rays(int n) {
  auto pad = [n](std::vector<Rational> v) {
    v.resize(static_cast<std::size_t>(n), Rational(0));
    return v;
  };
  std::vector<RationalPoint> rays;
  rays.push_back({"e1", pad({Rational(1)}), Rational(1)});
  rays.push_back({"(3,4)/5", pad({Rational(3, 5), Rational(4, 5)}), Rational(1)});
  rays.push_back({"(2,2,1)/3", pad({Rational(2, 3), Rational(2, 3), Rational(1, 3)}), Rational(1)});
  if (n >= 4) rays.push_back({"(1,1,1,1)/2", pad({Rational(1, 2), Rational(1, 2), Rational(1, 2), Rational(1, 2)}), Rational(1)});
  return rays;
}

struct CounterexampleReport {
  int m = 0, n = 0, k = 0, lambda = 0;
  std::size_t order_lambda_components = 0;
  std::size_t order_lambda1_components = 0;
  bool degree_lambda_zero = false;     // every order-lambda derivative is homogeneous of degree 0
  bool degree_lambda1_minus_one = false;
  bool lambda_constant_on_rays = false;  // f(x/8) == f(x/16) exactly
  bool lambda_ray_dependent = false;     // some component differs between two rays
  bool lambda1_scales_inverse = false;   // f(x/16) == 2 f(x/8) exactly
  bool lambda1_nonzero = false;
  bool polyharmonic = false;             // Delta^m u == 0 at the sample points
  std::vector<std::string> witnesses;
  [[nodiscard]] bool pass() const {
    return degree_lambda_zero && degree_lambda1_minus_one && lambda_constant_on_rays && lambda_ray_dependent &&
           lambda1_scales_inverse && lambda1_nonzero && polyharmonic;
  }
};

namespace detail {

// All derivatives of order d, indexed by nondecreasing index sequences.
inline std::vector<std::pair<std::vector<int>, RadialMonomialSum>> derivatives_of_order(const RadialMonomialSum& u,
                                                                                        int d) {
  std::vector<std::pair<std::vector<int>, RadialMonomialSum>> level{{{}, u}};
  for (int step = 0; step < d; ++step) {
    std::vector<std::pair<std::vector<int>, RadialMonomialSum>> next;
    for (const auto& [idx, f] : level) {
      const int start = idx.empty() ? 0 : idx.back();
      for (int i = start; i < u.dim(); ++i) {
        auto id = idx;
        id.push_back(i);
        next.emplace_back(std::move(id), f.partial(i));
      }
    }
    level = std::move(next);
  }
  return level;
}

inline std::string index_name(const std::vector<int>& idx) {
  std::string s = "d";
  for (int i : idx) s += std::to_string(i + 1);
  return s;
}

}  // namespace detail

inline RadialMonomialSum counterexample_function(int m, int n) {
  require_odd(n, "counterexample");
  require_dims(m, n, "counterexample");
  const int k = m - (n + 1) / 2;
  if (k < 0) throw RangeError("counterexample: need n <= 2m - 1");
  RadialMonomialSum u = RadialMonomialSum::radial_power(n, 2 * m - n);
  for (int i = 0; i < k; ++i) u = u.partial(0);
  return u;
}

inline CounterexampleReport counterexample(int m, int n) {
  const RadialMonomialSum u = counterexample_function(m, n);
  CounterexampleReport rep;
  rep.m = m;
  rep.n = n;
  rep.k = m - (n + 1) / 2;
  rep.lambda = rep.k + 1;
  const auto rays = rational_rays(n);
  auto at = [](const RadialMonomialSum& f, const RationalPoint& p, const Rational& s) {
    std::vector<Rational> x = p.x;
    for (auto& c : x) c *= s;
    return f(x, p.r * s);
  };
  const Rational s8(1, 8), s16(1, 16);

  const auto dl = detail::derivatives_of_order(u, rep.lambda);
  rep.order_lambda_components = dl.size();
  rep.degree_lambda_zero = true;
  rep.lambda_constant_on_rays = true;
  for (const auto& [idx, f] : dl) {
    const auto [homog, deg] = f.degree();
    rep.degree_lambda_zero = rep.degree_lambda_zero && (f.is_zero() || (homog && deg == 0));
    for (const auto& p : rays) rep.lambda_constant_on_rays = rep.lambda_constant_on_rays && at(f, p, s8) == at(f, p, s16);
    for (std::size_t a = 0; a < rays.size() && !rep.lambda_ray_dependent; ++a)
      for (std::size_t b = a + 1; b < rays.size(); ++b)
        if (at(f, rays[a], s8) != at(f, rays[b], s8)) {
          rep.lambda_ray_dependent = true;
          rep.witnesses.push_back(detail::index_name(idx) + " u: " + at(f, rays[a], s8).get_str() + " on " +
                                  rays[a].name + " vs " + at(f, rays[b], s8).get_str() + " on " + rays[b].name);
          break;
        }
  }

  const auto dl1 = detail::derivatives_of_order(u, rep.lambda + 1);
  rep.order_lambda1_components = dl1.size();
  rep.degree_lambda1_minus_one = true;
  rep.lambda1_scales_inverse = true;
  for (const auto& [idx, f] : dl1) {
    const auto [homog, deg] = f.degree();
    rep.degree_lambda1_minus_one = rep.degree_lambda1_minus_one && (f.is_zero() || (homog && deg == -1));
    for (const auto& p : rays) {
      const Rational a = at(f, p, s8), b = at(f, p, s16);
      rep.lambda1_scales_inverse = rep.lambda1_scales_inverse && b == 2 * a;
      if (a != 0 && !rep.lambda1_nonzero) {
        rep.lambda1_nonzero = true;
        rep.witnesses.push_back(detail::index_name(idx) + " u = " + a.get_str() + " at r=1/8 on " + p.name + ", " +
                                b.get_str() + " at r=1/16");
      }
    }
  }

  RadialMonomialSum lap = u;
  for (int i = 0; i < m; ++i) lap = lap.laplacian();
  rep.polyharmonic = true;
  for (const auto& p : rays) rep.polyharmonic = rep.polyharmonic && at(lap, p, s8) == 0;
  return rep;
}

inline nlohmann::ordered_json to_json(const CounterexampleReport& r) {
  return {{"m", r.m},
          {"n", r.n},
          {"k", r.k},
          {"lambda", r.lambda},
          {"order_lambda_components", r.order_lambda_components},
          {"order_lambda_plus_one_components", r.order_lambda1_components},
          {"order_lambda_degree_zero", r.degree_lambda_zero},
          {"order_lambda_constant_on_rays", r.lambda_constant_on_rays},
          {"order_lambda_ray_dependent", r.lambda_ray_dependent},
          {"order_lambda_plus_one_degree_minus_one", r.degree_lambda1_minus_one},
          {"order_lambda_plus_one_scales_inverse", r.lambda1_scales_inverse},
          {"order_lambda_plus_one_nonzero", r.lambda1_nonzero},
          {"polyharmonic_off_origin", r.polyharmonic},
          {"witnesses", r.witnesses},
          {"pass", r.pass()}};
}

}  // namespace polyreg

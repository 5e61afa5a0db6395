#pragma once

// Weighted energy inequalities checked on synthetic functions given mode by mode
// in the log-radial variable. Spherical integrals reduce to mode sums by orthonormality.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <nlohmann/json.hpp>

#include "polyreg/errors.hpp"
#include "polyreg/exppoly.hpp"
#include "polyreg/fundsol.hpp"
#include "polyreg/rational.hpp"
#include "polyreg/symbols.hpp"

namespace polyreg {

// Working precision of the quadrature layer; high t-derivatives of narrow profiles cancel heavily.
using Real = long double;

enum class ProfileKind { Bump, Gauss };

// One radial profile attached to the spherical harmonic Y_{q,l}.
//   Bump:  sin^N(pi (t - a)/w) on [a, a + w], a = center - w/2, N = power
//   Gauss: exp(-(t - center)^2 / (2 w^2)), cut off at 38 w
// each multiplied by amplitude * sum_k poly[k] (t - center)^k.
struct ModeProfile {
  int q = 0;
  int l = 0;
  ProfileKind kind = ProfileKind::Bump;
  Real center = 0;
  Real width = 1;
  int power = 4;
  std::vector<Real> poly{1.0};
  Real amplitude = 1;

  [[nodiscard]] std::pair<Real, Real> support() const {
    if (kind == ProfileKind::Bump) return {center - width / 2, center + width / 2};
    return {center - 38 * width, center + 38 * width};
  }

  // d-th derivative at t.
  [[nodiscard]] Real derivative(Real t, unsigned d) const {
    const auto [a, b] = support();
    if (t <= a || t >= b) return 0;
    const Real u = t - center;
    Real acc = 0;
    Real binom = 1;
    for (unsigned j = 0; j <= d; ++j) {
      if (j > 0) binom = binom * (d - j + 1) / j;
      const Real pj = poly_derivative(u, j);
      if (pj != 0) acc += binom * envelope(t, d - j) * pj;
    }
    return amplitude * acc;
  }
  [[nodiscard]] Real operator()(Real t) const { return derivative(t, 0); }

 private:
  [[nodiscard]] Real poly_derivative(Real u, unsigned j) const {
    Real acc = 0;
    for (std::size_t k = poly.size(); k-- > j;) {
      Real falling = 1;
      for (unsigned i = 0; i < j; ++i) falling *= static_cast<Real>(k - i);
      acc = acc * u + poly[k] * falling;
    }
    return acc;
  }

  [[nodiscard]] Real envelope(Real t, unsigned d) const {
    if (kind == ProfileKind::Bump) {
      // sin^N x = (2i)^{-N} sum_k C(N,k) (-1)^{N-k} e^{i(2k-N)x}
      const int N = power;
      const Real a = center - width / 2;
      const Real x = std::numbers::pi_v<Real> * (t - a) / width;
      const Real omega = std::numbers::pi_v<Real> / width;
      std::complex<Real> acc = 0;
      Real binom = 1;
      for (int k = 0; k <= N; ++k) {
        if (k > 0) binom = binom * (N - k + 1) / k;
        const Real freq = 2 * k - N;
        const std::complex<Real> factor = std::pow(std::complex<Real>(0, freq * omega), static_cast<int>(d));
        const Real sgn = (N - k) % 2 == 0 ? 1.0 : -1.0;
        acc += binom * sgn * factor * std::polar(Real(1), freq * x);
      }
      return (acc / std::pow(std::complex<Real>(0, 2), N)).real();
    }
    // d^d e^{-u^2/(2s^2)} = e^{-u^2/(2s^2)} H_d(u), H_{d+1} = H_d' - (u/s^2) H_d
    const Real u = t - center;
    const Real s2 = width * width;
    std::vector<Real> H{1.0};
    for (unsigned k = 0; k < d; ++k) {
      std::vector<Real> next(H.size() + 1, 0.0);
      for (std::size_t i = 1; i < H.size(); ++i) next[i - 1] += static_cast<Real>(i) * H[i];
      for (std::size_t i = 0; i < H.size(); ++i) next[i + 1] -= H[i] / s2;
      H = std::move(next);
    }
    Real acc = 0;
    for (std::size_t i = H.size(); i-- > 0;) acc = acc * u + H[i];
    return acc * std::exp(-u * u / (2 * s2));
  }
};

struct ModeFunction {
  int m = 1;
  int n = 3;
  std::vector<ModeProfile> profiles;
  std::string label;

  [[nodiscard]] bool odd() const { return n % 2 == 1; }

  // (q,l) keys in ascending order.
  [[nodiscard]] std::vector<std::pair<int, int>> keys() const {
    std::vector<std::pair<int, int>> k;
    for (const auto& p : profiles) k.emplace_back(p.q, p.l);
    std::sort(k.begin(), k.end());
    k.erase(std::unique(k.begin(), k.end()), k.end());
    return k;
  }

  [[nodiscard]] std::vector<const ModeProfile*> component(std::pair<int, int> key) const {
    std::vector<const ModeProfile*> out;
    for (const auto& p : profiles)
      if (p.q == key.first && p.l == key.second) out.push_back(&p);
    return out;
  }

  [[nodiscard]] std::pair<Real, Real> support() const {
    Real a = std::numeric_limits<Real>::infinity(), b = -a;
    for (const auto& p : profiles) {
      const auto [lo, hi] = p.support();
      a = std::min(a, lo);
      b = std::max(b, hi);
    }
    return {a, b};
  }

  [[nodiscard]] ModeFunction scaled(Real s) const {
    ModeFunction out = *this;
    for (auto& p : out.profiles) p.amplitude *= s;
    return out;
  }
};

// Sum over the profiles of one (q,l) component.
class Component {
 public:
  explicit Component(std::vector<const ModeProfile*> parts) : parts_(std::move(parts)) {}
  [[nodiscard]] Real derivative(Real t, unsigned d) const {
    Real acc = 0;
    for (const auto* p : parts_) acc += p->derivative(t, d);
    return acc;
  }
  // Breakpoints of the integrand: profile support ends and centres.
  [[nodiscard]] std::vector<Real> breakpoints() const {
    std::vector<Real> b;
    for (const auto* p : parts_) {
      const auto [lo, hi] = p->support();
      b.insert(b.end(), {lo, p->center, hi});
    }
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    return b;
  }

 private:
  std::vector<const ModeProfile*> parts_;
};

struct QuadratureOptions {
  Real abs_tol = 1e-10;
  Real rel_tol = 1e-8;
  unsigned max_depth = 8;
};

// Adaptive Gauss-Kronrod over [a,b] split at the given interior points.
template <class F>
Real integrate(F&& f, Real a, Real b, std::vector<Real> cuts = {}, const QuadratureOptions& opt = {}) {
  if (!(b > a)) return 0;
  cuts.push_back(a);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  Real total = 0, total_err = 0, total_l1 = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const Real lo = std::max(a, cuts[i]), hi = std::min(b, cuts[i + 1]);
    if (!(hi > lo)) continue;
    Real err = 0, l1 = 0;
    total += boost::math::quadrature::gauss_kronrod<Real, 61>::integrate(f, lo, hi, opt.max_depth, 1e-11, &err, &l1);
    total_err += err;
    total_l1 += l1;
  }
  // relative to the L1 norm: cancellation inside the integrand sets the attainable floor
  if (total_err > std::max(opt.abs_tol, opt.rel_tol * total_l1))
    {
    char buf[96];
    std::snprintf(buf, sizeof buf, "quadrature error estimate %.3e exceeds tolerance (integral %.3e)",
                  static_cast<double>(total_err), static_cast<double>(total));
    throw QuadratureFailure(buf);
  }
  return total;
}

// Coefficients of L(s, -q(q+n-2)) in s (lowest degree first), s standing for d/dt.
inline std::vector<Real> mode_operator(int m, int n, int q) {
  const Rational delta = -eigenvalue(q, n);
  const RatPoly p = n % 2 == 1 ? odd_operator_poly(m, n, delta) : even_operator_poly(m, n, delta);
  std::vector<Real> c;
  for (const auto& x : p.coeffs()) c.push_back((to_ld(x)));
  return c;
}

// Weight seen by the t-integrals, with an optional kink location.
struct ModeWeight {
  std::function<Real(Real)> value;
  std::optional<Real> kink;

  static ModeWeight one() { return {[](Real) { return 1.0; }, std::nullopt}; }
};

// sum over components of int L(d/dt, -q(q+n-2)) v_ql v_ql w dt
inline Real lhs_energy(const ModeFunction& v, const ModeWeight& w, const QuadratureOptions& opt = {}) {
  Real total = 0;
  for (const auto& key : v.keys()) {
    const Component c(v.component(key));
    const auto L = mode_operator(v.m, v.n, key.first);
    auto cuts = c.breakpoints();
    if (w.kink) cuts.push_back(*w.kink);
    auto f = [&](Real t) {
      Real Lv = 0;
      for (std::size_t k = 0; k < L.size(); ++k)
        if (L[k] != 0) Lv += L[k] * c.derivative(t, static_cast<unsigned>(k));
      return Lv * c.derivative(t, 0) * w.value(t);
    };
    total += integrate(f, cuts.front(), cuts.back(), cuts, opt);
  }
  return total;
}

// int (d^k v_ql)^2 psi dt for one component.
inline Real derivative_energy(const Component& c, unsigned k, const ModeWeight& psi,
                                const QuadratureOptions& opt = {}) {
  auto cuts = c.breakpoints();
  if (psi.kink) cuts.push_back(*psi.kink);
  auto f = [&](Real t) {
    const Real d = c.derivative(t, k);
    return d * d * psi.value(t);
  };
  return integrate(f, cuts.front(), cuts.back(), cuts, opt);
}

// sum_l v_ql(tau)^2, i.e. the spherical L^2 norm at tau.
inline Real trace_norm2(const ModeFunction& v, Real tau) {
  Real acc = 0;
  for (const auto& key : v.keys()) {
    const Real x = Component(v.component(key)).derivative(tau, 0);
    acc += x * x;
  }
  return acc;
}

// Frequency-side integrand Re L(i g, -q(q+n-2)).
inline Real symbol_real_part(const std::vector<Real>& L, Real g) {
  Real acc = 0;
  for (std::size_t k = 0; k < L.size(); k += 2) acc += L[k] * ((k / 2) % 2 == 0 ? 1.0 : -1.0) * std::pow(g, static_cast<Real>(k));
  return acc;
}

// ---- integration by parts ----------------------------------------------------

// int d^k v . v . h dt = sum_{(i,j)} c_ij int (d^i v)^2 d^j h dt, built from
// I_k[v,h] = -I_{k-2}[v',h] - I_{k-1}[v,h'], I_0 = {(0,0): 1}, I_1 = {(0,1): -1/2}.
using IbpTable = std::map<std::pair<int, int>, Rational>;

inline IbpTable ibp_coefficients(int k) {
  if (k < 0) throw RangeError("ibp_coefficients: k must be nonnegative");
  std::vector<IbpTable> I{{{{0, 0}, Rational(1)}}, {{{0, 1}, Rational(-1, 2)}}};
  for (int l = 2; l <= k; ++l) {
    IbpTable next;
    for (const auto& [ij, c] : I[static_cast<std::size_t>(l - 2)]) next[{ij.first + 1, ij.second}] -= c;
    for (const auto& [ij, c] : I[static_cast<std::size_t>(l - 1)]) next[{ij.first, ij.second + 1}] -= c;
    std::erase_if(next, [](const auto& e) { return e.second == 0; });
    I.push_back(std::move(next));
  }
  return I[static_cast<std::size_t>(k)];
}

// ---- margin reports ----------------------------------------------------------

struct MarginCase {
  std::string label;
  Real lhs = 0;
  Real rhs = 0;
  Real ratio = 0;  // feasible constant for this case
  bool ok = false;
};

struct MarginReport {
  std::string theorem;
  int m = 0, n = 0;
  std::vector<MarginCase> cases;
  Real C = 0;  // feasible constant for the whole family
  Real C1 = 0, C2 = 0;  // weight constants selected by the search, when applicable
  bool pass = false;
  std::string family;
};

inline nlohmann::ordered_json to_json(const MarginReport& r) {
  nlohmann::ordered_json j;
  j["theorem"] = r.theorem;
  j["m"] = r.m;
  j["n"] = r.n;
  j["family"] = r.family;
  j["C"] = r.C;
  if (r.C1 != 0 || r.C2 != 0) j["weight_constants"] = {r.C1, r.C2};
  auto cs = nlohmann::ordered_json::array();
  for (const auto& c : r.cases)
    cs.push_back({{"label", c.label}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"ratio", c.ratio}, {"ok", c.ok}});
  j["cases"] = cs;
  j["pass"] = r.pass;
  return j;
}

namespace detail {

// lower bound LHS >= C RHS: per-case C = LHS/RHS (infinite when RHS <= 0 <= LHS).
inline MarginCase lower_case(std::string label, Real lhs, Real rhs) {
  MarginCase c{std::move(label), lhs, rhs, 0, false};
  if (rhs > 0) c.ratio = lhs / rhs;
  else c.ratio = lhs >= 0 ? std::numeric_limits<Real>::infinity() : -std::numeric_limits<Real>::infinity();
  c.ok = c.ratio > 0;
  return c;
}

inline void finish_lower(MarginReport& r) {
  r.C = std::numeric_limits<Real>::infinity();
  r.pass = !r.cases.empty();
  for (const auto& c : r.cases) {
    r.C = std::min(r.C, c.ratio);
    r.pass = r.pass && c.ok;
  }
}

inline std::vector<Real> tau_grid(const ModeFunction& v, int points, Real lo_clip = -std::numeric_limits<Real>::infinity()) {
  auto [a, b] = v.support();
  for (const auto& p : v.profiles)
    if (p.kind == ProfileKind::Gauss) {
      a = std::max(a, p.center - 6 * p.width);
      b = std::min(b, p.center + 6 * p.width);
    }
  a = std::max(a, lo_clip);
  std::vector<Real> g;
  for (int i = 0; i < points; ++i) g.push_back(a + (b - a) * (i + 0.5) / points);
  return g;
}

inline std::vector<Real> constant_grid() {
  std::vector<Real> g;
  for (int e = -4; e <= 4; ++e) g.push_back(std::ldexp(1.0, e));
  return g;
}

}  // namespace detail

// Odd n: LHS = energy with weight 1 (the |x|^{-1} weight after conjugation);
// RHS = sum_k int (d^k v)^2 + int v prod(-delta - p(p+n-2)) v.
inline MarginReport check_thm_2_1(const std::vector<ModeFunction>& family, const QuadratureOptions& opt = {}) {
  MarginReport r;
  r.theorem = "2.1";
  if (family.empty()) return r;
  r.m = family.front().m;
  r.n = family.front().n;
  for (const auto& v : family) {
    require_odd(v.n, "check_thm_2_1");
    require_dims(v.m, v.n, "check_thm_2_1");
    const Real lhs = lhs_energy(v, ModeWeight::one(), opt);
    Real rhs = 0;
    for (const auto& key : v.keys()) {
      const Component c(v.component(key));
      for (int k = 1; k <= v.m; ++k) rhs += derivative_energy(c, static_cast<unsigned>(k), ModeWeight::one(), opt);
      const Real prod = (to_ld(odd_product_term(v.m, v.n, key.first)));
      if (prod != 0) rhs += prod * derivative_energy(c, 0, ModeWeight::one(), opt);
    }
    r.cases.push_back(detail::lower_case(v.label, lhs, rhs));
  }
  detail::finish_lower(r);
  r.family = std::to_string(family.size()) + " mode functions";
  return r;
}

// Upper bound sum_l v_ql(tau)^2 <= C RHS(tau) over a tau grid, RHS affine in two constants:
// RHS = A(tau) + X * B0 + Y * B1. Returns the smallest feasible C over the (X,Y) grid.
namespace detail {

struct UpperData {
  std::vector<Real> lhs;  // per tau
  std::vector<Real> A;    // per tau
  Real B0 = 0, B1 = 0;
};

inline void finish_upper(MarginReport& r, const std::vector<std::string>& labels, const std::vector<UpperData>& data,
                         bool x_scales_A) {
  r.C = std::numeric_limits<Real>::infinity();
  r.pass = false;
  for (Real X : constant_grid())
    for (Real Y : constant_grid()) {
      Real worst = 0;
      bool feasible = true;
      for (const auto& d : data)
        for (std::size_t i = 0; i < d.lhs.size() && feasible; ++i) {
          const Real rhs = (x_scales_A ? X * d.A[i] : d.A[i] + X * d.B0) + Y * (x_scales_A ? d.B0 : d.B1);
          if (rhs <= 0) {
            if (d.lhs[i] > 0 || rhs < 0) feasible = false;
            continue;
          }
          worst = std::max(worst, d.lhs[i] / rhs);
        }
      if (feasible && worst < r.C) {
        r.C = worst;
        r.C1 = X;
        r.C2 = Y;
        r.pass = true;
      }
    }
  r.cases.clear();
  for (std::size_t f = 0; f < data.size(); ++f) {
    const auto& d = data[f];
    MarginCase c{labels[f], 0, 0, 0, true};
    for (std::size_t i = 0; i < d.lhs.size(); ++i) {
      const Real rhs = (x_scales_A ? r.C1 * d.A[i] : d.A[i] + r.C1 * d.B0) + r.C2 * (x_scales_A ? d.B0 : d.B1);
      const Real ratio = rhs > 0 ? d.lhs[i] / rhs : (d.lhs[i] > 0 ? std::numeric_limits<Real>::infinity() : 0);
      if (ratio >= c.ratio) c = {labels[f], d.lhs[i], rhs, ratio, std::isfinite(ratio)};
    }
    r.cases.push_back(c);
  }
  if (!r.pass) r.C = std::numeric_limits<Real>::infinity();
}

}  // namespace detail

// Odd n: sum_l v_ql(tau)^2 <= C int L v v (C1 h(t - tau) + C2) dt, searched over C1, C2 in {2^-4..2^4}.
inline MarginReport check_thm_4_2(const std::vector<ModeFunction>& family, int tau_points = 9,
                                  const QuadratureOptions& opt = {}) {
  MarginReport r;
  r.theorem = "4.2";
  if (family.empty()) return r;
  r.m = family.front().m;
  r.n = family.front().n;
  std::vector<detail::UpperData> data;
  std::vector<std::string> labels;
  for (const auto& v : family) {
    require_odd(v.n, "check_thm_4_2");
    const ExpPolyEvaluator h(h_odd(v.m, v.n));
    detail::UpperData d;
    d.B0 = lhs_energy(v, ModeWeight::one(), opt);
    for (Real tau : detail::tau_grid(v, tau_points)) {
      d.lhs.push_back(trace_norm2(v, tau));
      d.A.push_back(lhs_energy(v, {[&h, tau](Real t) { return static_cast<Real>(h(t - tau)); }, tau}, opt));
    }
    data.push_back(std::move(d));
    labels.push_back(v.label);
  }
  detail::finish_upper(r, labels, data, true);
  r.family = std::to_string(family.size()) + " mode functions x " + std::to_string(tau_points) + " tau values";
  return r;
}

enum class PsiKind { One, CRplusT };

// Even n: LHS = int L_o v v psi; RHS = sum_k sum_{i<=m-k} lambda^i int (d^k v)^2 psi + L_o(0) int v^2 psi.
inline MarginReport check_thm_5_1(const std::vector<ModeFunction>& family, PsiKind psi, Real R,
                                  const QuadratureOptions& opt = {}) {
  MarginReport r;
  r.theorem = "5.1";
  if (family.empty()) return r;
  if (!(R > 0)) throw RangeError("check_thm_5_1: R must be positive");
  r.m = family.front().m;
  r.n = family.front().n;
  const Real CR = std::log(4 * R);
  const ModeWeight w = psi == PsiKind::One ? ModeWeight::one()
                                           : ModeWeight{[CR](Real t) { return CR + t; }, std::nullopt};
  for (const auto& v : family) {
    require_even(v.n, "check_thm_5_1");
    if (v.n > 2 * v.m) throw RangeError("check_thm_5_1: need n <= 2m");
    if (v.support().first < -std::log(2 * R)) throw RangeError("check_thm_5_1: support must lie in B_{2R}");
    const Real lhs = lhs_energy(v, w, opt);
    Real rhs = 0;
    for (const auto& key : v.keys()) {
      const Component c(v.component(key));
      const Real lam = static_cast<Real>(key.first) * (key.first + v.n - 2);
      for (int k = 1; k <= v.m; ++k) {
        Real mult = 0, p = 1;
        for (int i = 0; i <= v.m - k; ++i, p *= lam) mult += p;
        rhs += mult * derivative_energy(c, static_cast<unsigned>(k), w, opt);
      }
      const Real zero = (to_ld(even_zero_symbol({v.m, v.n, key.first})));
      if (zero != 0) rhs += zero * derivative_energy(c, 0, w, opt);
    }
    r.cases.push_back(detail::lower_case(v.label, lhs, rhs));
  }
  detail::finish_lower(r);
  r.family = std::to_string(family.size()) + " mode functions, psi=" + (psi == PsiKind::One ? "1" : "C_R+t");
  return r;
}

// Even n: sum_l v_ql(tau)^2 <= C int L_o v v (h(t-tau) + mu4 (C_R+tau) + C' + C''(C_R+t)) dt,
// tau restricted to t >= log(1/(2R)); C', C'' searched over {2^-4..2^4}.
inline MarginReport check_thm_6_3(const std::vector<ModeFunction>& family, Real R, int tau_points = 9,
                                  const QuadratureOptions& opt = {}) {
  MarginReport r;
  r.theorem = "6.3";
  if (family.empty()) return r;
  if (!(R > 0)) throw RangeError("check_thm_6_3: R must be positive");
  r.m = family.front().m;
  r.n = family.front().n;
  const Real CR = std::log(4 * R);
  std::vector<detail::UpperData> data;
  std::vector<std::string> labels;
  for (const auto& v : family) {
    require_even(v.n, "check_thm_6_3");
    if (v.support().first < -std::log(2 * R)) throw RangeError("check_thm_6_3: support must lie in B_{2R}");
    const auto hx = h_even(v.m, v.n);
    const ExpPolyEvaluator h(hx);
    const Real mu4 = (to_ld(linear_tail(hx)));
    detail::UpperData d;
    d.B0 = lhs_energy(v, ModeWeight::one(), opt);
    d.B1 = lhs_energy(v, {[CR](Real t) { return CR + t; }, std::nullopt}, opt);
    for (Real tau : detail::tau_grid(v, tau_points, -std::log(2 * R))) {
      d.lhs.push_back(trace_norm2(v, tau));
      const Real Ah = lhs_energy(v, {[&h, tau](Real t) { return static_cast<Real>(h(t - tau)); }, tau}, opt);
      d.A.push_back(Ah + mu4 * (CR + tau) * d.B0);
    }
    data.push_back(std::move(d));
    labels.push_back(v.label);
  }
  detail::finish_upper(r, labels, data, false);
  r.family = std::to_string(family.size()) + " mode functions x " + std::to_string(tau_points) + " tau values";
  return r;
}

// ---- standard families ---------------------------------------------------------

// A fixed library of mode functions for (m, n): bumps of varying width, centre and
// modulation on several modes, multi-mode sums, and Hermite-modulated Gaussians.
// All supports lie in t > 0, i.e. inside the unit ball.
inline std::vector<ModeFunction> standard_library(int m, int n) {
  const int N = 2 * m + 2;
  std::vector<ModeFunction> lib;
  auto bump = [&](int q, int l, Real c, Real w, std::vector<Real> poly = {1.0}) {
    ModeProfile p;
    p.q = q;
    p.l = l;
    p.kind = ProfileKind::Bump;
    p.center = c;
    p.width = w;
    p.power = N;
    p.poly = std::move(poly);
    return p;
  };
  auto gauss = [&](int q, int l, Real c, Real s, std::vector<Real> poly = {1.0}) {
    ModeProfile p;
    p.q = q;
    p.l = l;
    p.kind = ProfileKind::Gauss;
    p.center = c;
    p.width = s;
    p.poly = std::move(poly);
    return p;
  };
  auto add = [&](std::string label, std::vector<ModeProfile> ps) { lib.push_back({m, n, std::move(ps), std::move(label)}); };
  const int qc = n % 2 == 1 ? m - (n - 1) / 2 : std::max(0, m - n / 2);
  add("bump q=0 w=2", {bump(0, 0, 3.0, 2.0)});
  add("bump q=0 w=0.5", {bump(0, 0, 2.0, 0.5)});
  add("bump q=0 w=6", {bump(0, 0, 5.0, 6.0)});
  add("bump q=1 w=1.5", {bump(1, 0, 2.5, 1.5)});
  add("bump q=2 modulated", {bump(2, 1, 3.0, 2.0, {1.0, 0.7, -0.4})});
  add("bump q=qc", {bump(qc, 0, 3.0, 2.0)});
  add("bump q=qc+1 shifted", {bump(qc + 1, 0, 4.0, 3.0, {0.2, 1.0})});
  add("bump q=5", {bump(5, 2, 2.5, 1.0)});
  add("two modes", {bump(0, 0, 3.0, 2.0), bump(1, 1, 3.5, 1.0, {1.0, -1.0})});
  add("three modes overlapping", {bump(0, 0, 3.0, 2.0), bump(2, 0, 2.8, 1.2), bump(3, 1, 3.2, 2.5, {0.5})});
  add("same mode two bumps", {bump(1, 0, 2.0, 1.0), bump(1, 0, 3.0, 1.5, {-0.6})});
  add("odd modulation q=0", {bump(0, 0, 3.0, 2.0, {0.0, 1.0})});
  add("gauss q=0", {gauss(0, 0, 20.0, 0.5)});
  add("gauss q=1 hermite", {gauss(1, 0, 30.0, 0.7, {1.0, 0.5, -0.3})});
  return lib;
}

// Family from a text description: "standard", or functions separated by ';', each a '+'-joined list of
// profiles kind(key=value,...) with kind bump|gauss and keys q, l, c, w, N, a, poly (poly as a|b|c).
// Example: "bump(q=0,c=3,w=2)+bump(q=1,c=3.5,w=1);gauss(q=1,c=20,w=0.5,poly=1|0.5)".
inline std::vector<ModeFunction> parse_mode_spec(int m, int n, const std::string& spec) {
  if (spec.empty() || spec == "standard") return standard_library(m, n);
  auto split = [](const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    int depth = 0;
    for (char ch : s) {
      if (ch == '(') ++depth;
      if (ch == ')') --depth;
      if (ch == sep && depth == 0) {
        out.push_back(cur);
        cur.clear();
      } else if (ch != ' ') cur += ch;
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
  };
  auto number = [](const std::string& v, const std::string& what) -> Real {
    try {
      std::size_t pos = 0;
      const Real x = std::stold(v, &pos);
      if (pos == v.size()) return x;
    } catch (const std::exception&) {
    }
    throw ConfigError("bad number '" + v + "' for " + what, 0, "modes");
  };
  std::vector<ModeFunction> family;
  for (const auto& fn : split(spec, ';')) {
    ModeFunction f{m, n, {}, fn};
    for (const auto& prof : split(fn, '+')) {
      const auto open = prof.find('(');
      if (open == std::string::npos || prof.back() != ')')
        throw ConfigError("profile '" + prof + "' must look like kind(key=value,...)", 0, "modes");
      ModeProfile p;
      p.power = 2 * m + 2;
      const std::string kind = prof.substr(0, open);
      if (kind == "bump") p.kind = ProfileKind::Bump;
      else if (kind == "gauss") p.kind = ProfileKind::Gauss;
      else throw ConfigError("unknown profile kind '" + kind + "'", 0, "modes");
      for (const auto& kv : split(prof.substr(open + 1, prof.size() - open - 2), ',')) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("expected key=value in '" + kv + "'", 0, "modes");
        const std::string k = kv.substr(0, eq), v = kv.substr(eq + 1);
        if (k == "q") p.q = static_cast<int>(number(v, k));
        else if (k == "l") p.l = static_cast<int>(number(v, k));
        else if (k == "c") p.center = number(v, k);
        else if (k == "w") p.width = number(v, k);
        else if (k == "N") p.power = static_cast<int>(number(v, k));
        else if (k == "a") p.amplitude = number(v, k);
        else if (k == "poly") {
          p.poly.clear();
          for (const auto& c : split(v, '|')) p.poly.push_back(number(c, k));
        } else throw ConfigError("unknown profile key '" + k + "'", 0, "modes");
      }
      if (p.q < 0 || !(p.width > 0)) throw ConfigError("profile needs q >= 0 and w > 0", 0, "modes");
      if (p.kind == ProfileKind::Bump && p.power < 2 * m + 1)
        throw ConfigError("bump power N must be at least 2m+1 for the needed smoothness", 0, "modes");
      f.profiles.push_back(p);
    }
    family.push_back(std::move(f));
  }
  if (family.empty()) throw ConfigError("empty mode list", 0, "modes");
  return family;
}

}  // namespace polyreg

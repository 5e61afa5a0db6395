#pragma once

// Fundamental solutions h of constant-coefficient operators on the line and the
// weights built from them.

#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "polyreg/errors.hpp"
#include "polyreg/exppoly.hpp"
#include "polyreg/rational.hpp"
#include "polyreg/symbols.hpp"

namespace polyreg {

using RatMatrix = std::vector<std::vector<Rational>>;

// Gaussian elimination over Q. Throws SingularJumpSystem when the matrix is singular.
inline std::vector<Rational> solve_exact(RatMatrix A, std::vector<Rational> b) {
  const std::size_t n = A.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && A[piv][col] == 0) ++piv;
    if (piv == n) throw SingularJumpSystem("jump system is singular");
    std::swap(A[piv], A[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || A[r][col] == 0) continue;
      const Rational f = A[r][col] / A[col][col];
      for (std::size_t c = col; c < n; ++c) A[r][c] -= f * A[col][c];
      b[r] -= f * b[col];
    }
  }
  for (std::size_t i = 0; i < n; ++i) b[i] /= A[i][i];
  return b;
}

struct BasisFunction {
  Rational root;
  unsigned power = 0;
  bool positive_side = false;  // t^power e^{root t} lives on t>0 when root < 0
};

struct JumpSystem {
  RatMatrix matrix;
  std::vector<Rational> rhs;
  std::vector<BasisFunction> basis;
};

// Roots r < 0 go to t > 0, roots r >= 0 to t < 0; rows k = 0..N-1 encode
// d^k h(0+) - d^k h(0-) = 0 for k < N-1 and 1/sign for k = N-1.
inline JumpSystem jump_system(const DiffOp& d) {
  if (d.order() == 0) throw RangeError("jump_system: operator of order 0");
  std::map<Rational, unsigned> mult;
  for (const auto& r : d.roots) ++mult[r];
  JumpSystem js;
  for (const auto& [r, k] : mult)
    for (unsigned p = 0; p < k; ++p) js.basis.push_back({r, p, r < 0});
  const std::size_t N = d.order();
  js.matrix.assign(N, std::vector<Rational>(N));
  js.rhs.assign(N, Rational(0));
  js.rhs[N - 1] = Rational(1, 1) / Rational(d.sign);
  for (std::size_t row = 0; row < N; ++row)
    for (std::size_t c = 0; c < N; ++c) {
      const auto& bf = js.basis[c];
      const Rational v = detail::term_derivative_at_zero({Rational(1), bf.root, bf.power}, static_cast<unsigned>(row));
      js.matrix[row][c] = bf.positive_side ? v : Rational(-v);
    }
  return js;
}

inline PiecewiseExpPoly assemble(const JumpSystem& js, const std::vector<Rational>& coeffs) {
  Side neg, pos;
  for (std::size_t i = 0; i < js.basis.size(); ++i) {
    const auto& bf = js.basis[i];
    (bf.positive_side ? pos : neg).push_back({coeffs[i], bf.root, bf.power});
  }
  return {neg, pos};
}

// Fundamental solution decaying on t>0 and of polynomial growth at most on t<0.
inline PiecewiseExpPoly fundamental_solution(const DiffOp& d) {
  const auto js = jump_system(d);
  return assemble(js, solve_exact(js.matrix, js.rhs));
}

// L^{m,n}(-d/dt, 0).
inline DiffOp odd_h_operator(int m, int n) { return odd_symbol(m, n, 0); }

// L_o(-d/dt, 0) when m - n/2 is even, L_o(-d/dt, 1-n) otherwise.
inline DiffOp even_h_operator(int m, int n) {
  require_even(n, "even_h_operator");
  const int p0 = (m - n / 2) % 2 == 0 ? 0 : 1;
  return even_symbol({m, n, p0});
}

// Closed-form residues for the 2m distinct roots of L^{m,n}(-d/dt, 0).
inline PiecewiseExpPoly h_odd(int m, int n) {
  require_odd(n, "h_odd");
  require_dims(m, n, "h_odd");
  // gamma = (-alpha_1..-alpha_m, beta_1..beta_m); kappa_i = (-1)^{m+1} / prod_{j != i}(gamma_j - gamma_i)
  std::vector<Rational> gam;
  const auto roots = odd_h_operator(m, n).sorted_roots();
  for (const auto& r : roots)
    if (r < 0) gam.push_back(r);
  for (const auto& r : roots)
    if (r >= 0) gam.push_back(r);
  for (std::size_t i = 1; i < gam.size(); ++i)
    if (gam[i] == gam[i - 1]) throw Error("h_odd: repeated characteristic root");
  Side neg, pos;
  for (std::size_t i = 0; i < gam.size(); ++i) {
    Rational prod = 1;
    for (std::size_t j = 0; j < gam.size(); ++j)
      if (j != i) prod *= gam[j] - gam[i];
    Rational kappa = Rational(1) / prod;
    if (m % 2 == 0) kappa = -kappa;
    // kappa_i = nu_i for negative roots (t > 0), kappa_i = -mu_i for the others (t < 0)
    if (gam[i] < 0) pos.push_back({kappa, gam[i], 0});
    else neg.push_back({-kappa, gam[i], 0});
  }
  return {neg, pos};
}

inline PiecewiseExpPoly h_odd_jump(int m, int n) { return fundamental_solution(odd_h_operator(m, n)); }

inline PiecewiseExpPoly h_even(int m, int n) {
  require_even(n, "h_even");
  if (m < 1 || n < 2 || n > 2 * m) throw RangeError("h_even: need 2 <= n <= 2m");
  return fundamental_solution(even_h_operator(m, n));
}

struct ResidualReport {
  PiecewiseExpPoly residual;
  [[nodiscard]] bool zero() const { return residual.is_zero(); }
};

inline ResidualReport verify_fundamental(const PiecewiseExpPoly& h, const DiffOp& d) {
  return {apply_op(d, h) - PiecewiseExpPoly::delta()};
}

// d^k h(0+) - d^k h(0-), k = 0..order-1.
inline std::vector<Rational> continuity_jumps(const PiecewiseExpPoly& h, unsigned order) {
  std::vector<Rational> out;
  for (unsigned k = 0; k < order; ++k) out.push_back(h.limit_pos(k) - h.limit_neg(k));
  return out;
}

// mu4: the coefficient of t on t<0.
inline Rational linear_tail(const PiecewiseExpPoly& h) {
  for (const auto& t : h.neg())
    if (t.exponent == 0 && t.power == 1) return t.coeff;
  return 0;
}

// ---- weights -----------------------------------------------------------------

enum class WeightKind { OddPower, OddG, EvenPsiConst, EvenPsiLog, EvenG };

inline std::string to_string(WeightKind k) {
  switch (k) {
    case WeightKind::OddPower: return "OddPower";
    case WeightKind::OddG: return "OddG";
    case WeightKind::EvenPsiConst: return "EvenPsiConst";
    case WeightKind::EvenPsiLog: return "EvenPsiLog";
    case WeightKind::EvenG: return "EvenG";
  }
  return "?";
}

// Weight g(t, tau) in x-space; mode_* strip the e^t factor that the odd
// substitution absorbs, leaving the weight seen by the t-integrals.
struct WeightSpec {
  WeightKind kind = WeightKind::OddPower;
  PiecewiseExpPoly h;
  ExpPolyEvaluator h_eval;
  double tau = 0;
  double C1 = 1, C2 = 1, Cp = 1, Cpp = 1;
  double mu4 = 0;
  double C_R = 0;
  double R = 0;

  [[nodiscard]] bool has_kink() const { return kind == WeightKind::OddG || kind == WeightKind::EvenG; }

  // k-th t-derivative of the mode-space weight.
  [[nodiscard]] long double mode_derivative(long double t, unsigned k) const {
    switch (kind) {
      case WeightKind::OddPower: return k == 0 ? 1.0L : 0.0L;
      case WeightKind::EvenPsiConst: return k == 0 ? 1.0L : 0.0L;
      case WeightKind::EvenPsiLog: return k == 0 ? C_R + t : (k == 1 ? 1.0L : 0.0L);
      case WeightKind::OddG:
        return C1 * h_eval.derivative(t - tau, k) + (k == 0 ? C2 : 0.0L);
      case WeightKind::EvenG: {
        long double v = h_eval.derivative(t - tau, k);
        if (k == 0) v += mu4 * (C_R + tau) + Cp + Cpp * (C_R + t);
        if (k == 1) v += Cpp;
        return v;
      }
    }
    return 0;
  }
  [[nodiscard]] long double mode_value(long double t) const { return mode_derivative(t, 0); }

  // x-space value: odd weights carry e^t = |x|^{-1}.
  [[nodiscard]] long double value(long double t) const {
    const bool odd = kind == WeightKind::OddPower || kind == WeightKind::OddG;
    return odd ? std::exp(t) * mode_value(t) : mode_value(t);
  }

  // k-th t-derivative of the x-space weight.
  [[nodiscard]] long double derivative(long double t, unsigned k) const {
    const bool odd = kind == WeightKind::OddPower || kind == WeightKind::OddG;
    if (!odd) return mode_derivative(t, k);
    long double acc = 0, binom = 1;
    for (unsigned i = 0; i <= k; ++i) {
      if (i > 0) binom = binom * (k - i + 1) / i;
      acc += binom * mode_derivative(t, i);
    }
    return std::exp(t) * acc;
  }
};

inline WeightSpec weight_odd(int m, int n, double tau, double C1 = 1, double C2 = 1) {
  WeightSpec w;
  w.kind = WeightKind::OddG;
  w.h = h_odd(m, n);
  w.h_eval = ExpPolyEvaluator(w.h);
  w.tau = tau;
  w.C1 = C1;
  w.C2 = C2;
  return w;
}

inline WeightSpec weight_odd_power() { return WeightSpec{}; }

inline WeightSpec weight_even(int m, int n, double tau, double R, double Cp = 1, double Cpp = 1) {
  if (!(R > 0)) throw RangeError("weight_even: R must be positive");
  WeightSpec w;
  w.kind = WeightKind::EvenG;
  w.h = h_even(m, n);
  w.h_eval = ExpPolyEvaluator(w.h);
  w.tau = tau;
  w.R = R;
  w.C_R = std::log(4 * R);
  w.mu4 = static_cast<double>(to_ld(linear_tail(w.h)));
  w.Cp = Cp;
  w.Cpp = Cpp;
  return w;
}

inline WeightSpec weight_psi(bool log_branch, double R = 1) {
  if (!(R > 0)) throw RangeError("weight_psi: R must be positive");
  WeightSpec w;
  w.kind = log_branch ? WeightKind::EvenPsiLog : WeightKind::EvenPsiConst;
  w.R = R;
  w.C_R = std::log(4 * R);
  return w;
}

// Exact radial-derivative structure of the weights: for the odd weight,
// d_r^k g = (-1)^k e^{(k+1)t} F_k with F_0 = C1 h + C2 and F_k = k F_{k-1} + F_{k-1}';
// for the even weight, d_r^k g = (-1)^k e^{kt} G_k with G_1 = g', G_k = (k-1) G_{k-1} + G_{k-1}'.
// Returns F_k (odd) / G_k (even) for tau = 0 and unit constants.
inline std::vector<PiecewiseExpPoly> radial_derivative_profiles(const PiecewiseExpPoly& h, bool odd, unsigned k_max) {
  std::vector<PiecewiseExpPoly> out;
  auto smooth = [](const PiecewiseExpPoly& f) { return PiecewiseExpPoly(f.neg(), f.pos()); };
  if (odd) {
    PiecewiseExpPoly F = h + PiecewiseExpPoly({{Rational(1), Rational(0), 0}}, {{Rational(1), Rational(0), 0}});
    out.push_back(F);
    for (unsigned k = 1; k <= k_max; ++k) {
      F = Rational(k) * F + smooth(differentiate(F));
      out.push_back(F);
    }
  } else {
    // g = h + const + (C_R + t): only g' matters
    const PiecewiseExpPoly one({{Rational(1), Rational(0), 0}}, {{Rational(1), Rational(0), 0}});
    PiecewiseExpPoly G = smooth(differentiate(h)) + one;
    out.push_back(G);
    for (unsigned k = 2; k <= k_max; ++k) {
      G = Rational(k - 1) * G + smooth(differentiate(G));
      out.push_back(G);
    }
  }
  return out;
}

inline nlohmann::ordered_json fundsol_report(int m, int n) {
  nlohmann::ordered_json j;
  j["m"] = m;
  j["n"] = n;
  const bool odd = n % 2 == 1;
  const PiecewiseExpPoly h = odd ? h_odd(m, n) : h_even(m, n);
  const DiffOp d = odd ? odd_h_operator(m, n) : even_h_operator(m, n);
  j["operator"] = {{"sign", d.sign}, {"roots", [&] {
                      auto a = nlohmann::ordered_json::array();
                      for (const auto& r : d.sorted_roots()) a.push_back(r.get_str());
                      return a;
                    }()}};
  j["h"] = to_json(h);
  const auto res = verify_fundamental(h, d);
  j["residual"] = to_json(res.residual);
  j["residual_zero"] = res.zero();
  j["decay_class"] = to_string(decay_class(h));
  if (!odd) j["mu4"] = linear_tail(h).get_str();
  if (odd) j["vandermonde_matches_jump_system"] = h == h_odd_jump(m, n);
  return j;
}

}  // namespace polyreg

// Acceptance harness: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include <fftw3.h>

#include "polyreg/counterexample.hpp"
#include "polyreg/fundsol.hpp"
#include "polyreg/modalgreen.hpp"
#include "polyreg/modecheck.hpp"
#include "polyreg/positivity.hpp"
#include "polyreg/rootsets.hpp"
#include "polyreg/symbols.hpp"

using namespace polyreg;

namespace {

Rational R(long a, long b = 1) { return make_rational(a, b); }

struct Outcome {
  bool ok = true;
  std::string detail;
  void require(bool cond, const std::string& what) {
    if (!cond && ok) detail = what;
    ok = ok && cond;
  }
};

// ---- criterion 1: recurrence vs product, exact ----
Outcome symbol_identity() {
  Outcome o;
  for (int m = 1; m <= 6; ++m)
    for (int n = 3; n <= 2 * m + 1; n += 2)
      o.require(check_symbol_identity(m, n, 2 * m + 5).ok(), "m=" + std::to_string(m) + " n=" + std::to_string(n));
  return o;
}

// ---- criterion 2: a_m(0) against the product formula computed here ----
Outcome spot_values() {
  Outcome o;
  o.require(a_recurrence(1, 1)(R(0)) == 2, "m=1");
  o.require(a_recurrence(2, 2)(R(0)) == 24, "m=2");
  for (int m = 1; m <= 6; ++m) {
    long long expect = 1;
    for (int j = 0; j < m; ++j) expect *= static_cast<long long>(1 + 2 * j) * (2 * m - 2 * j);
    o.require(a_recurrence(m, m)(R(0)) == Rational(static_cast<long>(expect)), "m=" + std::to_string(m));
  }
  return o;
}

// ---- criterion 3: lower-bound sweeps ----
Outcome lower_bounds() {
  Outcome o;
  for (int m = 1; m <= 4; ++m)
    for (int n : {3, 5}) {
      if (n > 2 * m + 1) continue;
      const int q_max = (1 << (m + 4)) * m + 4;
      const auto r = sweep_2_28(m, n, q_max, 60.0);
      const std::string tag = "odd m=" + std::to_string(m) + " n=" + std::to_string(n);
      o.require(r.certified && r.min_ratio > 0, tag + " not certified");
      o.require(r.monotone_checks > 0 && r.monotone_violations == 0, tag + " monotonicity");
    }
  for (int m = 1; m <= 6; ++m)
    for (int n = 2; n <= 2 * m; n += 2) {
      const int q_max = 4 * m + 20;
      const auto r = sweep_5_8(m, n, q_max);
      const std::string tag = "even m=" + std::to_string(m) + " n=" + std::to_string(n);
      o.require(r.certified && r.min_ratio > 0, tag + " not certified");
      std::vector<std::string> expected;
      for (int j = 0; j < m; ++j) {
        const int q = 2 * j - m - n / 2 + 2;
        if (q >= 0 && q <= q_max) expected.push_back("j=" + std::to_string(j) + ",q=" + std::to_string(q));
      }
      o.require(r.exceptions == expected, tag + " exception set");
    }
  return o;
}

// ---- criterion 4: fundamental solutions ----
Outcome fundamental_solutions() {
  Outcome o;
  for (int m = 1; m <= 6; ++m)
    for (int n = 2; n <= 2 * m + 1; ++n) {
      const std::string tag = "m=" + std::to_string(m) + " n=" + std::to_string(n);
      if (n % 2 == 1) {
        const auto h = h_odd(m, n);
        o.require(verify_fundamental(h, odd_h_operator(m, n)).zero(), tag + " odd residual");
        o.require(h == h_odd_jump(m, n), tag + " Vandermonde vs jump system");
      } else {
        o.require(verify_fundamental(h_even(m, n), even_h_operator(m, n)).zero(), tag + " even residual");
      }
    }
  const PiecewiseExpPoly hand({{R(-1, 16), R(2), 0}, {R(1, 4), R(0), 1}}, {{R(-1, 16), R(-2), 0}});
  o.require(h_even(2, 4) == hand, "h_even(2,4) differs from the hand-derived form");
  return o;
}

// ---- criterion 5: positivity engine ----
Outcome positivity() {
  Outcome o;
  for (int m = 1; m <= 4; ++m)
    for (int n = 2; n <= 2 * m + 1; ++n)
      for (int p : admissible_p(m, n)) {
        const std::string tag = "m=" + std::to_string(m) + " n=" + std::to_string(n) + " p=" + std::to_string(p);
        const auto r = check_headline(m, n, p);
        o.require(r.certificate.certified, tag + " headline not certified");
        o.require(r.chain_matches, tag + " chain differs from direct");
        if (n % 2 == 1) o.require(chain(m, n, p).final_f == apply_op(odd_symbol(m, n, p), h_odd(m, n)), tag + " chain");
        if (p != branch_of(m, n).p0 && m >= 2)
          o.require(!negative_control(m, n, p).certified(), tag + " negative control certified");
      }
  return o;
}

// ---- criterion 6: root structure ----
Outcome root_structure() {
  Outcome o;
  for (int m = 1; m <= 6; ++m) {
    for (int n = 3; n <= 2 * m + 1; n += 2) {
      const auto base = roots_odd(m, n, 0);
      for (int p = 0; p <= m - (n - 1) / 2; ++p)
        o.require(interlace(base, roots_odd(m, n, p)), "odd interlace m=" + std::to_string(m) + " n=" + std::to_string(n));
    }
    for (int n = 2; n <= 2 * m; n += 2) {
      const int k = m - n / 2;
      const auto base = roots_even(m, n, k % 2).stripped();
      for (int p = k % 2; p <= k; p += 2) {
        o.require(interlace(base, roots_even(m, n, p).stripped()), "even interlace m=" + std::to_string(m) + " n=" + std::to_string(n));
        if (k % 2 == 1)
          o.require(roots_even(m, n, p).multiset() == roots_even(m, n + 2, p - 1).multiset(),
                    "identification m=" + std::to_string(m) + " n=" + std::to_string(n));
      }
    }
  }
  return o;
}

// ---- criterion 7: integral inequalities ----
double plancherel_energy(const ModeProfile& p, int m, int n, double a, double Lp, int N) {
  const double dt = Lp / N;
  std::vector<double> x(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) x[static_cast<std::size_t>(i)] = static_cast<double>(p(a + i * dt));
  std::vector<fftw_complex> X(static_cast<std::size_t>(N / 2 + 1));
  fftw_plan plan = fftw_plan_dft_r2c_1d(N, x.data(), X.data(), FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  const auto L = mode_operator(m, n, p.q);
  double acc = 0;
  for (int j = 0; j <= N / 2; ++j) {
    const auto& z = X[static_cast<std::size_t>(j)];
    const double weight = (j == 0 || j == N / 2) ? 1.0 : 2.0;
    acc += weight * static_cast<double>(symbol_real_part(L, 2 * std::numbers::pi * j / Lp)) * (z[0] * z[0] + z[1] * z[1]);
  }
  return acc * dt * dt / Lp;
}

Outcome integral_inequalities() {
  Outcome o;
  auto scale_invariant = [](Real a, Real b) { return std::abs(a - b) <= 1e-10L * std::abs(a); };
  auto scaled = [](const std::vector<ModeFunction>& lib, Real s) {
    std::vector<ModeFunction> out;
    for (const auto& v : lib) out.push_back(v.scaled(s));
    return out;
  };
  for (auto [m, n] : std::vector<std::pair<int, int>>{{1, 3}, {2, 3}, {2, 5}, {3, 5}}) {
    const auto lib = standard_library(m, n);
    const std::string tag = " m=" + std::to_string(m) + " n=" + std::to_string(n);
    o.require(lib.size() >= 12, "library size" + tag);
    const auto a = check_thm_2_1(lib);
    o.require(a.pass && a.C > 0, "2.1" + tag);
    o.require(scale_invariant(a.C, check_thm_2_1(scaled(lib, 2.0L)).C), "2.1 scaling" + tag);
    const auto b = check_thm_4_2(lib, 5);
    o.require(b.pass && b.C > 0, "4.2" + tag);
    o.require(scale_invariant(b.C, check_thm_4_2(scaled(lib, 3.0L), 5).C), "4.2 scaling" + tag);
  }
  for (auto [m, n] : std::vector<std::pair<int, int>>{{2, 4}, {3, 4}, {2, 2}}) {
    const auto lib = standard_library(m, n);
    const std::string tag = " m=" + std::to_string(m) + " n=" + std::to_string(n);
    o.require(lib.size() >= 12, "library size" + tag);
    for (PsiKind psi : {PsiKind::One, PsiKind::CRplusT}) {
      const auto a = check_thm_5_1(lib, psi, 1.0L);
      o.require(a.pass && a.C > 0, "5.1" + tag);
      o.require(scale_invariant(a.C, check_thm_5_1(scaled(lib, 0.5L), psi, 1.0L).C), "5.1 scaling" + tag);
    }
    const auto b = check_thm_6_3(lib, 1.0L, 5);
    o.require(b.pass && b.C > 0, "6.3" + tag);
    o.require(scale_invariant(b.C, check_thm_6_3(scaled(lib, 7.0L), 1.0L, 5).C), "6.3 scaling" + tag);
  }
  for (auto [m, n] : std::vector<std::pair<int, int>>{{1, 3}, {2, 4}, {3, 5}}) {
    ModeProfile p;
    p.q = 1;
    p.kind = ProfileKind::Gauss;
    p.center = 20;
    p.width = 0.6L;
    p.poly = {1.0, 0.4};
    const double time_side = static_cast<double>(lhs_energy(ModeFunction{m, n, {p}, "gauss"}, ModeWeight::one()));
    const double freq_side = plancherel_energy(p, m, n, 0.0, 40.0, 1 << 14);
    o.require(std::abs(time_side - freq_side) < 1e-6 * std::abs(freq_side), "Plancherel m=" + std::to_string(m));
  }
  return o;
}

// ---- criterion 8: Green exponents ----
long double classical_green(long double r0, long double r1, long double r, long double rho, long double c) {
  const long double lo = std::min(r, rho), hi = std::max(r, rho);
  const long double dist = std::sqrt(r * r + rho * rho - 2 * r * rho * c);
  long double correction = 0, p0 = 1, p1 = c;
  for (int q = 0; q < 4000; ++q) {
    const long double P = q == 0 ? 1 : (q == 1 ? c : ((2 * q - 1) * c * p1 - (q - 1) * p0) / q);
    if (q >= 2) p0 = p1, p1 = P;
    const long double a = std::pow(r0 / r1, 2 * q + 1);
    const long double u1 = std::pow(lo, q), v1 = std::pow(r0, 2 * q + 1) * std::pow(lo, -q - 1);
    const long double u2 = std::pow(hi, -q - 1), v2 = std::pow(r1, -2 * q - 1) * std::pow(hi, q);
    const long double term = (u1 * u2 - (u1 - v1) * (u2 - v2) / (1 - a)) * P / (4 * std::numbers::pi_v<long double>);
    correction += term;
    if (q > 50 && std::abs(term) < 1e-22L) break;
  }
  return 1 / (4 * std::numbers::pi_v<long double> * dist) - correction;
}

Outcome green_exponents() {
  Outcome o;
  for (long double ratio : {4.0L, 16.0L}) {
    const std::string tag = " ratio=" + std::to_string(static_cast<int>(ratio));
    for (auto [m, n] : std::vector<std::pair<int, int>>{{2, 3}, {3, 5}}) {
      const auto f = fit_decay({1, ratio, n}, m, Estimate::MixedDerivative, default_plan(Estimate::MixedDerivative));
      o.require(f.pass && std::abs(f.slope + 1) <= 0.05L,
                "8.5.1 m=" + std::to_string(m) + tag + " slope " + std::to_string(static_cast<double>(f.slope)));
    }
    const auto g = fit_decay({1, ratio, 4}, 2, Estimate::LogLaw, default_plan(Estimate::LogLaw));
    o.require(g.pass && g.r2 > 0.99L, "8.7.1" + tag + " R2 " + std::to_string(static_cast<double>(g.r2)));

    const ShellDomain s{1, ratio, 3};
    const long double mid = std::sqrt(ratio);
    std::vector<GreenQuery> qs;
    for (long double a : {0.8L, 1.0L, 1.25L})
      for (long double c : {-1.0L, -0.3L, 0.5L, 0.95L}) qs.push_back({mid * a, mid / a * 1.1L, c, 0, 0});
    const auto vals = assemble_green(s, 1, qs);
    for (std::size_t i = 0; i < qs.size(); ++i) {
      const long double ref = classical_green(s.r0, s.r1, qs[i].r, qs[i].rho, qs[i].cos_angle);
      o.require(vals[i].converged && std::abs(vals[i].value - ref) < 1e-5L * std::abs(ref), "classical" + tag);
    }
  }
  return o;
}

// ---- criterion 9: sharpness ----
Outcome sharpness() {
  Outcome o;
  for (auto [m, n] : std::vector<std::pair<int, int>>{{2, 3}, {3, 5}}) {
    const auto r = counterexample(m, n);
    const std::string tag = " m=" + std::to_string(m) + " n=" + std::to_string(n);
    o.require(r.degree_lambda_zero && r.lambda_constant_on_rays, "order lambda not bounded" + tag);
    o.require(r.lambda_ray_dependent, "order lambda not ray dependent" + tag);
    o.require(r.degree_lambda1_minus_one && r.lambda1_scales_inverse && r.lambda1_nonzero, "order lambda+1 scaling" + tag);
    o.require(r.polyharmonic, "not polyharmonic" + tag);
  }
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    std::string name;
    double budget_seconds;  // 0: no runtime limit
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "symbol identity", 10, symbol_identity},
      {2, "spot values of a_m(0)", 0, spot_values},
      {3, "lower-bound sweeps", 120, lower_bounds},
      {4, "fundamental solutions", 0, fundamental_solutions},
      {5, "positivity engine", 0, positivity},
      {6, "root structure", 0, root_structure},
      {7, "integral inequalities", 120, integral_inequalities},
      {8, "Green exponents", 300, green_exponents},
      {9, "sharpness", 0, sharpness},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_seconds > 0 && secs > c.budget_seconds && o.ok) {
      o.ok = false;
      o.detail = "over the " + std::to_string(static_cast<int>(c.budget_seconds)) + " s budget";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f s", secs);
    std::cout << (o.ok ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.name << " (" << buf << ")";
    if (!o.ok) std::cout << " -- " << o.detail;
    std::cout << std::endl;
    failures += o.ok ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}

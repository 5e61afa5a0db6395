#include <cmath>
#include <numbers>

#include <fftw3.h>
#include <gtest/gtest.h>

#include "polyreg/modecheck.hpp"

using namespace polyreg;

namespace {

ModeProfile bump(int q, Real c, Real w, int N, std::vector<Real> poly = {1.0}) {
  ModeProfile p;
  p.q = q;
  p.center = c;
  p.width = w;
  p.power = N;
  p.poly = std::move(poly);
  return p;
}

ModeProfile gauss(int q, Real c, Real s, std::vector<Real> poly = {1.0}) {
  ModeProfile p;
  p.q = q;
  p.kind = ProfileKind::Gauss;
  p.center = c;
  p.width = s;
  p.poly = std::move(poly);
  return p;
}

// Frequency-side energy (dt^2/Lp) sum_j Re L(i g_j) |X_j|^2 over a periodic window [a, a+Lp).
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
    const double g = 2 * std::numbers::pi * j / Lp;
    const double mag2 = X[static_cast<std::size_t>(j)][0] * X[static_cast<std::size_t>(j)][0] +
                        X[static_cast<std::size_t>(j)][1] * X[static_cast<std::size_t>(j)][1];
    const double weight = (j == 0 || j == N / 2) ? 1.0 : 2.0;
    acc += weight * static_cast<double>(symbol_real_part(L, g)) * mag2;
  }
  return acc * dt * dt / Lp;
}

ModeFunction single(int m, int n, ModeProfile p) { return {m, n, {std::move(p)}, "single"}; }

}  // namespace

TEST(ModeCheck, PlancherelGaussians) {
  struct Case {
    int m, n;
    ModeProfile p;
  };
  const std::vector<Case> cases{{1, 3, gauss(0, 20, 0.5)},
                                {2, 3, gauss(1, 20, 0.7, {1.0, 0.5, -0.3})},
                                {2, 4, gauss(0, 10, 0.6)},
                                {3, 5, gauss(2, 15, 0.8, {0.3, 1.0})},
                                {3, 4, gauss(1, 12, 0.5)}};
  for (const auto& c : cases) {
    const double time_side = static_cast<double>(lhs_energy(single(c.m, c.n, c.p), ModeWeight::one()));
    const double freq_side = plancherel_energy(c.p, c.m, c.n, static_cast<double>(c.p.center) - 20, 40, 1 << 14);
    EXPECT_LT(std::abs(time_side - freq_side), 1e-6 * std::abs(freq_side)) << c.m << ' ' << c.n << ' ' << time_side << " vs " << freq_side;
  }
}

TEST(ModeCheck, PlancherelBumps) {
  for (int m = 1; m <= 3; ++m) {
    const int n = 2 * m - 1 >= 3 ? 2 * m - 1 : 3;
    for (int q : {0, 1, 3}) {
      const auto p = bump(q, 3.0, 2.0, 2 * m + 6, {1.0, 0.4});
      const double time_side = static_cast<double>(lhs_energy(single(m, n, p), ModeWeight::one()));
      const double freq_side = plancherel_energy(p, m, n, 0.0, 6.0, 1 << 16);
      EXPECT_LT(std::abs(time_side - freq_side), 1e-6 * std::abs(freq_side)) << m << ' ' << q;
    }
  }
}

TEST(ModeCheck, ZeroFunctionAndOrthogonalModes) {
  EXPECT_EQ(lhs_energy(ModeFunction{1, 3, {}, "zero"}, ModeWeight::one()), 0);
  const auto a = bump(0, 3, 2, 4), b = bump(2, 3.5, 1, 4);
  const Real sum = lhs_energy(single(1, 3, a), ModeWeight::one()) + lhs_energy(single(1, 3, b), ModeWeight::one());
  const Real joint = lhs_energy(ModeFunction{1, 3, {a, b}, "pair"}, ModeWeight::one());
  EXPECT_NEAR(static_cast<double>(joint), static_cast<double>(sum), 1e-12 * static_cast<double>(std::abs(sum)));
}

TEST(ModeCheck, IntegrationByPartsTable) {
  const auto v = bump(0, 2.0, 2.5, 12, {1.0, -0.5, 0.2});
  const ModeFunction f = single(3, 5, v);
  const Component c(f.component({0, 0}));
  // smooth weight with closed-form derivatives
  auto h = [](Real t, int j) {
    const Real e = std::exp(-0.3L * t) * std::pow(-0.3L, static_cast<Real>(j));
    const Real poly = j == 0 ? t * t : j == 1 ? 2 * t : j == 2 ? 2 : 0;
    return e + poly;
  };
  for (int k = 0; k <= 4; ++k) {
    const auto direct = integrate([&](Real t) { return c.derivative(t, static_cast<unsigned>(k)) * c.derivative(t, 0) * h(t, 0); },
                                  0.75L, 3.25L, c.breakpoints());
    Real rearranged = 0;
    for (const auto& [ij, coef] : ibp_coefficients(k)) {
      const auto [i, j] = ij;
      rearranged += to_ld(coef) * integrate([&](Real t) {
        const Real d = c.derivative(t, static_cast<unsigned>(i));
        return d * d * h(t, j);
      }, 0.75L, 3.25L, c.breakpoints());
    }
    EXPECT_NEAR(static_cast<double>(direct), static_cast<double>(rearranged), 1e-8 * (1 + std::abs(static_cast<double>(direct)))) << k;
  }
}

TEST(ModeCheck, IbpTableLowOrders) {
  EXPECT_EQ(ibp_coefficients(1).at({0, 1}), make_rational(-1, 2));
  // int v'' v h = -int v'^2 h + 1/2 int v^2 h''
  const auto t2 = ibp_coefficients(2);
  EXPECT_EQ(t2.at({1, 0}), -1);
  EXPECT_EQ(t2.at({0, 2}), make_rational(1, 2));
  EXPECT_THROW(ibp_coefficients(-1), RangeError);
}

TEST(ModeCheck, LowerInequalityOddPassesAndIsScaleInvariant) {
  for (auto [m, n] : {std::pair{1, 3}, {2, 3}, {3, 5}}) {
    const auto lib = standard_library(m, n);
    ASSERT_GE(lib.size(), 12u);
    const auto r = check_thm_2_1(lib);
    EXPECT_TRUE(r.pass) << m << ' ' << n;
    EXPECT_GT(r.C, 0);
    std::vector<ModeFunction> scaled;
    for (const auto& v : lib) scaled.push_back(v.scaled(2.0L));
    const auto s = check_thm_2_1(scaled);
    EXPECT_LT(std::abs(s.C - r.C), 1e-10L * r.C);
  }
}

TEST(ModeCheck, LaplaceSingleBumpConstant) {
  const auto r = check_thm_2_1({single(1, 3, bump(0, 3, 2, 4))});
  EXPECT_TRUE(r.pass);
  EXPECT_GE(r.C, 0.2L);
}

TEST(ModeCheck, ProductTermVanishesAtCriticalMode) {
  for (int m = 1; m <= 4; ++m)
    for (int n = 3; n <= 2 * m + 1; n += 2) EXPECT_EQ(odd_product_term(m, n, m - (n - 1) / 2), 0);
}

TEST(ModeCheck, TraceInequalityOdd) {
  for (auto [m, n] : {std::pair{1, 3}, {2, 5}}) {
    const auto r = check_thm_4_2(standard_library(m, n), 5);
    EXPECT_TRUE(r.pass) << m << ' ' << n;
    EXPECT_TRUE(std::isfinite(static_cast<double>(r.C)));
    std::vector<ModeFunction> scaled;
    for (const auto& v : standard_library(m, n)) scaled.push_back(v.scaled(3.0L));
    EXPECT_LT(std::abs(check_thm_4_2(scaled, 5).C - r.C), 1e-10L * r.C);
  }
}

TEST(ModeCheck, TraceSupportedAwayFromPole) {
  // profile on [2, 4], tau values span the support: trace at the edges is zero
  const ModeFunction v = single(1, 3, bump(0, 3, 2, 4));
  EXPECT_EQ(trace_norm2(v, 1.0L), 0);
  EXPECT_GT(lhs_energy(v, ModeWeight::one()), 0);
}

TEST(ModeCheck, EvenLowerInequalityBothWeights) {
  for (auto [m, n] : {std::pair{2, 4}, {3, 4}, {2, 2}}) {
    const auto lib = standard_library(m, n);
    for (PsiKind psi : {PsiKind::One, PsiKind::CRplusT}) {
      const auto r = check_thm_5_1(lib, psi, 1.0L);
      EXPECT_TRUE(r.pass) << m << ' ' << n;
      std::vector<ModeFunction> scaled;
      for (const auto& v : lib) scaled.push_back(v.scaled(0.5L));
      EXPECT_LT(std::abs(check_thm_5_1(scaled, psi, 1.0L).C - r.C), 1e-10L * r.C);
    }
  }
}

TEST(ModeCheck, EvenOddOrderExtraFactor) {
  // m = 3, n = 4, q = 0: (0 - 1*3)^2 from the product times (n/2-1)^2 = 1
  EXPECT_EQ(even_zero_symbol({3, 4, 0}), 9);
  EXPECT_EQ(even_zero_symbol({3, 6, 1}), even_zero_symbol_from_B({3, 6, 1}));
}

TEST(ModeCheck, EvenSupportMustStayInBall) {
  const ModeFunction v = single(2, 4, bump(0, -2, 1, 6));
  EXPECT_THROW(check_thm_5_1({v}, PsiKind::One, 1.0L), RangeError);
  EXPECT_THROW(check_thm_6_3({v}, 1.0L), RangeError);
}

TEST(ModeCheck, EvenTraceInequality) {
  for (auto [m, n] : {std::pair{2, 4}, {3, 4}}) {
    const auto r = check_thm_6_3(standard_library(m, n), 1.0L, 5);
    EXPECT_TRUE(r.pass) << m << ' ' << n;
    std::vector<ModeFunction> scaled;
    for (const auto& v : standard_library(m, n)) scaled.push_back(v.scaled(7.0L));
    EXPECT_LT(std::abs(check_thm_6_3(scaled, 1.0L, 5).C - r.C), 1e-10L * r.C);
  }
}

TEST(ModeCheck, ParityGuards) {
  EXPECT_THROW(check_thm_2_1({single(2, 4, bump(0, 3, 2, 6))}), ParityError);
  EXPECT_THROW(check_thm_5_1({single(2, 3, bump(0, 3, 2, 6))}, PsiKind::One, 1.0L), ParityError);
}

TEST(ModeCheck, ModeSpecParsing) {
  const auto fam = parse_mode_spec(2, 3, "bump(q=0,c=3,w=2)+bump(q=1,c=3.5,w=1);gauss(q=1,c=20,w=0.5,poly=1|0.5)");
  ASSERT_EQ(fam.size(), 2u);
  EXPECT_EQ(fam[0].profiles.size(), 2u);
  EXPECT_EQ(fam[1].profiles[0].kind, ProfileKind::Gauss);
  EXPECT_EQ(fam[1].profiles[0].poly.size(), 2u);
  EXPECT_EQ(parse_mode_spec(2, 3, "standard").size(), standard_library(2, 3).size());
  for (const char* bad : {"bump(q=0", "cube(q=1)", "bump(z=1)", "bump(q=0,w=-1)", "bump(q=0,N=2)", "bump(q=x)"}) {
    try {
      parse_mode_spec(2, 3, bad);
      ADD_FAILURE() << bad;
    } catch (const ConfigError& e) {
      EXPECT_EQ(e.field, "modes");
    }
  }
}

TEST(ModeCheck, ProfileDerivativesMatchFiniteDifferences) {
  for (const auto& p : {bump(1, 3, 2, 8, {1.0, 0.3}), gauss(0, 1, 0.7, {0.5, 1.0, 0.2})})
    for (Real t : {2.4L, 3.1L, 3.7L})
      for (unsigned d = 0; d < 4; ++d) {
        const Real h = 1e-5L;
        const Real fd = (p.derivative(t + h, d) - p.derivative(t - h, d)) / (2 * h);
        EXPECT_NEAR(static_cast<double>(p.derivative(t, d + 1)), static_cast<double>(fd), 1e-5 * (1 + std::abs(static_cast<double>(fd))));
      }
}

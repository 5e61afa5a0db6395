#include <gtest/gtest.h>

#include "polyreg/counterexample.hpp"

using namespace polyreg;

namespace {

Rational R(long a, long b = 1) { return make_rational(a, b); }

}  // namespace

TEST(Counterexample, AllSmallCasesPass) {
  for (auto [m, n] : std::vector<std::pair<int, int>>{{2, 3}, {3, 3}, {3, 5}, {4, 5}, {4, 7}}) {
    const auto rep = counterexample(m, n);
    EXPECT_TRUE(rep.pass()) << m << ' ' << n << ' ' << to_json(rep).dump();
    EXPECT_EQ(rep.lambda, m - (n + 1) / 2 + 1);
    EXPECT_FALSE(rep.witnesses.empty());
  }
}

TEST(Counterexample, HandDerivedBiharmonicDerivatives) {
  // u = r in R^3; d1 u = x1/r, d2 d1 u = -x1 x2 / r^3
  const auto u = counterexample_function(2, 3);
  const auto d1 = u.partial(0);
  const auto d21 = d1.partial(1);
  const std::vector<Rational> x{R(2, 3), R(2, 3), R(1, 3)};
  EXPECT_EQ(d1(x, R(1)), R(2, 3));
  EXPECT_EQ(d21(x, R(1)), R(-4, 9));
  EXPECT_EQ(d1.degree(), std::make_pair(true, 0));
  EXPECT_EQ(d21.degree(), std::make_pair(true, -1));
  const std::vector<Rational> y{R(3, 10), R(4, 10), R(0)};
  EXPECT_EQ(d21(y, R(1, 2)), -(R(3, 10) * R(4, 10)) / R(1, 8));
}

TEST(Counterexample, HomogeneityUnderScaling) {
  const auto u = counterexample_function(3, 5);
  const auto [homog, deg] = u.degree();
  ASSERT_TRUE(homog);
  EXPECT_EQ(deg, 1);  // k = 0: u = r in R^5
  for (const auto& p : rational_rays(5)) {
    std::vector<Rational> x2 = p.x;
    for (auto& c : x2) c *= 2;
    const auto f = u.partial(1).partial(2);
    EXPECT_EQ(f(x2, 2 * p.r), f(p.x, p.r) / 2);
  }
}

TEST(Counterexample, PolyharmonicAwayFromOrigin) {
  auto lap = counterexample_function(3, 3);
  for (int i = 0; i < 3; ++i) lap = lap.laplacian();
  for (const auto& p : rational_rays(3)) EXPECT_EQ(lap(p.x, p.r), 0);
  // one fewer Laplacian leaves a nonzero function
  auto partial_lap = counterexample_function(3, 3);
  for (int i = 0; i < 2; ++i) partial_lap = partial_lap.laplacian();
  EXPECT_FALSE(partial_lap.is_zero());
}

TEST(Counterexample, RaysAreUnitVectors) {
  for (const auto& p : rational_rays(5)) {
    Rational s = 0;
    for (const auto& c : p.x) s += c * c;
    EXPECT_EQ(s, p.r * p.r) << p.name;
  }
}

TEST(Counterexample, Errors) {
  EXPECT_THROW(counterexample(2, 4), ParityError);
  EXPECT_THROW(counterexample(2, 5), RangeError);
  EXPECT_THROW(counterexample(1, 3), RangeError);
}

TEST(Counterexample, JsonReportsWitnesses) {
  const auto j = to_json(counterexample(2, 3));
  EXPECT_TRUE(j["pass"].get<bool>());
  EXPECT_EQ(j["lambda"], 1);
  EXPECT_GE(j["witnesses"].size(), 2u);
}

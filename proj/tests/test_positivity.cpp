#include <gtest/gtest.h>

#include "polyreg/positivity.hpp"

using namespace polyreg;

namespace {

Rational R(long a, long b = 1) { return make_rational(a, b); }

}  // namespace

TEST(Positivity, StepWithContainedFactors) {
  const auto r = step_second_order(PiecewiseExpPoly::delta(), {R(0), R(-1), R(1), R(-2)});
  const PiecewiseExpPoly expected({{R(2), R(0), 0}}, {{R(2), R(-1), 0}}, {{0, R(1)}});
  EXPECT_EQ(r.g, expected);
  EXPECT_TRUE(r.contained);
  EXPECT_TRUE(r.certificate.certified);
  EXPECT_EQ(r.certificate.tier, CertTier::Exact);
  EXPECT_FALSE(r.decays);
}

TEST(Positivity, IdentityStep) {
  const auto r = step_second_order(PiecewiseExpPoly::delta(), {R(0), R(-1), R(0), R(-1)});
  EXPECT_EQ(r.g, PiecewiseExpPoly::delta());
  EXPECT_TRUE(r.certificate.certified);
}

TEST(Positivity, UncontainedStepHasNegativePiece) {
  const auto r = step_second_order(PiecewiseExpPoly::delta(), {R(0), R(-1), R(0), R(-1, 2)});
  EXPECT_FALSE(r.contained);
  EXPECT_FALSE(r.certificate.certified);
  bool negative = false;
  for (const auto& t : r.g.pos()) negative = negative || t.coeff < 0;
  EXPECT_TRUE(negative) << describe(r.g);
}

TEST(Positivity, DecayContract) {
  // a = 0 with c != 0 leaves a constant tail, which may not feed a further step
  const auto first = step_second_order(PiecewiseExpPoly::delta(), {R(0), R(-1), R(1), R(-1)});
  EXPECT_FALSE(first.decays);
  EXPECT_THROW(step_second_order(first.g, {R(0), R(-1), R(0), R(-1)}), DecayContractViolation);
  EXPECT_TRUE(step_second_order(PiecewiseExpPoly::delta(), {R(0), R(-1), R(0), R(-1)}).decays);
  const PiecewiseExpPoly flat({{R(1), R(0), 0}}, {{R(1), R(-1), 0}});
  EXPECT_THROW(step_second_order(flat, {R(1), R(-1), R(1), R(-1)}), DecayContractViolation);
  EXPECT_THROW(step_second_order(PiecewiseExpPoly::delta(), {R(0), R(1), R(0), R(-1)}), RangeError);
}

TEST(Positivity, TrivialChain) {
  const auto tr = chain(1, 3, 0);
  ASSERT_EQ(tr.stages.size(), 1u);
  EXPECT_EQ(tr.final_f, PiecewiseExpPoly::delta());
  EXPECT_TRUE(tr.certified());
  EXPECT_EQ(check_headline(1, 3, 0).result, PiecewiseExpPoly::delta());
}

TEST(Positivity, BiharmonicShiftedChain) {
  const auto tr = chain(2, 3, 1);
  EXPECT_EQ(tr.stages.size(), 2u);
  EXPECT_TRUE(tr.certified());
  const auto r = check_headline(2, 3, 1);
  EXPECT_TRUE(r.pass());
  EXPECT_EQ(r.result.atom_weight(0), 1);
}

TEST(Positivity, ChainEqualsDirectApplication) {
  const auto tr = chain(3, 3, 2);
  EXPECT_TRUE(tr.certified());
  EXPECT_EQ(tr.final_f, apply_op(odd_symbol(3, 3, 2), h_odd(3, 3)));
}

TEST(Positivity, HeadlineCertifiedAllCases) {
  int cases = 0;
  for (int m = 1; m <= 4; ++m)
    for (int n = 2; n <= 2 * m + 1; ++n)
      for (int p : admissible_p(m, n)) {
        const auto r = check_headline(m, n, p);
        EXPECT_TRUE(r.pass()) << m << ' ' << n << ' ' << p;
        EXPECT_TRUE(r.interlaced);
        EXPECT_TRUE(r.certificate.atoms_ok);
        ++cases;
      }
  EXPECT_GT(cases, 20);
}

TEST(Positivity, EvenBaseCase) {
  const auto r = check_headline(2, 4, 0);
  EXPECT_TRUE(r.pass());
  EXPECT_EQ(r.result, PiecewiseExpPoly::delta());
}

TEST(Positivity, EvenReductionAgreesWithShiftedDimension) {
  for (int m = 2; m <= 4; ++m)
    for (int n = 2; n <= 2 * m - 2; n += 2) {
      if ((m - n / 2) % 2 == 0) continue;
      for (int p : admissible_p(m, n))
        EXPECT_EQ(check_headline(m, n, p).result, check_headline(m, n + 2, p - 1).result) << m << ' ' << n << ' ' << p;
    }
}

TEST(Positivity, NegativeControlsFail) {
  int controls = 0;
  for (int m = 2; m <= 4; ++m)
    for (int n = 2; n <= 2 * m + 1; ++n)
      for (int p : admissible_p(m, n)) {
        if (p == branch_of(m, n).p0) continue;
        EXPECT_FALSE(negative_control(m, n, p).certified()) << m << ' ' << n << ' ' << p;
        ++controls;
      }
  EXPECT_GT(controls, 5);
}

TEST(Positivity, AdmissibleRange) {
  EXPECT_EQ(admissible_p(2, 3), (std::vector<int>{0, 1}));
  EXPECT_EQ(admissible_p(3, 4), (std::vector<int>{1}));
  EXPECT_EQ(admissible_p(4, 4), (std::vector<int>{0, 2}));
  EXPECT_THROW(check_headline(2, 3, 2), RangeError);
  EXPECT_THROW(check_headline(4, 4, 1), ParityError);
}

TEST(Positivity, CertificateTiers) {
  EXPECT_EQ(certify_nonnegative(PiecewiseExpPoly::delta()).tier, CertTier::Exact);
  const PiecewiseExpPoly mixed({}, {{R(2), R(-1), 0}, {R(-1), R(-2), 0}});
  const auto c = certify_nonnegative(mixed);
  EXPECT_EQ(c.tier, CertTier::Grid);
  EXPECT_TRUE(c.certified);
  const PiecewiseExpPoly negative({}, {{R(1), R(-1), 0}, {R(-2), R(-2), 0}});
  EXPECT_FALSE(certify_nonnegative(negative).certified);
  EXPECT_FALSE(certify_nonnegative(PiecewiseExpPoly::delta(R(-1))).certified);
}

#include <gtest/gtest.h>

#include "rank2/hodge_split.hpp"
#include "support.hpp"

using namespace rank2;
using namespace rank2::testing;

namespace {

const Integer kMaxDen = 1000000;

EVectors literal_e() { return e_vectors(eigen_split(involution_matrix(f_inf()), literal_basis()), kAPlus, kAMinus); }

std::vector<RationalVector> a_list() { return {to_rational(kAPlus), to_rational(kAMinus)}; }
std::vector<RationalVector> e_list() {
  auto e = literal_e();
  return {e.plus, e.minus};
}

BigReal tol_of(const PrecisionContext& ctx) { return ctx.pow10(-ctx.working_digits() / 2); }

const DeRhamCombination kAttF0{{3, 1}, {2, Rational(-1141, 32)}, {1, Rational(15337, 64)}};
const DeRhamCombination kEllF2{{1, 1}, {0, Rational(-35, 8)}};
const DeRhamCombination kEllF1{{2, 1}, {0, Rational(-735, 16)}};

}  // namespace

TEST(Pairing, EVectorsKillOmega) {
  const auto& d = point_data(Rational(-1, 7), 200);
  for (const auto& e : e_list()) EXPECT_LT(abs(pairing(e, d.jet, d.s, 0)), tol_of(d.ctx));
}

TEST(Pairing, ChargesKillEllipticCombination) {
  const auto& d = point_data(Rational(-1, 7), 200);
  for (const auto& a : a_list()) {
    EXPECT_LT(abs(pairing(a, d.jet, d.s, kEllF2)), tol_of(d.ctx));
    EXPECT_LT(abs(pairing(a, d.jet, d.s, kEllF1)), tol_of(d.ctx));
    // The individual terms are not small.
    EXPECT_GT(abs(pairing(a, d.jet, d.s, 0)), d.ctx.real(1));
  }
}

TEST(Pairing, PeriodVectorIsIsotropic) {
  const auto& d = point_data(Rational(-1, 7), 200);
  auto u = integral_periods(d.s, d.jet, 0);
  BigComplex self = u[2] * u[0] + u[3] * u[1] - u[0] * u[2] - u[1] * u[3];
  EXPECT_TRUE(abs(self) < d.ctx.pow10(-d.ctx.working_digits()));
  // Griffiths transversality: Omega pairs to zero with Omega' and Omega''.
  for (size_t j : {1u, 2u}) {
    auto v = integral_periods(d.s, d.jet, j);
    BigComplex q = -u[0] * v[2] - u[1] * v[3] + u[2] * v[0] + u[3] * v[1];
    EXPECT_LT(abs(q), d.ctx.pow10(-d.ctx.working_digits() + 10));
  }
}

TEST(SplitRelation, AttractorSide) {
  const auto& d = point_data(Rational(-1, 7), 200);
  auto rel = discover_split_relation(e_list(), d.jet, d.s, {3, 2, 1}, kMaxDen, tol_of(d.ctx));
  EXPECT_EQ(rel.coefficients, kAttF0);
  EXPECT_LT(rel.residual, tol_of(d.ctx));
  EXPECT_EQ(to_string(rel.coefficients), "Omega''' - 1141/32 Omega'' + 15337/64 Omega'");
}

TEST(SplitRelation, EllipticSide) {
  const auto& d = point_data(Rational(-1, 7), 200);
  auto f2 = discover_split_relation(a_list(), d.jet, d.s, {1, 0}, kMaxDen, tol_of(d.ctx));
  EXPECT_EQ(f2.coefficients, kEllF2);
  auto f1 = discover_split_relation(a_list(), d.jet, d.s, {2, 0}, kMaxDen, tol_of(d.ctx));
  EXPECT_EQ(f1.coefficients, kEllF1);
  EXPECT_EQ(to_string(f2.coefficients), "Omega' - 35/8 Omega");
}

TEST(SplitRelation, GriffithsComplementarity) {
  const auto& d = point_data(Rational(-1, 7), 200);
  // The E-side relation does not annihilate the charges, nor the A-side relation the E vectors.
  for (const auto& a : a_list()) {
    BigReal scale = abs(pairing(a, d.jet, d.s, 3));
    EXPECT_GT(abs(pairing(a, d.jet, d.s, kAttF0)) / scale, d.ctx.pow10(-5));
  }
  for (const auto& e : e_list()) {
    BigReal scale = abs(pairing(e, d.jet, d.s, 1));
    EXPECT_GT(abs(pairing(e, d.jet, d.s, kEllF2)) / scale, d.ctx.pow10(-5));
  }
}

TEST(SplitRelation, InvariantUnderRecombination) {
  const auto& d = point_data(Rational(-1, 7), 200);
  auto a = a_list();
  RationalVector mix1, mix2;
  for (size_t i = 0; i < 4; ++i) {
    mix1[i] = a[0][i] + 2 * a[1][i];
    mix2[i] = Rational(1, 3) * a[0][i] - a[1][i];
  }
  auto rel = discover_split_relation({mix1, mix2}, d.jet, d.s, {1, 0}, kMaxDen, tol_of(d.ctx));
  EXPECT_EQ(rel.coefficients, kEllF2);
}

TEST(SplitRelation, StableAcrossPrecision) {
  const auto& lo = point_data(Rational(-1, 7), 100);
  const auto& hi = point_data(Rational(-1, 7), 200);
  for (const auto* d : {&lo, &hi}) {
    auto rel = discover_split_relation(e_list(), d->jet, d->s, {3, 2, 1}, kMaxDen, tol_of(d->ctx));
    EXPECT_EQ(rel.coefficients, kAttF0);
  }
}

TEST(SplitRelation, ResidualAtDoublePrecision) {
  const auto& d = point_data(Rational(-1, 7), 400);
  const BigReal target = d.ctx.pow10(-200);
  for (const auto& e : e_list()) EXPECT_LT(abs(pairing(e, d.jet, d.s, kAttF0)), target);
  for (const auto& a : a_list()) {
    EXPECT_LT(abs(pairing(a, d.jet, d.s, kEllF2)), target);
    EXPECT_LT(abs(pairing(a, d.jet, d.s, kEllF1)), target);
  }
}

TEST(SplitRelation, Errors) {
  const auto& d = point_data(Rational(-1, 7), 200);
  // Omega alone is not killed by the charges.
  try {
    discover_split_relation(a_list(), d.jet, d.s, {0}, kMaxDen, tol_of(d.ctx));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoKernel);
  }
  // Omega'' and Omega' are tied through Omega: (735/16) / (35/8) = 21/2.
  auto derived = discover_split_relation(a_list(), d.jet, d.s, {2, 1}, kMaxDen, tol_of(d.ctx));
  EXPECT_EQ(derived.coefficients, (DeRhamCombination{{2, 1}, {1, Rational(-21, 2)}}));
  // 35/8 is out of reach with denominators up to 4.
  try {
    discover_split_relation(a_list(), d.jet, d.s, {1, 0}, 4, tol_of(d.ctx));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RecognitionFailure);
  }
  EXPECT_THROW(discover_split_relation(a_list(), d.jet, d.s, {}, kMaxDen, tol_of(d.ctx)), Error);
}

TEST(Filtration, EmptyRelations) {
  auto report = filtration_report({});
  ASSERT_EQ(report.steps.size(), 1u);
  EXPECT_EQ(report.steps[0].motive, "att");
  EXPECT_EQ(report.steps[0].p, 3);
  ASSERT_EQ(report.steps[0].basis.size(), 1u);
  EXPECT_EQ(to_string(report.steps[0].basis[0]), "Omega");
}

TEST(Filtration, FullReport) {
  const auto& d = point_data(Rational(-1, 7), 200);
  SplitRelations rels;
  rels.att_f0 = discover_split_relation(e_list(), d.jet, d.s, {3, 2, 1}, kMaxDen, tol_of(d.ctx));
  rels.ell_f2 = discover_split_relation(a_list(), d.jet, d.s, {1, 0}, kMaxDen, tol_of(d.ctx));
  rels.ell_f1 = discover_split_relation(a_list(), d.jet, d.s, {2, 0}, kMaxDen, tol_of(d.ctx));
  auto report = filtration_report(rels);
  auto find = [&](const std::string& m, int p) -> const FiltrationStep& {
    for (const auto& s : report.steps)
      if (s.motive == m && s.p == p) return s;
    throw std::runtime_error("missing step");
  };
  EXPECT_EQ(find("att", 1).basis.size(), 1u);
  ASSERT_EQ(find("att", 0).basis.size(), 2u);
  EXPECT_EQ(find("att", 0).basis[1], kAttF0);
  EXPECT_TRUE(find("ell", 3).basis.empty());
  ASSERT_EQ(find("ell", 2).basis.size(), 1u);
  EXPECT_EQ(find("ell", 2).basis[0], kEllF2);
  ASSERT_EQ(find("ell", 1).basis.size(), 2u);
  EXPECT_EQ(find("ell", 1).basis[1], kEllF1);
}

#include <gtest/gtest.h>

#include "rank2/elliptic.hpp"
#include "support.hpp"

using namespace rank2;
using namespace rank2::testing;

namespace {

const char* kVPerp = "0.37369955695472976699767292752499463211766555651682";
const char* kTauImag = "0.668986610627117173003570488224";
const Rational kJ(9938375, 21952);
const DeRhamCombination kOmegaEll{{1, 1}, {0, Rational(-35, 8)}};

EVectors literal_e() { return e_vectors(eigen_split(involution_matrix(f_inf()), literal_basis()), kAPlus, kAMinus); }

BigComplex pipeline_tau(long digits = 200) {
  const auto& d = point_data(Rational(-1, 7), digits);
  auto e = literal_e();
  return tau_from_pairings(lattice_basis(e.plus, e.minus), d.jet, d.s, kOmegaEll);
}

}  // namespace

TEST(LatticeBasis, LiteralVectors) {
  auto e = literal_e();
  auto b = lattice_basis(e.plus, e.minus);
  EXPECT_EQ(b.E1, (ChargeVector{6, -12, 0, 1}));
  EXPECT_EQ(b.E2, (ChargeVector{8, -16, -5, 0}));
  EXPECT_TRUE(b.primitive);
}

TEST(LatticeBasis, ScaledInputIsFlagged) {
  auto e = literal_e();
  RationalVector p2, m2;
  for (size_t i = 0; i < 4; ++i) {
    p2[i] = 2 * e.plus[i];
    m2[i] = 2 * e.minus[i];
  }
  auto b = lattice_basis(p2, m2);
  EXPECT_FALSE(b.primitive);
  EXPECT_EQ(b.E1, (ChargeVector{12, -24, 0, 2}));
}

TEST(LatticeBasis, NonIntegral) {
  auto e = literal_e();
  RationalVector half = e.plus;
  half[0] = Rational(1, 2);
  try {
    lattice_basis(half, e.minus);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::NonIntegralBasis);
  }
  // (5 E+ + 14 E-) / 2 is not integral for E- = v2-.
  EXPECT_THROW(lattice_basis(e.plus, RationalVector{-1, 2, 0, 1}), Error);
}

TEST(Tau, PublishedValue) {
  const auto& d = point_data(Rational(-1, 7), 200);
  auto tau = pipeline_tau();
  EXPECT_LT(abs(tau.real() - d.ctx.real(Rational(5, 2))), d.ctx.pow10(-100));
  EXPECT_LT(abs(tau.imag() - d.ctx.real(kTauImag)), d.ctx.pow10(-29));
  EXPECT_GT(tau.imag(), d.ctx.zero());
}

TEST(Tau, VanishingDenominator) {
  const auto& d = point_data(Rational(-1, 7), 200);
  // <A_+-, Omega' - 35/8 Omega> = 0, so a basis with E1 = A_+ has no ratio.
  LatticeBasis bad{kAPlus, ChargeVector{6, -12, 0, 1}, true};
  try {
    tau_from_pairings(bad, d.jet, d.s, kOmegaEll);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::VanishingDenominator);
  }
}

TEST(JInvariant, ClassicalValues) {
  PrecisionContext ctx(60, 10);
  const BigReal tol = ctx.pow10(-50);
  auto j_i = j_invariant(BigComplex(ctx.zero(), ctx.real(1)), ctx);
  EXPECT_LT(abs(j_i - BigComplex(ctx.real(1728))), tol);
  auto j_rho = j_invariant(BigComplex(ctx.real(Rational(1, 2)), sqrt(ctx.real(3)) / 2), ctx);
  EXPECT_LT(abs(j_rho), tol);
  try {
    j_invariant(BigComplex(ctx.real(1), ctx.real(-1)), ctx);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotInUpperHalfPlane);
  }
}

TEST(JInvariant, PublishedVPerp) {
  PrecisionContext ctx(60, 10);
  auto j = j_invariant(BigComplex(ctx.real(Rational(1, 2)), ctx.real(kVPerp)), ctx);
  // v_perp is printed to 50 digits; dj/dtau is O(10^3) here.
  EXPECT_LT(abs(j - BigComplex(ctx.real(kJ))), ctx.pow10(-44));
}

TEST(JInvariant, ModularInvarianceGrid) {
  PrecisionContext ctx(60, 10);
  const BigReal tol = ctx.pow10(-45);
  for (const Rational& x : {Rational(-3, 7), Rational(0), Rational(1, 5), Rational(2, 3)}) {
    for (const Rational& y : {Rational(1, 3), Rational(4, 5), Rational(3, 2)}) {
      const BigComplex tau(ctx.real(x), ctx.real(y));
      const BigComplex j = j_invariant(tau, ctx);
      const BigReal scale = max(abs(j), ctx.real(1));
      EXPECT_LT(abs(j_invariant(tau + ctx.real(1), ctx) - j) / scale, tol);
      EXPECT_LT(abs(j_invariant(BigComplex(ctx.real(-1)) / tau, ctx) - j) / scale, tol);
      const BigComplex reduced = reduce_to_fundamental_domain(tau);
      EXPECT_GT(reduced.imag(), ctx.real(Rational(86, 100)));
      EXPECT_LT(abs(j_invariant(reduced, ctx) - j) / scale, tol);
    }
  }
}

TEST(JInvariant, PipelineTauRecognizes) {
  const auto& d = point_data(Rational(-1, 7), 200);
  auto j = j_invariant(pipeline_tau(), d.ctx);
  EXPECT_LT(abs(j.imag()), d.ctx.pow10(-100));
  auto q = recognize_rational(j.real(), Integer(1000000), d.ctx.pow10(-100));
  ASSERT_TRUE(q.has_value());
  EXPECT_EQ(*q, kJ);
  EXPECT_EQ(kJ, Rational(215 * 215 * 215, 28 * 28 * 28));
}

TEST(JInvariant, BasisChangesKeepJ) {
  const auto& d = point_data(Rational(-1, 7), 200);
  auto e = literal_e();
  auto b = lattice_basis(e.plus, e.minus);
  const BigComplex j = j_invariant(pipeline_tau(), d.ctx);
  const BigReal tol = d.ctx.pow10(-150);
  // Swapped basis: tau' = 1/tau lies in the lower half plane; the lattice is that of -tau'.
  LatticeBasis swapped{b.E2, b.E1, true};
  BigComplex t_swap = tau_from_pairings(swapped, d.jet, d.s, kOmegaEll);
  EXPECT_LT(abs(t_swap * pipeline_tau() - BigComplex(d.ctx.real(1))), tol);
  EXPECT_LT(abs(j_invariant(-t_swap, d.ctx) - j) / abs(j), tol);
  // (E1 + E2, E1): tau' = 1 / (1 + tau); the lattice of -tau' is the original one.
  ChargeVector sum;
  for (size_t i = 0; i < 4; ++i) sum[i] = b.E1[i] + b.E2[i];
  BigComplex t_sum = tau_from_pairings(LatticeBasis{sum, b.E1, true}, d.jet, d.s, kOmegaEll);
  EXPECT_LT(abs(t_sum * (pipeline_tau() + d.ctx.real(1)) - BigComplex(d.ctx.real(1))), tol);
  EXPECT_LT(abs(j_invariant(-t_sum, d.ctx) - j) / abs(j), tol);
}

TEST(VPerp, Inversion) {
  PrecisionContext ctx(60, 10);
  const BigReal l = ctx.real("0.33022365934448053902826194612283487754045234078189");
  const BigReal v = ctx.real(kVPerp);
  // Forward: c = -(147/8) L i / v.
  const BigComplex c = imaginary(l * Rational(-147, 8) / v);
  EXPECT_LT(abs(v_perp_from_elliptic_period(c, l, ctx.pow10(-30)) - v), ctx.pow10(-55));
  try {
    v_perp_from_elliptic_period(-c, l, ctx.pow10(-30));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonRealResult);
  }
  EXPECT_THROW(v_perp_from_elliptic_period(BigComplex(ctx.real(1), ctx.real(1)), l, ctx.pow10(-30)), Error);
}

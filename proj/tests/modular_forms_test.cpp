#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "rank2/modular_forms.hpp"

using namespace rank2;

namespace {

const char* kLF2At1 = "0.33022365934448053902826194612283487754045234078189";
const char* kLF4At1 = "0.67496319716994177129269568273091339919322842904407";
const char* kLF4At2 = "0.91930674266912115653914356907939249680895763199044";

ModularFormSpec f2_spec() { return {14, 2, "14.2.a.a", std::nullopt, CoefficientSource::EtaProduct}; }
ModularFormSpec f4_spec() { return {14, 4, "14.4.a.a", std::nullopt, CoefficientSource::DataFile}; }

EllipticCurveModel x0_14() { return EllipticCurveModel::make(1, 0, 1, 4, -6); }

CoefficientTable f2_table(unsigned long n_max) {
  auto t = eta_product_coefficients({{1, 1}, {2, 1}, {7, 1}, {14, 1}}, n_max);
  t.a.erase(0);
  return t;
}

CoefficientTable f4_table() { return ingest_coefficient_file(std::string(RANK2_DATA_DIR) + "/14.4.a.a.txt", f4_spec()); }

std::string write_temp(const std::string& name, const std::string& body) {
  auto path = std::filesystem::temp_directory_path() / ("rank2_mf_" + name);
  std::ofstream(path) << body;
  return path.string();
}

// Gamma(s, x) / Gamma(s) by double-exponential quadrature of
// int_0^oo (x + u)^(s-1) e^-(x+u) du / (s-1)!, u = exp(tau - exp(-tau)).
BigReal incomplete_gamma_quadrature(int s, const BigReal& x, const PrecisionContext& ctx, long steps_per_unit) {
  const BigReal h = ctx.real(Rational(1, steps_per_unit));
  BigReal acc = ctx.zero();
  for (long k = -6 * steps_per_unit; k <= 6 * steps_per_unit; ++k) {
    const BigReal tau = h * k;
    const BigReal e = exp(-tau);
    const BigReal u = exp(tau - e);
    acc += pow(x + u, static_cast<long>(s - 1)) * exp(-(x + u)) * u * (e + 1);
  }
  return acc * h / ctx.real(factorial(static_cast<unsigned long>(s - 1)));
}

}  // namespace

TEST(EtaProduct, LevelFourteenMatchesPointCounts) {
  auto t = f2_table(20);
  EXPECT_EQ(t.at(1), 1);
  for (unsigned long p : {3UL, 5UL, 11UL, 13UL, 17UL, 19UL}) EXPECT_EQ(t.at(p), ap_from_point_count(x0_14(), p)) << p;
}

TEST(EtaProduct, RamanujanTau) {
  auto t = eta_product_coefficients({{1, 24}}, 3);
  EXPECT_EQ(t.at(0), 0);
  EXPECT_EQ(t.at(1), 1);
  EXPECT_EQ(t.at(2), -24);
  EXPECT_EQ(t.at(3), 252);
}

TEST(EtaProduct, EmptyIsOne) {
  auto t = eta_product_coefficients({}, 5);
  EXPECT_EQ(t.at(0), 1);
  for (unsigned long n = 1; n <= 5; ++n) EXPECT_EQ(t.at(n), 0);
}

TEST(EtaProduct, NegativeExponentAndLeadingPower) {
  try {
    eta_product_coefficients({{1, -1}, {2, 2}}, 10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonIntegralLeadingPower);
  }
  EXPECT_THROW(eta_product_coefficients({{1, -24}}, 10), Error);
  // eta(2t)^24 / eta(t)^24 = q prod (1 + q^n)^24.
  const unsigned long n_max = 12;
  auto t = eta_product_coefficients({{1, -24}, {2, 24}}, n_max);
  std::vector<Integer> direct(n_max, Integer(0));
  direct[0] = 1;
  for (unsigned long n = 1; n < n_max; ++n)
    for (int r = 0; r < 24; ++r)
      for (unsigned long i = n_max; i-- > n;) direct[i] += direct[i - n];
  EXPECT_EQ(t.at(0), 0);
  for (unsigned long i = 0; i < n_max; ++i) EXPECT_EQ(t.at(i + 1), direct[i]) << i;
}

TEST(PointCount, SmallPrimesByEnumeration) {
  auto e = x0_14();
  EXPECT_EQ(e.discriminant(), -21952);
  // Exhaustive oracle: count (x, y) in F_p^2 on the long Weierstrass model.
  for (unsigned long p : {2UL, 3UL, 5UL, 7UL, 11UL, 13UL, 29UL}) {
    long count = 1;
    for (long x = 0; x < static_cast<long>(p); ++x)
      for (long y = 0; y < static_cast<long>(p); ++y) {
        long lhs = y * y + x * y + y, rhs = x * x * x + 4 * x - 6;
        if (((lhs - rhs) % static_cast<long>(p) + static_cast<long>(p)) % static_cast<long>(p) == 0) ++count;
      }
    EXPECT_EQ(ap_from_point_count(e, p), static_cast<long>(p) + 1 - count) << p;
  }
  EXPECT_EQ(ap_from_point_count(e, 3), -2);
  EXPECT_EQ(ap_from_point_count(e, 5), 0);
  EXPECT_EQ(ap_from_point_count(e, 2), -1);
  EXPECT_EQ(ap_from_point_count(e, 7), 1);
  try {
    ap_from_point_count(e, 7, true);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::BadReductionPrime);
  }
  EXPECT_THROW(ap_from_point_count(e, 9), Error);
}

TEST(PointCount, AgreesWithEtaProductUpTo200) {
  auto t = f2_table(200);
  for (unsigned long p : primes_up_to(200)) EXPECT_EQ(t.at(p), ap_from_point_count(x0_14(), p)) << p;
}

TEST(Ingest, ShippedWeightFourFile) {
  auto t = f4_table();
  EXPECT_GE(t.contiguous_limit(), 2000u);
  EXPECT_EQ(t.at(1), 1);
  EXPECT_EQ(t.at(2), -2);
  EXPECT_EQ(t.at(6), t.at(2) * t.at(3));
}

TEST(Ingest, MultiplicativityGate) {
  auto spec = f4_spec();
  const std::string head = "label=14.4.a.a;level=14;weight=4\n";
  EXPECT_NO_THROW(parse_coefficient_text(head + "1:1\n2:-2\n3:-2\n4:4\n6:4\n", spec));
  try {
    parse_coefficient_text(head + "1:1\n2:-2\n3:-2\n4:4\n6:5\n", spec);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ValidationError);
    EXPECT_NE(std::string(e.what()).find("n = 6"), std::string::npos);
  }
}

TEST(Ingest, NormalizationAndDeligneBound) {
  auto spec = f4_spec();
  const std::string head = "label=14.4.a.a;level=14;weight=4\n";
  EXPECT_THROW(parse_coefficient_text(head + "1:2\n", spec), Error);
  // 2 * 3^(3/2) = 10.39...
  EXPECT_NO_THROW(parse_coefficient_text(head + "1:1\n3:10\n", spec));
  try {
    parse_coefficient_text(head + "1:1\n3:11\n", spec);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ValidationError);
  }
}

TEST(Ingest, ParseErrorsCarryPosition) {
  auto spec = f4_spec();
  auto path = write_temp("bad.txt", "label=14.4.a.a;level=14;weight=4\n# comment\n1:1\n2:-2x\n");
  try {
    ingest_coefficient_file(path, spec);
    FAIL();
  } catch (const ParseFailure& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    EXPECT_EQ(e.line(), 4u);
    EXPECT_EQ(e.column(), 5u);
  }
  try {
    parse_coefficient_text("1:1\n", spec);
    FAIL();
  } catch (const ParseFailure& e) {
    EXPECT_EQ(e.line(), 1u);
  }
  EXPECT_THROW(parse_coefficient_text("label=x;level=14;weight=2\n1:1\n", spec), Error);
  EXPECT_THROW(ingest_coefficient_file("/nonexistent/table.txt", spec), Error);
}

TEST(Hecke, Recursion) {
  ModularFormSpec spec{14, 2, "t", std::nullopt, CoefficientSource::PointCount};
  std::map<unsigned long, Integer> primes;
  for (unsigned long p : primes_up_to(30)) primes[p] = ap_from_point_count(x0_14(), p);
  auto t = hecke_extend(primes, spec, 30);
  EXPECT_EQ(t.at(9), t.at(3) * t.at(3) - 3);
  EXPECT_EQ(t.at(25), t.at(5) * t.at(5) - 5);
  EXPECT_EQ(t.at(2), -1);
  EXPECT_EQ(t.at(8), -1);
  EXPECT_EQ(t.at(6), t.at(2) * t.at(3));
  auto eta = f2_table(30);
  for (unsigned long n = 1; n <= 30; ++n) EXPECT_EQ(t.at(n), eta.at(n)) << n;
  primes.erase(29);
  try {
    hecke_extend(primes, spec, 30);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingPrime);
  }
}

TEST(Hecke, WeightFourFileIsHeckeClosed) {
  auto t = f4_table();
  auto rebuilt = hecke_extend(prime_coefficients(t, 2000), f4_spec(), 2000);
  for (unsigned long n = 1; n <= 2000; ++n) ASSERT_EQ(rebuilt.at(n), t.at(n)) << n;
}

TEST(IncompleteGamma, ClosedFormAgainstQuadrature) {
  PrecisionContext ctx(60, 10);
  for (int s : {1, 2, 3}) {
    for (const Rational& xr : {Rational(1, 10), Rational(1), Rational(10)}) {
      const BigReal x = ctx.real(xr);
      BigReal closed = ctx.zero(), term = ctx.real(1);
      for (int j = 0; j < s; ++j) {
        if (j > 0) term = term * x / static_cast<long>(j);
        closed += term;
      }
      closed *= exp(-x);
      const BigReal q1 = incomplete_gamma_quadrature(s, x, ctx, 64);
      const BigReal q2 = incomplete_gamma_quadrature(s, x, ctx, 128);
      ASSERT_LT(abs(q1 - q2), ctx.pow10(-58));
      EXPECT_LT(abs(closed - q2), ctx.pow10(-58)) << s;
    }
  }
}

TEST(LValue, PublishedValues) {
  PrecisionContext ctx(60, 10);
  auto f2 = f2_spec();
  f2.sign = 1;
  auto f4 = f4_spec();
  f4.sign = 1;
  auto t2 = f2_table(2000);
  auto t4 = f4_table();
  const BigReal tol = ctx.pow10(-49);
  EXPECT_LT(abs(l_value(t2, f2, 1, ctx) - ctx.real(kLF2At1)), tol);
  EXPECT_LT(abs(l_value(t4, f4, 1, ctx) - ctx.real(kLF4At1)), tol);
  EXPECT_LT(abs(l_value(t4, f4, 2, ctx) - ctx.real(kLF4At2)), tol);
  // Lambda(3) = Lambda(1) gives 2 L(3) = (2 pi)^2 / 14 L(1).
  const BigReal l3 = l_value(t4, f4, 3, ctx);
  const BigReal ratio = pow(constant_pi(ctx) * 2, 2L) / 14;
  EXPECT_LT(abs(l3 * 2 - ratio * ctx.real(kLF4At1)), tol);
}

TEST(LValue, SplitAndLengthInvariance) {
  PrecisionContext ctx(60, 10);
  auto f4 = f4_spec();
  f4.sign = 1;
  auto t4 = f4_table();
  const BigReal base = l_value(t4, f4, 2, ctx);
  const BigReal tol = ctx.pow10(-30);
  EXPECT_LT(abs(l_value(t4, f4, 2, ctx, {Rational(2), std::nullopt}) - base), tol);
  EXPECT_LT(abs(l_value(t4, f4, 2, ctx, {Rational(1, 2), std::nullopt}) - base), tol);
  auto parts = detail::l_value_parts(t4, f4, 2, ctx, {});
  EXPECT_LT(abs(l_value(t4, f4, 2, ctx, {Rational(1), 2 * parts.n_used}) - base), tol);
}

TEST(LValue, Errors) {
  PrecisionContext ctx(60, 10);
  auto f2 = f2_spec();
  auto t2 = f2_table(2000);
  try {
    l_value(t2, f2, 1, ctx);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownSign);
  }
  f2.sign = 1;
  try {
    l_value(f2_table(40), f2, 1, ctx);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientCoefficients);
  }
  EXPECT_THROW(l_value(t2, f2, 2, ctx), Error);
}

TEST(Sign, ResolvedBySplitInvariance) {
  PrecisionContext ctx(60, 10);
  EXPECT_EQ(resolve_sign(f2_table(2000), f2_spec(), ctx), 1);
  EXPECT_EQ(resolve_sign(f4_table(), f4_spec(), ctx), 1);
}

TEST(Sign, RankOneCurveHasMinusSign) {
  // y^2 + y = x^3 - x, conductor 37: odd functional equation, L(1) = 0.
  PrecisionContext ctx(50, 10);
  auto e = EllipticCurveModel::make(0, 0, 1, -1, 0);
  ModularFormSpec spec{37, 2, "37.2.a.a", std::nullopt, CoefficientSource::PointCount};
  std::map<unsigned long, Integer> primes;
  for (unsigned long p : primes_up_to(1500)) primes[p] = ap_from_point_count(e, p);
  auto t = hecke_extend(primes, spec, 1500);
  EXPECT_EQ(resolve_sign(t, spec, ctx), -1);
  spec.sign = -1;
  EXPECT_LT(abs(l_value(t, spec, 1, ctx)), ctx.pow10(-45));
}

TEST(Sign, NonModularTableIsAmbiguous) {
  PrecisionContext ctx(50, 10);
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> dist(-3, 3);
  CoefficientTable t;
  for (unsigned long n = 1; n <= 2000; ++n) t.a[n] = n == 1 ? 1 : dist(rng);
  try {
    resolve_sign(t, f2_spec(), ctx);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AmbiguousSign);
  }
}

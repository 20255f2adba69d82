#pragma once

// The complex elliptic curve carried by the A-side sub-structure: its period
// ratio tau from integral pairings, and j(tau) from Eisenstein series.

#include <cmath>
#include <optional>
#include <vector>

#include "rank2/error.hpp"
#include "rank2/hodge_split.hpp"
#include "rank2/mirror_structure.hpp"
#include "rank2/numerics/big.hpp"
#include "rank2/numerics/constants.hpp"
#include "rank2/numerics/recognize.hpp"

namespace rank2 {

struct LatticeBasis {
  ChargeVector E1;
  ChargeVector E2;
  bool primitive = true;  // both vectors have coprime entries
};

/// (E_+, (5 E_+ + 14 E_-) / 2), required to be integral.
inline LatticeBasis lattice_basis(const RationalVector& e_plus, const RationalVector& e_minus) {
  LatticeBasis out;
  bool primitive = true;
  auto integral = [&](const RationalVector& v, const char* name) {
    ChargeVector c;
    Integer g = 0;
    for (size_t i = 0; i < 4; ++i) {
      if (v[i].get_den() != 1) {
        throw Error(ErrorCode::NonIntegralBasis, std::string(name) + " = " + to_string(v) + " is not integral");
      }
      c[i] = v[i].get_num();
      g = gcd(g, c[i]);
    }
    if (g != 1) primitive = false;
    return c;
  };
  RationalVector e2;
  for (size_t i = 0; i < 4; ++i) e2[i] = (5 * e_plus[i] + 14 * e_minus[i]) / 2;
  out.E1 = integral(e_plus, "E1");
  out.E2 = integral(e2, "E2");
  out.primitive = primitive;
  Matrix<Rational> m{{out.E1[0], out.E1[1], out.E1[2], out.E1[3]}, {out.E2[0], out.E2[1], out.E2[2], out.E2[3]}};
  if (rank(m) != 2) throw Error(ErrorCode::NonIntegralBasis, "E1 and E2 are dependent");
  return out;
}

/// tau = <E2, omega> / <E1, omega> for the one-form omega given as a de Rham combination.
inline BigComplex tau_from_pairings(const LatticeBasis& basis, const PeriodJet& jet, const TransitionMatrix& s,
                                    const DeRhamCombination& omega) {
  const BigComplex num = pairing(to_rational(basis.E2), jet, s, omega);
  const BigComplex den = pairing(to_rational(basis.E1), jet, s, omega);
  const BigReal size = max(abs(num), abs(den));
  const double floor = -0.5 * static_cast<double>(size.precision()) * 0.30103;
  if (abs(den).is_zero() || (abs(den) / size).log10_abs() < floor) {
    throw Error(ErrorCode::VanishingDenominator, "<E1, omega> vanishes");
  }
  return num / den;
}

/// Representative of tau in the standard fundamental domain of SL2(Z).
inline BigComplex reduce_to_fundamental_domain(BigComplex tau) {
  if (tau.imag().sign() <= 0) throw Error(ErrorCode::NotInUpperHalfPlane, "Im tau must be positive");
  const mpfr_prec_t bits = tau.real().precision();
  for (int iter = 0; iter < 10000; ++iter) {
    const BigReal shift = round(tau.real());
    tau = BigComplex(tau.real() - shift, tau.imag());
    if (norm(tau) < BigReal(1, bits)) {
      tau = BigComplex(BigReal(-1, bits)) / tau;
    } else {
      return tau;
    }
  }
  return tau;
}

/// j = 1728 E4^3 / (E4^3 - E6^2) with q = exp(2 pi i tau), after reduction.
inline BigComplex j_invariant(const BigComplex& tau_in, const PrecisionContext& ctx) {
  if (tau_in.imag().sign() <= 0) throw Error(ErrorCode::NotInUpperHalfPlane, "Im tau must be positive");
  const BigComplex tau = reduce_to_fundamental_domain(tau_in);
  const BigComplex q = exp(two_pi_i(ctx) * tau);
  const double log10_q = abs(q).log10_abs();
  // 504 sigma_5(n) |q|^n <= 504 n^6 |q|^n below 10^-(digits + 5).
  const double target = -(ctx.total_digits() + 5.0);
  unsigned long n_max = 1;
  while (std::log10(504.0) + 6 * std::log10(static_cast<double>(n_max)) + n_max * log10_q > target) ++n_max;
  std::vector<Integer> s3(n_max + 1, Integer(0)), s5(n_max + 1, Integer(0));
  for (unsigned long d = 1; d <= n_max; ++d) {
    const Integer d3 = Integer(d) * d * d, d5 = d3 * d * d;
    for (unsigned long m = d; m <= n_max; m += d) {
      s3[m] += d3;
      s5[m] += d5;
    }
  }
  BigComplex e4(ctx.real(1)), e6(ctx.real(1));
  BigComplex qn(ctx.real(1));
  for (unsigned long n = 1; n <= n_max; ++n) {
    qn = qn * q;
    e4 += qn * Integer(s3[n] * 240);
    e6 -= qn * Integer(s5[n] * 504);
  }
  const BigComplex e4c = e4 * e4 * e4;
  return e4c * 1728L / (e4c - e6 * e6);
}

/// v_perp from (2 pi i)^2 c^-(M^ell) = -(147/8) L(f2, 1) i / v_perp.
inline BigReal v_perp_from_elliptic_period(const BigComplex& c_minus_ell_q2, const BigReal& l_f2_1, const BigReal& tol) {
  if (abs(c_minus_ell_q2).is_zero()) throw Error(ErrorCode::NonRealResult, "elliptic period vanishes");
  const BigComplex v = imaginary(l_f2_1 * Rational(-147, 8)) / c_minus_ell_q2;
  if (abs(v.imag()) > tol * max(abs(v.real()), BigReal(1, l_f2_1.precision()))) {
    throw Error(ErrorCode::NonRealResult, "v_perp has imaginary part " + v.imag().to_string(10));
  }
  if (v.real().sign() <= 0) throw Error(ErrorCode::NonRealResult, "v_perp is not positive: " + v.real().to_string(20));
  return v.real();
}

struct EllipticReport {
  BigComplex tau;
  BigComplex j;
  std::optional<Rational> recognized_j;
  std::optional<BigReal> v_perp;
  bool primitive_basis = true;
};

}  // namespace rank2

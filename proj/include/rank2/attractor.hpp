#pragma once

// Attractor equations C S.varpi + conj(C S.varpi) = P for integral charges P.

#include <algorithm>
#include <array>
#include <utility>
#include <vector>

#include "rank2/error.hpp"
#include "rank2/mirror_structure.hpp"
#include "rank2/numerics/big.hpp"
#include "rank2/numerics/linalg.hpp"
#include "rank2/numerics/recognize.hpp"

namespace rank2 {

using ComplexVector4 = std::array<BigComplex, 4>;

struct AttractorCoefficient {
  BigComplex C;
  BigReal residual;  // max_i |2 Re(C u_i) - P_i|
};

struct AttractorCertificate {
  BigComplex point;
  std::vector<ChargeVector> charges;
  std::vector<AttractorCoefficient> coefficients;
  int rank = 0;
  BigReal tolerance_used;
};

namespace detail {
inline BigReal dot4(const std::array<BigReal, 4>& a, const std::array<BigReal, 4>& b) {
  BigReal acc = a[0] * b[0];
  for (size_t i = 1; i < 4; ++i) acc += a[i] * b[i];
  return acc;
}
}  // namespace detail

/// Least-squares C with 2 Re(C u) = P over the four real equations.
inline AttractorCoefficient attractor_residual(const ComplexVector4& u, const ChargeVector& p) {
  const mpfr_prec_t bits = u[0].precision();
  // 2 Re((x + i y) u) = x (2 Re u) + y (-2 Im u).
  std::array<BigReal, 4> a, b, target;
  for (size_t i = 0; i < 4; ++i) {
    a[i] = u[i].real() * 2;
    b[i] = -(u[i].imag() * 2);
    target[i] = BigReal(p[i], bits);
  }
  const BigReal aa = detail::dot4(a, a), ab = detail::dot4(a, b), bb = detail::dot4(b, b);
  const BigReal det = aa * bb - ab * ab;
  if (det.is_zero() || (det / (aa * bb)).log10_abs() < -0.25 * static_cast<double>(bits) * 0.30103) {
    throw Error(ErrorCode::DegenerateSpan, "Re u and Im u are linearly dependent");
  }
  const BigReal ap = detail::dot4(a, target), bp = detail::dot4(b, target);
  BigReal x = (bb * ap - ab * bp) / det;
  BigReal y = (aa * bp - ab * ap) / det;
  BigReal residual(bits);
  for (size_t i = 0; i < 4; ++i) residual = max(residual, abs(a[i] * x + b[i] * y - target[i]));
  return {BigComplex(std::move(x), std::move(y)), std::move(residual)};
}

/// Checks both charges at a point. Rank counts the charges whose residual is within tol.
inline AttractorCertificate verify_rank2(const BigComplex& point, const PeriodJet& jet, const TransitionMatrix& s,
                                         const ChargeVector& a_plus, const ChargeVector& a_minus, const BigReal& tol) {
  Matrix<Rational> m{{a_plus[0], a_plus[1], a_plus[2], a_plus[3]}, {a_minus[0], a_minus[1], a_minus[2], a_minus[3]}};
  if (rank(m) != 2) throw Error(ErrorCode::DependentCharges, "charges are not linearly independent");
  const auto u = integral_periods(s, jet, 0);
  AttractorCertificate cert;
  cert.point = point;
  cert.charges = {a_plus, a_minus};
  cert.tolerance_used = tol;
  for (const auto& p : cert.charges) {
    cert.coefficients.push_back(attractor_residual(u, p));
    if (cert.coefficients.back().residual <= tol) ++cert.rank;
  }
  return cert;
}

/// Integer vectors of height <= height_bound within tol of span{Re u, Im u},
/// primitive, pairwise independent and sorted by height.
inline std::vector<ChargeVector> search_charges(const ComplexVector4& u, const Integer& height_bound, const BigReal& tol) {
  const mpfr_prec_t bits = u[0].precision();
  // Orthonormal basis: Gram-Schmidt over Re u, Im u, e_1..e_4; the last two span the complement.
  std::vector<std::array<BigReal, 4>> candidates;
  std::array<BigReal, 4> re, im;
  for (size_t i = 0; i < 4; ++i) {
    re[i] = u[i].real();
    im[i] = u[i].imag();
  }
  candidates.push_back(re);
  candidates.push_back(im);
  for (size_t k = 0; k < 4; ++k) {
    std::array<BigReal, 4> e;
    for (size_t i = 0; i < 4; ++i) e[i] = BigReal(i == k ? 1L : 0L, bits);
    candidates.push_back(e);
  }
  std::vector<std::array<BigReal, 4>> ortho;
  const double floor_digits = -0.25 * static_cast<double>(bits) * 0.30103;
  for (size_t c = 0; c < candidates.size() && ortho.size() < 4; ++c) {
    auto v = candidates[c];
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : ortho) {
        BigReal d = detail::dot4(v, q);
        for (size_t i = 0; i < 4; ++i) v[i] -= d * q[i];
      }
    }
    BigReal n = sqrt(detail::dot4(v, v));
    if (c < 2 && (n.is_zero() || n.log10_abs() < floor_digits)) {
      throw Error(ErrorCode::DegenerateSpan, "Re u and Im u are linearly dependent");
    }
    if (n.is_zero() || n.log10_abs() < -3) continue;
    for (auto& x : v) x /= n;
    ortho.push_back(v);
  }
  std::vector<BigReal> w1(ortho[2].begin(), ortho[2].end()), w2(ortho[3].begin(), ortho[3].end());
  BigReal scale = BigReal(1, bits) / tol;
  const auto rows = relation_lattice({w1, w2}, scale);
  std::vector<ChargeVector> found;
  for (const auto& m : rows) {
    Integer g = 0;
    for (const auto& x : m) g = gcd(g, x);
    if (g == 0) continue;
    std::vector<Integer> prim;
    for (const auto& x : m) prim.push_back(x / g);
    if (height(prim) > height_bound) continue;
    BigReal f1(bits), f2(bits);
    for (size_t i = 0; i < 4; ++i) {
      f1 += w1[i] * BigReal(prim[i], bits);
      f2 += w2[i] * BigReal(prim[i], bits);
    }
    if (sqrt(f1 * f1 + f2 * f2) > tol) continue;
    normalize_sign(prim);
    ChargeVector v{prim[0], prim[1], prim[2], prim[3]};
    Matrix<Rational> span;
    for (const auto& f : found) span.push_back({f[0], f[1], f[2], f[3]});
    span.push_back({v[0], v[1], v[2], v[3]});
    if (rank(span) == static_cast<int>(span.size())) found.push_back(v);
  }
  std::stable_sort(found.begin(), found.end(), [](const ChargeVector& a, const ChargeVector& b) {
    return height({a[0], a[1], a[2], a[3]}) < height({b[0], b[1], b[2], b[3]});
  });
  return found;
}

}  // namespace rank2

#pragma once

// Integral structure on H^3: prepotential data, the transition matrix S from
// canonical to integral symplectic periods, the involution F_infinity and the
// symplectic pairing in the basis (beta^0, beta^1, alpha^0, alpha^1).

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rank2/error.hpp"
#include "rank2/numerics/big.hpp"
#include "rank2/numerics/constants.hpp"
#include "rank2/numerics/linalg.hpp"
#include "rank2/numerics/rational.hpp"
#include "rank2/picard_fuchs.hpp"

namespace rank2 {

using ChargeVector = std::array<Integer, 4>;
using RationalVector = std::array<Rational, 4>;
using IntMatrix4 = std::array<std::array<Integer, 4>, 4>;

inline RationalVector to_rational(const ChargeVector& v) { return {v[0], v[1], v[2], v[3]}; }

inline std::string to_string(const RationalVector& v) {
  return "(" + to_string(v[0]) + "," + to_string(v[1]) + "," + to_string(v[2]) + "," + to_string(v[3]) + ")";
}
inline std::string to_string(const ChargeVector& v) { return to_string(to_rational(v)); }

struct PrepotentialData {
  Integer Y111;
  Rational Y011;
  Rational Y001;
  Integer euler;  // chi of the mirror
  Rational lambda = 1;

  /// Rational multiplier of zeta(3)/(2 pi i)^3 in Y000.
  [[nodiscard]] Rational y000_coefficient() const { return Rational(-3 * euler); }
};

/// chi from the rational multiplier c in Y000 = c zeta(3)/(2 pi i)^3, c = -3 chi.
inline Integer euler_from_y000(const Rational& coefficient) {
  Rational chi = -coefficient / 3;
  if (chi.get_den() != 1) {
    throw Error(ErrorCode::NonIntegralEuler, "Y000 coefficient " + to_string(coefficient) + " is not divisible by 3");
  }
  return chi.get_num();
}

struct TransitionMatrix {
  Matrix<BigComplex> S;
  Rational lambda_used;
};

/// S = lambda (2 pi i)^3 [[-Y000/3, -Y001/2, 0, Y111/6], [-Y001/2, -Y011, -Y111/2, 0],
/// [1, 0, 0, 0], [0, 1, 0, 0]] with Y000 = -3 chi zeta(3)/(2 pi i)^3.
inline TransitionMatrix build_s_matrix(const PrepotentialData& data, const PrecisionContext& ctx) {
  if (data.lambda == 0) throw Error(ErrorCode::ValidationError, "lambda must be nonzero");
  const BigComplex tpi = two_pi_i(ctx);
  const BigComplex tpi3 = tpi * tpi * tpi;
  const BigComplex scale = tpi3 * data.lambda;
  auto q = [&](const Rational& r) { return scale * r; };
  // -Y000/3 times (2 pi i)^3 is chi zeta(3), real.
  BigComplex s00 = BigComplex(constant_zeta3(ctx) * BigReal(data.euler, ctx.bits())) * data.lambda;
  const BigComplex zero(ctx.zero());
  TransitionMatrix out;
  out.lambda_used = data.lambda;
  out.S = {
      {s00, q(-data.Y001 / 2), zero, q(Rational(data.Y111) / 6)},
      {q(-data.Y001 / 2), q(-data.Y011), q(-Rational(data.Y111) / 2), zero},
      {q(Rational(1)), zero, zero, zero},
      {zero, q(Rational(1)), zero, zero},
  };
  return out;
}

/// Sigma with P^T Sigma Q = -P0 Q2 - P1 Q3 + P2 Q0 + P3 Q1.
inline IntMatrix4 symplectic_form() {
  IntMatrix4 s{};
  for (auto& row : s)
    for (auto& x : row) x = 0;
  s[0][2] = -1;
  s[1][3] = -1;
  s[2][0] = 1;
  s[3][1] = 1;
  return s;
}

inline Rational symplectic_pairing(const RationalVector& p, const RationalVector& q) {
  return -p[0] * q[2] - p[1] * q[3] + p[2] * q[0] + p[3] * q[1];
}
inline Rational symplectic_pairing(const ChargeVector& p, const ChargeVector& q) {
  return symplectic_pairing(to_rational(p), to_rational(q));
}

/// P^T Sigma x for a complex 4-vector x.
inline BigComplex symplectic_pairing(const RationalVector& p, const std::array<BigComplex, 4>& x) {
  return x[0] * p[2] + x[1] * p[3] - x[2] * p[0] - x[3] * p[1];
}

struct InvolutionMatrix {
  IntMatrix4 F;
};

/// Validates F^2 = I and trace F = 0.
inline InvolutionMatrix involution_matrix(const IntMatrix4& f) {
  for (size_t i = 0; i < 4; ++i) {
    for (size_t j = 0; j < 4; ++j) {
      Integer acc = 0;
      for (size_t k = 0; k < 4; ++k) acc += f[i][k] * f[k][j];
      if (acc != (i == j ? 1 : 0)) throw Error(ErrorCode::NotAnInvolution, "F^2 is not the identity");
    }
  }
  Integer trace = f[0][0] + f[1][1] + f[2][2] + f[3][3];
  if (trace != 0) throw Error(ErrorCode::NotAnInvolution, "trace F = " + trace.get_str() + ", expected 0");
  return {f};
}

namespace detail {

// Saturated integer basis of {v in Z^4 : M v = 0}: column-reduce M with a
// tracked unimodular matrix; columns of U beyond the rank span the kernel.
inline std::vector<ChargeVector> integer_kernel(const IntMatrix4& m) {
  IntMatrix4 a = m;
  IntMatrix4 u{};
  for (size_t i = 0; i < 4; ++i)
    for (size_t j = 0; j < 4; ++j) u[i][j] = (i == j) ? 1 : 0;
  auto col_op = [&](size_t dst, size_t src, const Integer& f) {  // col dst -= f * col src
    for (size_t r = 0; r < 4; ++r) {
      a[r][dst] -= f * a[r][src];
      u[r][dst] -= f * u[r][src];
    }
  };
  auto col_swap = [&](size_t x, size_t y) {
    for (size_t r = 0; r < 4; ++r) {
      std::swap(a[r][x], a[r][y]);
      std::swap(u[r][x], u[r][y]);
    }
  };
  size_t pivot_col = 0;
  for (size_t row = 0; row < 4 && pivot_col < 4; ++row) {
    // Euclid across columns pivot_col..3 on this row.
    while (true) {
      size_t best = 4;
      for (size_t c = pivot_col; c < 4; ++c) {
        if (a[row][c] != 0 && (best == 4 || abs(a[row][c]) < abs(a[row][best]))) best = c;
      }
      if (best == 4) break;
      col_swap(pivot_col, best);
      bool done = true;
      for (size_t c = pivot_col + 1; c < 4; ++c) {
        if (a[row][c] == 0) continue;
        Integer f;
        mpz_fdiv_q(f.get_mpz_t(), a[row][c].get_mpz_t(), a[row][pivot_col].get_mpz_t());
        col_op(c, pivot_col, f);
        if (a[row][c] != 0) done = false;
      }
      if (done) break;
    }
    bool nonzero = false;
    for (size_t c = pivot_col; c < 4; ++c) nonzero = nonzero || a[row][c] != 0;
    if (nonzero) ++pivot_col;
  }
  std::vector<ChargeVector> out;
  for (size_t c = pivot_col; c < 4; ++c) out.push_back({u[0][c], u[1][c], u[2][c], u[3][c]});
  return out;
}

// Row Hermite normal form of a small integer basis, then sign-normalized.
inline std::vector<ChargeVector> hermite_reduce(std::vector<ChargeVector> rows) {
  size_t r = 0;
  for (size_t col = 0; col < 4 && r < rows.size(); ++col) {
    while (true) {
      size_t best = rows.size();
      for (size_t i = r; i < rows.size(); ++i) {
        if (rows[i][col] != 0 && (best == rows.size() || abs(rows[i][col]) < abs(rows[best][col]))) best = i;
      }
      if (best == rows.size()) break;
      std::swap(rows[r], rows[best]);
      bool done = true;
      for (size_t i = r + 1; i < rows.size(); ++i) {
        if (rows[i][col] == 0) continue;
        Integer f;
        mpz_fdiv_q(f.get_mpz_t(), rows[i][col].get_mpz_t(), rows[r][col].get_mpz_t());
        for (size_t c = 0; c < 4; ++c) rows[i][c] -= f * rows[r][c];
        if (rows[i][col] != 0) done = false;
      }
      if (done) break;
    }
    if (r < rows.size() && rows[r][col] != 0) {
      if (rows[r][col] < 0)
        for (auto& x : rows[r]) x = -x;
      for (size_t i = 0; i < r; ++i) {
        Integer f;
        mpz_fdiv_q(f.get_mpz_t(), rows[i][col].get_mpz_t(), rows[r][col].get_mpz_t());
        for (size_t c = 0; c < 4; ++c) rows[i][c] -= f * rows[r][c];
      }
      ++r;
    }
  }
  return rows;
}

inline bool is_eigenvector(const IntMatrix4& f, const ChargeVector& v, int sign) {
  for (size_t i = 0; i < 4; ++i) {
    Integer acc = 0;
    for (size_t k = 0; k < 4; ++k) acc += f[i][k] * v[k];
    if (acc != sign * v[i]) return false;
  }
  return true;
}

}  // namespace detail

struct EigenSplit {
  std::array<ChargeVector, 2> plus;
  std::array<ChargeVector, 2> minus;
};

/// Pinned eigenbasis, e.g. the literal vectors used in a publication.
struct EigenBasisOverride {
  std::array<ChargeVector, 2> plus;
  std::array<ChargeVector, 2> minus;
};

/// Integer bases of the +1 and -1 eigenspaces: Hermite-reduced with positive
/// leading entries, or the validated override when one is given.
inline EigenSplit eigen_split(const InvolutionMatrix& inv, const std::optional<EigenBasisOverride>& pinned = std::nullopt) {
  EigenSplit out;
  for (int sign : {1, -1}) {
    IntMatrix4 m = inv.F;
    for (size_t i = 0; i < 4; ++i) m[i][i] -= sign;
    auto basis = detail::hermite_reduce(detail::integer_kernel(m));
    if (basis.size() != 2) throw Error(ErrorCode::NotAnInvolution, "eigenspace is not two-dimensional");
    auto& slot = sign == 1 ? out.plus : out.minus;
    slot = {basis[0], basis[1]};
  }
  if (!pinned) return out;
  // The override must be a unimodular change of the computed basis.
  auto check = [&](const std::array<ChargeVector, 2>& given, const std::array<ChargeVector, 2>& computed, int sign) {
    for (const auto& v : given) {
      if (!detail::is_eigenvector(inv.F, v, sign)) {
        throw Error(ErrorCode::MalformedConfig, "eigen_basis vector " + to_string(v) + " is not a " +
                                                    (sign == 1 ? "+1" : "-1") + " eigenvector of F");
      }
    }
    auto reduced = detail::hermite_reduce({given[0], given[1]});
    if (reduced.size() != 2 || reduced[0] != computed[0] || reduced[1] != computed[1]) {
      throw Error(ErrorCode::MalformedConfig, "eigen_basis override is not a basis of the integral eigenlattice");
    }
  };
  check(pinned->plus, out.plus, 1);
  check(pinned->minus, out.minus, -1);
  return {pinned->plus, pinned->minus};
}

struct EVectors {
  RationalVector plus;
  RationalVector minus;
};

/// E_+- = v2 + x v1 inside each eigenspace, with x fixed by Sigma-orthogonality
/// to A_+ and A_-.
inline EVectors e_vectors(const EigenSplit& split, const ChargeVector& a_plus, const ChargeVector& a_minus) {
  auto solve_one = [&](const std::array<ChargeVector, 2>& v, const char* name) {
    const RationalVector v1 = to_rational(v[0]), v2 = to_rational(v[1]);
    // Conditions <v2 + x v1, A> = 0 for A in {A_+, A_-}.
    std::optional<Rational> x;
    bool consistent = true;
    for (const auto& a : {a_plus, a_minus}) {
      const Rational c1 = symplectic_pairing(v1, to_rational(a));
      const Rational c2 = symplectic_pairing(v2, to_rational(a));
      if (c1 == 0) {
        consistent = consistent && c2 == 0;
        continue;
      }
      Rational candidate = -c2 / c1;
      if (x && *x != candidate) consistent = false;
      x = candidate;
    }
    if (!consistent || !x) {
      throw Error(ErrorCode::DegenerateComplement,
                  std::string("no unique orthogonal vector in the ") + name + " eigenspace");
    }
    RationalVector e;
    for (size_t i = 0; i < 4; ++i) e[i] = v2[i] + *x * v1[i];
    return e;
  };
  return {solve_one(split.plus, "+1"), solve_one(split.minus, "-1")};
}

/// Integral period vector S . varpi^{(j)}.
inline std::array<BigComplex, 4> integral_periods(const TransitionMatrix& s, const PeriodJet& jet, size_t j) {
  std::array<BigComplex, 4> out;
  for (size_t r = 0; r < 4; ++r) {
    BigComplex acc = s.S[r][0] * jet.W[0][j];
    for (size_t c = 1; c < 4; ++c) acc += s.S[r][c] * jet.W[c][j];
    out[r] = std::move(acc);
  }
  return out;
}

/// t = varpi_1 / varpi_0.
inline BigComplex mirror_map(const PeriodJet& jet) {
  const BigReal size = abs(jet.W[0][0]);
  if (size.is_zero() || size.log10_abs() < -static_cast<double>(size.precision()) * 0.30103 + 10) {
    throw Error(ErrorCode::VanishingPeriod, "varpi_0 vanishes at this point");
  }
  return jet.W[1][0] / jet.W[0][0];
}

}  // namespace rank2

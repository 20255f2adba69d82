#pragma once

// Fourth-order Picard-Fuchs operators in theta = phi d/dphi form, their
// Frobenius solutions at the MUM point phi = 0, and analytic continuation of the
// period jet by local Taylor expansion.

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rank2/error.hpp"
#include "rank2/numerics/big.hpp"
#include "rank2/numerics/constants.hpp"
#include "rank2/numerics/polynomial.hpp"
#include "rank2/numerics/rational.hpp"
#include "rank2/numerics/series.hpp"

namespace rank2 {

inline BigComplex to_complex(const Rational& q, const PrecisionContext& ctx) { return BigComplex(ctx.real(q)); }

/// sum_i R_i(phi) theta^i, i = 0..4.
class PicardFuchsOperator {
 public:
  PicardFuchsOperator(std::string label, std::array<RationalPolynomial, 5> r) : label_(std::move(label)) {
    for (size_t i = 0; i < 5; ++i) r_[i] = trim(std::move(r[i]));
    if (r_[4].empty()) throw Error(ErrorCode::MalformedConfig, "R_4 must be a nonzero polynomial");
    for (size_t i = 0; i < 4; ++i) {
      if (!r_[i].empty() && r_[i][0] != 0) {
        throw Error(ErrorCode::NonMUMOperator, "indicial polynomial at 0 is not rho^4: R_" + std::to_string(i) +
                                                    "(0) = " + to_string(r_[i][0]));
      }
    }
    if (r_[4][0] == 0) throw Error(ErrorCode::NonMUMOperator, "R_4(0) = 0");
    find_singularities();
  }

  [[nodiscard]] const std::string& label() const noexcept { return label_; }
  [[nodiscard]] const RationalPolynomial& coefficient(size_t i) const { return r_.at(i); }
  [[nodiscard]] const std::array<RationalPolynomial, 5>& coefficients() const noexcept { return r_; }

  /// Indicial polynomial at 0, ascending in rho; equals R_4(0) rho^4 for a MUM operator.
  [[nodiscard]] RationalPolynomial indicial_polynomial() const {
    RationalPolynomial out(5, Rational(0));
    for (size_t i = 0; i < 5; ++i) out[i] = r_[i].empty() ? Rational(0) : r_[i][0];
    return out;
  }

  /// Distinct rational roots of R_4 (finite nonzero singular points), ascending.
  [[nodiscard]] const std::vector<Rational>& rational_singular_points() const noexcept { return rational_roots_; }
  /// Factor of R_4 left after removing the rational roots (constant if R_4 splits over Q).
  [[nodiscard]] const RationalPolynomial& irrational_factor() const noexcept { return remainder_; }

  /// Finite singular points: 0, the rational roots of R_4 and numerical roots of
  /// the irrational factor. Infinity is always singular and not listed.
  [[nodiscard]] std::vector<BigComplex> singular_points(const PrecisionContext& ctx) const {
    std::vector<BigComplex> out;
    out.push_back(BigComplex(ctx.zero()));
    for (const auto& r : rational_roots_) out.push_back(to_complex(r, ctx));
    for (auto& z : numeric_roots(remainder_, ctx)) out.push_back(std::move(z));
    return out;
  }

  /// Radius of convergence of the Frobenius series: distance to the nearest nonzero singular point.
  [[nodiscard]] BigReal convergence_radius(const PrecisionContext& ctx) const {
    auto pts = singular_points(ctx);
    std::optional<BigReal> best;
    for (size_t i = 1; i < pts.size(); ++i) {
      BigReal d = abs(pts[i]);
      if (!best || d < *best) best = d;
    }
    if (!best) return pow(ctx.real(10), 1000000L);  // theta^4-like: entire series
    return *best;
  }

  /// Q_m(x) = sum_i r_{i,m} x^i, so that the operator is sum_m phi^m Q_m(theta).
  [[nodiscard]] std::vector<RationalPolynomial> theta_slices() const {
    size_t deg = 0;
    for (const auto& p : r_) deg = std::max(deg, p.size());
    std::vector<RationalPolynomial> q(deg, RationalPolynomial(5, Rational(0)));
    for (size_t i = 0; i < 5; ++i) {
      for (size_t m = 0; m < r_[i].size(); ++m) q[m][i] = r_[i][m];
    }
    return q;
  }

  /// P_k with operator = sum_k P_k(phi) (d/dphi)^k; P_k = phi^k sum_{i>=k} S2(i,k) R_i.
  [[nodiscard]] std::array<RationalPolynomial, 5> derivative_form() const {
    static constexpr long kStirling2[5][5] = {
        {1, 0, 0, 0, 0}, {0, 1, 0, 0, 0}, {0, 1, 1, 0, 0}, {0, 1, 3, 1, 0}, {0, 1, 7, 6, 1}};
    std::array<RationalPolynomial, 5> out;
    for (size_t k = 0; k < 5; ++k) {
      RationalPolynomial acc;
      for (size_t i = k; i < 5; ++i) {
        if (kStirling2[i][k] == 0) continue;
        if (acc.size() < r_[i].size()) acc.resize(r_[i].size(), Rational(0));
        for (size_t m = 0; m < r_[i].size(); ++m) acc[m] += kStirling2[i][k] * r_[i][m];
      }
      RationalPolynomial shifted(k, Rational(0));
      shifted.insert(shifted.end(), acc.begin(), acc.end());
      out[k] = trim(shifted);
    }
    return out;
  }

 private:
  void find_singularities() {
    // Rational root test on the integer-scaled R_4.
    RationalPolynomial p = r_[4];
    Integer lcm_den = 1;
    for (const auto& c : p) mpz_lcm(lcm_den.get_mpz_t(), lcm_den.get_mpz_t(), c.get_den_mpz_t());
    std::vector<Integer> ints;
    for (const auto& c : p) ints.push_back(Integer(c * lcm_den));
    auto divisors = [](Integer n) {
      n = abs(n);
      std::vector<Integer> out;
      if (n > Integer("1000000000000")) {
        throw Error(ErrorCode::MalformedConfig, "R_4 coefficients too large for the rational root search");
      }
      for (Integer d = 1; d * d <= n; ++d) {
        if (n % d == 0) {
          out.push_back(d);
          if (d * d != n) out.push_back(n / d);
        }
      }
      return out;
    };
    const auto num_divs = divisors(ints.front());
    const auto den_divs = divisors(ints.back());
    RationalPolynomial rest = p;
    for (const auto& a : num_divs) {
      for (const auto& b : den_divs) {
        for (int sgn : {1, -1}) {
          Rational cand(sgn * a, b);
          cand.canonicalize();
          bool seen = false;
          for (const auto& r : rational_roots_) seen = seen || r == cand;
          if (seen) continue;
          if (evaluate(rest, cand) == 0) {
            rational_roots_.push_back(cand);
            while (degree(rest) >= 1 && evaluate(rest, cand) == 0) rest = deflate(rest, cand);
          }
        }
      }
    }
    std::sort(rational_roots_.begin(), rational_roots_.end());
    remainder_ = trim(rest);
  }

  // Durand-Kerner iteration; only used for factors without rational roots.
  static std::vector<BigComplex> numeric_roots(const RationalPolynomial& p, const PrecisionContext& ctx) {
    const int n = degree(p);
    if (n < 1) return {};
    std::vector<BigComplex> coeffs;
    for (const auto& c : p) coeffs.push_back(to_complex(c / p.back(), ctx));
    auto eval = [&](const BigComplex& z) {
      BigComplex acc(ctx.zero());
      for (size_t i = coeffs.size(); i-- > 0;) acc = acc * z + coeffs[i];
      return acc;
    };
    std::vector<BigComplex> z;
    BigComplex seed(ctx.real(Rational(2, 5)), ctx.real(Rational(9, 10)));
    BigComplex w(ctx.real(1));
    for (int i = 0; i < n; ++i) {
      z.push_back(w);
      w *= seed;
    }
    const BigReal tol = ctx.pow10(-(ctx.total_digits() - 5));
    for (int it = 0; it < 2000; ++it) {
      BigReal change(ctx.bits());
      for (int i = 0; i < n; ++i) {
        BigComplex den(ctx.real(1));
        for (int j = 0; j < n; ++j) {
          if (j != i) den *= z[i] - z[j];
        }
        BigComplex step = eval(z[i]) / den;
        z[i] -= step;
        change = max(change, abs(step));
      }
      if (change < tol) break;
    }
    return z;
  }

  std::string label_;
  std::array<RationalPolynomial, 5> r_;
  std::vector<Rational> rational_roots_;
  RationalPolynomial remainder_;
};

/// f_0..f_3 with exact rational coefficients up to phi^order.
struct CanonicalSolutionSet {
  std::array<std::vector<Rational>, 4> f;
  int order = 0;
};

/// Frobenius solutions: c_n(rho) from Q_0(n+rho) c_n = -sum_{m>=1} Q_m(n-m+rho) c_{n-m}
/// in Q[rho]/(rho^4), then f_l[n] = l! [rho^l] c_n(rho).
inline CanonicalSolutionSet frobenius_solutions(const PicardFuchsOperator& op, int order) {
  if (order < 1) throw Error(ErrorCode::ValidationError, "Frobenius order must be >= 1");
  const auto slices = op.theta_slices();
  // Q_m(a + rho) as a series in rho, via binomial expansion of each power.
  auto shifted = [](const RationalPolynomial& q, long a) {
    TruncatedSeries<Rational> out(3, Rational(0));
    for (size_t i = 0; i < q.size(); ++i) {
      if (q[i] == 0) continue;
      for (size_t j = 0; j <= std::min<size_t>(i, 3); ++j) {
        Integer apow;
        mpz_pow_ui(apow.get_mpz_t(), Integer(a).get_mpz_t(), static_cast<unsigned long>(i - j));
        out[j] += q[i] * Rational(binomial(i, j) * apow);
      }
    }
    return out;
  };
  std::vector<TruncatedSeries<Rational>> c;
  c.reserve(static_cast<size_t>(order) + 1);
  TruncatedSeries<Rational> one(3, Rational(0));
  one[0] = 1;
  c.push_back(one);
  for (long n = 1; n <= order; ++n) {
    TruncatedSeries<Rational> rhs(3, Rational(0));
    for (long m = 1; m < static_cast<long>(slices.size()) && m <= n; ++m) {
      rhs -= shifted(slices[m], n - m) * c[n - m];
    }
    c.push_back(rhs / shifted(slices[0], n));
  }
  CanonicalSolutionSet out;
  out.order = order;
  const long fact[4] = {1, 1, 2, 6};
  for (size_t l = 0; l < 4; ++l) {
    out.f[l].reserve(c.size());
    for (const auto& cn : c) out.f[l].push_back(cn[l] * fact[l]);
  }
  return out;
}

/// Exact substitution of the Frobenius ansatz back into the operator: the
/// largest |coefficient| of the residual through the truncation order (0 when
/// the recurrence was solved correctly).
inline Rational check_recurrence(const PicardFuchsOperator& op, const CanonicalSolutionSet& sols) {
  const auto slices = op.theta_slices();
  const long inv_fact_den[4] = {1, 1, 2, 6};
  std::vector<TruncatedSeries<Rational>> c;
  for (int n = 0; n <= sols.order; ++n) {
    TruncatedSeries<Rational> s(3, Rational(0));
    for (size_t l = 0; l < 4; ++l) s[l] = sols.f[l][n] / inv_fact_den[l];
    c.push_back(s);
  }
  auto shifted = [](const RationalPolynomial& q, long a) {
    TruncatedSeries<Rational> out(3, Rational(0));
    for (size_t i = 0; i < q.size(); ++i) {
      for (size_t j = 0; j <= std::min<size_t>(i, 3); ++j) {
        Integer apow;
        mpz_pow_ui(apow.get_mpz_t(), Integer(a).get_mpz_t(), static_cast<unsigned long>(i - j));
        out[j] += q[i] * Rational(binomial(i, j) * apow);
      }
    }
    return out;
  };
  Rational worst = 0;
  for (long n = 0; n <= sols.order; ++n) {
    TruncatedSeries<Rational> total(3, Rational(0));
    for (long m = 0; m < static_cast<long>(slices.size()) && m <= n; ++m) {
      total += shifted(slices[m], n - m) * c[n - m];
    }
    for (size_t l = 0; l < 4; ++l) worst = std::max<Rational>(worst, abs(total[l]));
  }
  return worst;
}

/// Truncation order at which the Frobenius tail at |phi| drops below
/// 10^-(working + guard) digits, from the geometric bound (|phi|/radius)^n n^4.
inline int frobenius_order_for(const PicardFuchsOperator& op, const BigReal& abs_phi, const PrecisionContext& ctx) {
  const double ratio = (abs_phi / op.convergence_radius(ctx)).to_double();
  if (!(ratio < 1.0)) throw Error(ErrorCode::OutsideDisc, "point lies outside the Frobenius disc");
  if (ratio <= 0.0) return 1;
  const double rate = -std::log10(ratio);
  double n = (ctx.total_digits() + 10) / rate;
  for (int it = 0; it < 5; ++it) n = (ctx.total_digits() + 10 + 4 * std::log10(n + 10)) / rate;
  return static_cast<int>(std::ceil(n)) + 10;
}

/// 4x4 period jet at a point: W[k][j] = d^j varpi_k / dphi^j.
struct PeriodJet {
  BigComplex point;
  std::array<std::array<BigComplex, 4>, 4> W;

  [[nodiscard]] std::array<BigComplex, 4> column(size_t j) const {
    return {W[0][j], W[1][j], W[2][j], W[3][j]};
  }
};

/// Principal logarithm with log(-1) = +pi i: arg in (-pi, pi], negative reals land on +pi.
inline BigComplex branch_log(const BigComplex& z) {
  BigComplex w = z;
  if (w.imag().is_zero()) w.imag() = BigReal(w.precision());  // force +0 so atan2 gives +pi
  return log(w);
}

/// Evaluates the four canonical periods and their first three phi-derivatives
/// from the Frobenius data. Throws OutsideDisc if the truncation cannot meet
/// the working precision at |phi|.
inline PeriodJet evaluate_canonical(const PicardFuchsOperator& op, const CanonicalSolutionSet& sols,
                                    const BigComplex& phi, const PrecisionContext& ctx) {
  if (phi.is_zero()) throw Error(ErrorCode::SingularPoint, "phi = 0 is the MUM point (log singularity)");
  const BigReal r = abs(phi);
  if (!(r < op.convergence_radius(ctx))) throw Error(ErrorCode::OutsideDisc, "point lies outside the Frobenius disc");
  if (frobenius_order_for(op, r, ctx) > sols.order) {
    throw Error(ErrorCode::OutsideDisc, "truncation order " + std::to_string(sols.order) +
                                            " too small for |phi| at this precision; need " +
                                            std::to_string(frobenius_order_for(op, r, ctx)));
  }
  const mpfr_prec_t bits = ctx.bits();
  BigComplex z = phi;
  mpfr_prec_round(z.real().get(), bits, MPFR_RNDN);
  mpfr_prec_round(z.imag().get(), bits, MPFR_RNDN);

  // fd[l][d] = f_l^{(d)}(phi).
  std::array<std::array<BigComplex, 4>, 4> fd;
  for (size_t l = 0; l < 4; ++l) {
    for (size_t d = 0; d < 4; ++d) {
      BigComplex acc(ctx.zero());
      for (size_t n = sols.f[l].size(); n-- > d;) {
        if (sols.f[l][n] == 0) {
          acc *= z;
          continue;
        }
        long ff = 1;
        for (size_t t = 0; t < d; ++t) ff *= static_cast<long>(n - t);
        BigReal coeff = ctx.real(sols.f[l][n]) * ff;
        acc = acc * z + coeff;
      }
      fd[l][d] = std::move(acc);
    }
  }
  const BigComplex L = branch_log(z);
  std::array<BigComplex, 4> Lpow;
  Lpow[0] = BigComplex(ctx.real(1));
  for (size_t p = 1; p < 4; ++p) Lpow[p] = Lpow[p - 1] * L;
  std::array<BigComplex, 4> inv_phi_pow;
  inv_phi_pow[0] = BigComplex(ctx.real(1));
  const BigComplex inv_phi = BigComplex(ctx.real(1)) / z;
  for (size_t b = 1; b < 4; ++b) inv_phi_pow[b] = inv_phi_pow[b - 1] * inv_phi;

  // (L^p)^{(b)} = phi^{-b} sum_q coef[p][b][q] L^q, from
  // d/dphi [phi^{-b} L^q] = phi^{-b-1} (q L^{q-1} - b L^q).
  long coef[4][4][4] = {};
  for (int p = 0; p < 4; ++p) {
    coef[p][0][p] = 1;
    for (int b = 0; b < 3; ++b) {
      for (int q = 0; q < 4; ++q) {
        if (coef[p][b][q] == 0) continue;
        if (q > 0) coef[p][b + 1][q - 1] += q * coef[p][b][q];
        coef[p][b + 1][q] -= b * coef[p][b][q];
      }
    }
  }
  std::array<std::array<BigComplex, 4>, 4> log_deriv;  // [p][b]
  for (int p = 0; p < 4; ++p) {
    for (int b = 0; b < 4; ++b) {
      BigComplex acc(ctx.zero());
      for (int q = 0; q < 4; ++q) {
        if (coef[p][b][q] != 0) acc += Lpow[q] * coef[p][b][q];
      }
      log_deriv[p][b] = acc * inv_phi_pow[b];
    }
  }

  const BigComplex tpi = two_pi_i(ctx);
  PeriodJet jet;
  jet.point = z;
  BigComplex scale(ctx.real(1));
  for (int k = 0; k < 4; ++k) {
    for (int j = 0; j < 4; ++j) {
      BigComplex acc(ctx.zero());
      for (int l = 0; l <= k; ++l) {
        for (int b = 0; b <= j; ++b) {
          Integer w = binomial(k, l) * binomial(j, b);
          acc += fd[l][j - b] * log_deriv[k - l][b] * Rational(w);
        }
      }
      jet.W[k][j] = acc / scale;
    }
    scale *= tpi;
  }
  return jet;
}

/// Ordered waypoints for continuation; the first must equal the start jet's point.
struct ContinuationPath {
  std::vector<BigComplex> waypoints;
};

namespace detail {

// Euclidean distance from point s to the segment [a, b].
inline BigReal distance_to_segment(const BigComplex& s, const BigComplex& a, const BigComplex& b) {
  BigComplex ab = b - a;
  BigReal len2 = norm(ab);
  if (len2.is_zero()) return abs(s - a);
  BigComplex as = s - a;
  BigReal t = (as.real() * ab.real() + as.imag() * ab.imag()) / len2;
  if (t < 0) t = BigReal(t.precision());
  if (t > 1) t = BigReal(1, t.precision());
  return abs(as - ab * t);
}

}  // namespace detail

/// One Taylor step of the jet from `center` to `target` along the ODE.
/// `order` is the number of Taylor terms used.
inline PeriodJet taylor_step(const std::array<RationalPolynomial, 5>& dform, const PeriodJet& at,
                             const BigComplex& target, int order, const PrecisionContext& ctx) {
  const BigComplex& c = at.point;
  const bool real_center = c.imag().is_zero();
  // p[k][m] = P_k^{(m)}(c) / m!
  std::array<std::vector<BigComplex>, 5> p;
  for (size_t k = 0; k < 5; ++k) p[k] = taylor_shift(dform[k], c, BigComplex(ctx.zero()));
  const BigComplex lead = p[4].at(0);
  if (lead.is_zero()) throw Error(ErrorCode::SingularPoint, "Taylor center is a singular point");
  // Pre-divide by the leading coefficient so the recurrence reads
  // ff(n+4,4) y_{n+4} = -sum q[k][m] ff(n-m+k,k) y_{n-m+k}.
  std::array<std::vector<BigComplex>, 5> q;
  for (size_t k = 0; k < 5; ++k) {
    for (size_t m = 0; m < p[k].size(); ++m) q[k].push_back(-(p[k][m] / lead));
  }
  const size_t N = static_cast<size_t>(order);
  const BigComplex delta = target - c;
  const bool real_delta = delta.imag().is_zero();
  PeriodJet out;
  out.point = target;
  for (size_t row = 0; row < 4; ++row) {
    std::vector<BigComplex> y;
    y.reserve(N + 4);
    const long inv_fact[4] = {1, 1, 2, 6};
    for (size_t j = 0; j < 4; ++j) y.push_back(at.W[row][j] / inv_fact[j]);
    for (size_t n = 0; y.size() < N + 1; ++n) {
      BigComplex acc(ctx.zero());
      for (size_t k = 0; k < 5; ++k) {
        for (size_t m = (k == 4 ? 1 : 0); m < q[k].size() && m <= n; ++m) {
          const size_t idx = n - m + k;
          long ff = 1;
          for (size_t t = 0; t < k; ++t) ff *= static_cast<long>(idx - t);
          if (ff == 0) continue;
          if (real_center) {
            BigComplex term = y[idx] * q[k][m].real();
            acc += term * ff;
          } else {
            acc += (y[idx] * q[k][m]) * ff;
          }
        }
      }
      long ff4 = static_cast<long>((n + 4) * (n + 3) * (n + 2) * (n + 1));
      y.push_back(acc / ff4);
    }
    for (size_t j = 0; j < 4; ++j) {
      // j! sum_n C(n,j) y_n delta^{n-j}, by Horner in delta.
      BigComplex acc(ctx.zero());
      for (size_t n = y.size(); n-- > j;) {
        if (real_delta) {
          acc = acc * delta.real();
        } else {
          acc = acc * delta;
        }
        acc += y[n] * binomial(n, j);
      }
      out.W[row][j] = acc * static_cast<long>(inv_fact[j]);
    }
  }
  return out;
}

/// Continues a jet along the path by Taylor steps of at most 0.4 times the
/// distance to the nearest singular point.
inline PeriodJet continue_jet(const PicardFuchsOperator& op, const PeriodJet& start, const ContinuationPath& path,
                              const PrecisionContext& ctx) {
  if (path.waypoints.empty()) throw Error(ErrorCode::ValidationError, "empty continuation path");
  if (abs(path.waypoints.front() - start.point) > ctx.pow10(-ctx.working_digits())) {
    throw Error(ErrorCode::ValidationError, "path must start at the jet's point");
  }
  const auto singular = op.singular_points(ctx);
  const auto dform = op.derivative_form();
  const BigReal too_close = ctx.pow10(-ctx.working_digits() / 4);
  const BigReal min_step = ctx.pow10(-ctx.working_digits());
  const BigReal factor = ctx.real(Rational(2, 5));
  const double target_digits = ctx.total_digits() + 10;

  for (size_t i = 0; i + 1 < path.waypoints.size(); ++i) {
    for (const auto& s : singular) {
      if (detail::distance_to_segment(s, path.waypoints[i], path.waypoints[i + 1]) < too_close) {
        throw Error(ErrorCode::PathTooCloseToSingularity, "path segment " + std::to_string(i) +
                                                              " passes within 10^-" +
                                                              std::to_string(ctx.working_digits() / 4) +
                                                              " of a singular point");
      }
    }
  }
  PeriodJet jet = start;
  for (size_t i = 1; i < path.waypoints.size(); ++i) {
    const BigComplex& goal = path.waypoints[i];
    while (true) {
      BigComplex diff = goal - jet.point;
      BigReal remaining = abs(diff);
      if (remaining.is_zero()) break;
      std::optional<BigReal> radius;
      for (const auto& s : singular) {
        BigReal d = abs(s - jet.point);
        if (!radius || d < *radius) radius = d;
      }
      BigReal h = *radius * factor;
      bool last = !(h < remaining);
      if (last) h = remaining;
      if (h < min_step) throw Error(ErrorCode::StepUnderflow, "required step below 10^-working_digits");
      BigComplex next = last ? goal : jet.point + diff * (h / remaining);
      const double rate = -(h / *radius).log10_abs();
      double terms = target_digits / rate;
      for (int it = 0; it < 4; ++it) terms = (target_digits + 4 * std::log10(terms + 10)) / rate;
      jet = taylor_step(dform, jet, next, static_cast<int>(std::ceil(terms)) + 10, ctx);
      if (last) break;
    }
  }
  jet.point = path.waypoints.back();
  return jet;
}

}  // namespace rank2

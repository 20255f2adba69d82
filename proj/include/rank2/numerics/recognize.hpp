#pragma once

// Number recognition: simplest rational in an interval, LLL reduction and
// integer relations among real numbers.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "rank2/error.hpp"
#include "rank2/numerics/big.hpp"

namespace rank2 {

namespace detail {

inline Integer floor_q(const Rational& q) {
  Integer out;
  mpz_fdiv_q(out.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return out;
}

inline Integer ceil_q(const Rational& q) {
  Integer out;
  mpz_cdiv_q(out.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return out;
}

// Rational with the smallest numerator and denominator in [lo, hi], 0 < lo <= hi.
// Walks the common prefix of the continued fractions of lo and hi.
inline Rational simplest_positive(Rational lo, Rational hi, const Integer& max_den, bool& too_deep) {
  // Convergent recurrence h_k/k_k carried alongside the interval.
  Integer h_prev = 1, h = 0, k_prev = 0, k = 1;
  // x = a0 + 1/(a1 + 1/(...)); the final term is chosen as ceil(lo).
  while (true) {
    Integer c = ceil_q(lo);
    Rational cq(c);
    if (cq <= hi) {
      Integer h_new = c * h_prev + h;
      Integer k_new = c * k_prev + k;
      if (k_new > max_den) too_deep = true;
      return Rational(h_new, k_new);
    }
    Integer a = floor_q(lo);
    Integer h_new = a * h_prev + h;
    Integer k_new = a * k_prev + k;
    h = h_prev;
    k = k_prev;
    h_prev = h_new;
    k_prev = k_new;
    if (k_prev > max_den) {
      too_deep = true;
      return Rational(h_prev, k_prev);
    }
    Rational new_lo = 1 / (hi - Rational(a));
    Rational new_hi = 1 / (lo - Rational(a));
    lo = std::move(new_lo);
    hi = std::move(new_hi);
  }
}

}  // namespace detail

/// p/q with q <= max_denominator and |x - p/q| <= tol, choosing the smallest
/// denominator (and, among integers, the one nearest x). nullopt if none exists.
inline std::optional<Rational> recognize_rational(const BigReal& x, const Integer& max_denominator,
                                                  const BigReal& tol) {
  if (!x.is_finite() || !tol.is_finite() || tol.sign() <= 0) return std::nullopt;
  const Rational qx = x.to_rational();
  const Rational qt = tol.to_rational();
  const Rational lo = qx - qt;
  const Rational hi = qx + qt;
  Integer nearest = x.round_to_integer();
  if (abs(Rational(nearest) - qx) <= qt) return Rational(nearest);
  bool too_deep = false;
  Rational found;
  if (lo > 0) {
    found = detail::simplest_positive(lo, hi, max_denominator, too_deep);
  } else {
    found = -detail::simplest_positive(-hi, -lo, max_denominator, too_deep);
  }
  if (too_deep || found.get_den() > max_denominator) return std::nullopt;
  found.canonicalize();
  return found;
}

/// LLL reduction (delta = 0.99) of the rows of `basis`, in place. Rows must be
/// linearly independent. Gram-Schmidt data is recomputed from scratch after each
/// change, which is cheap for the handful of rows used here.
inline void lll_reduce(std::vector<std::vector<BigReal>>& basis) {
  const size_t n = basis.size();
  if (n < 2) return;
  const mpfr_prec_t prec = basis[0][0].precision();
  auto dot = [](const std::vector<BigReal>& a, const std::vector<BigReal>& b) {
    BigReal acc = a[0] * b[0];
    for (size_t i = 1; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
  };
  std::vector<std::vector<BigReal>> star(n);
  std::vector<std::vector<BigReal>> mu(n, std::vector<BigReal>(n, BigReal(prec)));
  std::vector<BigReal> norms(n, BigReal(prec));
  auto gram_schmidt = [&]() {
    for (size_t i = 0; i < n; ++i) {
      star[i] = basis[i];
      for (size_t j = 0; j < i; ++j) {
        mu[i][j] = dot(basis[i], star[j]) / norms[j];
        for (size_t c = 0; c < star[i].size(); ++c) star[i][c] -= mu[i][j] * star[j][c];
      }
      norms[i] = dot(star[i], star[i]);
    }
  };
  gram_schmidt();
  BigReal delta = BigReal(99, prec) / 100;
  BigReal half = BigReal(1, prec) / 2;
  size_t k = 1;
  size_t guard = 0;
  while (k < n) {
    if (++guard > 100000) throw Error(ErrorCode::RecognitionFailure, "lattice reduction did not terminate");
    for (size_t j = k; j-- > 0;) {
      if (abs(mu[k][j]) > half) {
        BigReal r = round(mu[k][j]);
        for (size_t c = 0; c < basis[k].size(); ++c) basis[k][c] -= r * basis[j][c];
        gram_schmidt();
      }
    }
    BigReal lhs = norms[k];
    BigReal rhs = (delta - mu[k][k - 1] * mu[k][k - 1]) * norms[k - 1];
    if (lhs >= rhs) {
      ++k;
    } else {
      std::swap(basis[k], basis[k - 1]);
      gram_schmidt();
      k = std::max<size_t>(k - 1, 1);
    }
  }
}

/// Integer vectors m (in LLL order) from reducing the lattice with rows
/// [e_i | scale * forms[0][i] | scale * forms[1][i] | ...]. Short rows have
/// small height and small values of every linear form.
inline std::vector<std::vector<Integer>> relation_lattice(const std::vector<std::vector<BigReal>>& forms,
                                                         const BigReal& scale) {
  const size_t n = forms.at(0).size();
  const mpfr_prec_t prec = scale.precision();
  std::vector<std::vector<BigReal>> basis(n);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) basis[i].emplace_back(i == j ? 1L : 0L, prec);
    for (const auto& form : forms) basis[i].push_back(form[i] * scale);
  }
  lll_reduce(basis);
  std::vector<std::vector<Integer>> out;
  for (const auto& row : basis) {
    std::vector<Integer> m;
    for (size_t j = 0; j < n; ++j) m.push_back(row[j].round_to_integer());
    out.push_back(std::move(m));
  }
  return out;
}

inline Integer height(const std::vector<Integer>& m) {
  Integer h = 0;
  for (const auto& v : m) h = std::max<Integer>(h, abs(v));
  return h;
}

/// Flips the sign so the first nonzero entry is positive.
inline void normalize_sign(std::vector<Integer>& m) {
  for (const auto& v : m) {
    if (v != 0) {
      if (v < 0) {
        for (auto& w : m) w = -w;
      }
      return;
    }
  }
}

/// Nonzero integer m with |sum m_i x_i| <= tol and max |m_i| <= height_bound,
/// found by LLL on [e_i | x_i / tol]. nullopt if the reduced basis has no such row.
inline std::optional<std::vector<Integer>> integer_relation(const std::vector<BigReal>& xs,
                                                            const Integer& height_bound, const BigReal& tol) {
  if (xs.empty()) throw Error(ErrorCode::ValidationError, "integer_relation needs at least one number");
  for (const auto& x : xs) {
    if (!x.is_finite()) throw Error(ErrorCode::ValidationError, "integer_relation input not finite");
  }
  mpfr_prec_t prec = xs[0].precision();
  for (const auto& x : xs) prec = std::max(prec, x.precision());
  BigReal scale = BigReal(1, prec) / tol;
  // Keep the scaled entries well inside the working precision.
  BigReal cap = pow(BigReal(2, prec), static_cast<long>(prec * 3 / 5));
  if (scale > cap) scale = cap;
  std::vector<std::vector<Integer>> rows;
  if (xs.size() == 1) {
    rows.push_back({Integer(1)});
  } else {
    rows = relation_lattice({xs}, scale);
  }
  std::optional<std::vector<Integer>> best;
  Integer best_height;
  for (auto& m : rows) {
    Integer h = height(m);
    if (h == 0 || h > height_bound) continue;
    BigReal acc(prec);
    for (size_t i = 0; i < xs.size(); ++i) acc += xs[i] * BigReal(m[i], prec);
    if (abs(acc) > tol) continue;
    if (!best || h < best_height) {
      best = m;
      best_height = h;
    }
  }
  if (best) normalize_sign(*best);
  return best;
}

}  // namespace rank2

#pragma once

// Small dense matrices (at most a handful of rows) over Rational, BigReal or
// BigComplex. Rows are std::vector so that the same code serves all three.

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "rank2/error.hpp"
#include "rank2/numerics/big.hpp"

namespace rank2 {

template <typename T>
using Vec = std::vector<T>;
template <typename T>
using Matrix = std::vector<std::vector<T>>;

namespace detail {
inline Rational pivot_size(const Rational& x) { return abs(x); }
inline BigReal pivot_size(const BigReal& x) { return abs(x); }
inline BigReal pivot_size(const BigComplex& x) { return abs(x); }
inline bool is_zero(const Rational& x) { return x == 0; }
inline bool is_zero(const BigReal& x) { return x.is_zero(); }
inline bool is_zero(const BigComplex& x) { return x.is_zero(); }
inline Rational one_like(const Rational&) { return Rational(1); }
inline BigReal one_like(const BigReal& x) { return BigReal(1, x.precision()); }
inline BigComplex one_like(const BigComplex& x) { return BigComplex(BigReal(1, x.precision())); }
}  // namespace detail

template <typename T, typename U>
Vec<T> mat_vec(const Matrix<U>& m, const Vec<T>& v) {
  Vec<T> out;
  out.reserve(m.size());
  for (const auto& row : m) {
    T acc = v[0] * row[0];
    for (size_t j = 1; j < row.size(); ++j) acc += v[j] * row[j];
    out.push_back(std::move(acc));
  }
  return out;
}

template <typename T>
Matrix<T> mat_mul(const Matrix<T>& a, const Matrix<T>& b) {
  Matrix<T> out(a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    for (size_t j = 0; j < b[0].size(); ++j) {
      T acc = a[i][0] * b[0][j];
      for (size_t k = 1; k < b.size(); ++k) acc += a[i][k] * b[k][j];
      out[i].push_back(std::move(acc));
    }
  }
  return out;
}

/// Solves a x = b by Gaussian elimination with partial pivoting. Returns
/// nullopt when a pivot is exactly zero or its size falls below `singular_below`.
template <typename T>
std::optional<Vec<T>> solve(Matrix<T> a, Vec<T> b,
                            std::optional<decltype(detail::pivot_size(std::declval<T>()))> singular_below =
                                std::nullopt) {
  const size_t n = a.size();
  for (size_t col = 0; col < n; ++col) {
    size_t best = col;
    auto best_size = detail::pivot_size(a[col][col]);
    for (size_t r = col + 1; r < n; ++r) {
      auto s = detail::pivot_size(a[r][col]);
      if (s > best_size) {
        best = r;
        best_size = std::move(s);
      }
    }
    if (detail::is_zero(a[best][col])) return std::nullopt;
    if (singular_below && best_size < *singular_below) return std::nullopt;
    std::swap(a[col], a[best]);
    std::swap(b[col], b[best]);
    for (size_t r = col + 1; r < n; ++r) {
      if (detail::is_zero(a[r][col])) continue;
      T f = a[r][col] / a[col][col];
      for (size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  Vec<T> x(b);
  for (size_t i = n; i-- > 0;) {
    T acc = b[i];
    for (size_t c = i + 1; c < n; ++c) acc -= a[i][c] * x[c];
    x[i] = acc / a[i][i];
  }
  return x;
}

/// Determinant by elimination; exact for Rational.
template <typename T>
T determinant(Matrix<T> a) {
  const size_t n = a.size();
  T det = detail::one_like(a[0][0]);
  for (size_t col = 0; col < n; ++col) {
    size_t best = col;
    auto best_size = detail::pivot_size(a[col][col]);
    for (size_t r = col + 1; r < n; ++r) {
      auto s = detail::pivot_size(a[r][col]);
      if (s > best_size) {
        best = r;
        best_size = std::move(s);
      }
    }
    if (detail::is_zero(a[best][col])) {
      det -= det;
      return det;  // exact zero of the right type
    }
    if (best != col) {
      std::swap(a[col], a[best]);
      det = -det;
    }
    det *= a[col][col];
    for (size_t r = col + 1; r < n; ++r) {
      T f = a[r][col] / a[col][col];
      for (size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
    }
  }
  return det;
}

/// Rank of a rational matrix.
inline int rank(Matrix<Rational> a) {
  const size_t rows = a.size();
  const size_t cols = rows ? a[0].size() : 0;
  size_t r = 0;
  for (size_t c = 0; c < cols && r < rows; ++c) {
    size_t p = r;
    while (p < rows && a[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(a[r], a[p]);
    for (size_t i = r + 1; i < rows; ++i) {
      Rational f = a[i][c] / a[r][c];
      for (size_t j = c; j < cols; ++j) a[i][j] -= f * a[r][j];
    }
    ++r;
  }
  return static_cast<int>(r);
}

}  // namespace rank2

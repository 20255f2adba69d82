#pragma once

// Univariate polynomials stored as ascending coefficient lists.

#include <cstddef>
#include <utility>
#include <vector>

#include "rank2/numerics/big.hpp"
#include "rank2/numerics/rational.hpp"

namespace rank2 {

using RationalPolynomial = std::vector<Rational>;

/// Drops trailing zero coefficients; the zero polynomial becomes empty.
inline RationalPolynomial trim(RationalPolynomial p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
  return p;
}

inline int degree(const RationalPolynomial& p) {
  auto t = trim(p);
  return static_cast<int>(t.size()) - 1;
}

inline Rational evaluate(const RationalPolynomial& p, const Rational& x) {
  Rational acc = 0;
  for (size_t i = p.size(); i-- > 0;) acc = acc * x + p[i];
  return acc;
}

inline RationalPolynomial multiply(const RationalPolynomial& a, const RationalPolynomial& b) {
  if (a.empty() || b.empty()) return {};
  RationalPolynomial out(a.size() + b.size() - 1, Rational(0));
  for (size_t i = 0; i < a.size(); ++i) {
    for (size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

/// p(x) / (x - r) when r is a root; the remainder is discarded.
inline RationalPolynomial deflate(const RationalPolynomial& p, const Rational& r) {
  auto t = trim(p);
  if (t.size() < 2) return {};
  RationalPolynomial q(t.size() - 1);
  Rational carry = 0;
  for (size_t i = t.size(); i-- > 1;) {
    carry = carry * r + t[i];
    q[i - 1] = carry;
  }
  return q;
}

/// Taylor coefficients of p around c: out[m] = p^(m)(c) / m!.
template <typename T>
std::vector<T> taylor_shift(const RationalPolynomial& p, const T& c, const T& zero) {
  std::vector<T> out(p.size(), zero);
  // Repeated synthetic division by (x - c).
  std::vector<T> work;
  work.reserve(p.size());
  for (const auto& coeff : p) {
    T v = zero;
    v += coeff;
    work.push_back(std::move(v));
  }
  for (size_t m = 0; m < p.size(); ++m) {
    for (size_t i = work.size() - 1; i > m; --i) {
      T t = work[i] * c;
      work[i - 1] += t;
    }
    out[m] = work[m];
  }
  return out;
}

}  // namespace rank2

#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "rank2/error.hpp"

namespace rank2 {

/// Power series c_0 + c_1 x + ... + c_order x^order, everything above dropped.
///
/// T is either Rational (exact mode) or a BigReal/BigComplex; converting
/// between the two is always an explicit call by the user of this class.
template <typename T>
class TruncatedSeries {
 public:
  TruncatedSeries() = default;
  TruncatedSeries(int order, const T& zero) : coeffs_(static_cast<size_t>(order) + 1, zero) {
    if (order < 0) throw Error(ErrorCode::ValidationError, "negative truncation order");
  }
  explicit TruncatedSeries(std::vector<T> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) throw Error(ErrorCode::ValidationError, "series needs at least one coefficient");
  }

  [[nodiscard]] int order() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  [[nodiscard]] const std::vector<T>& coefficients() const noexcept { return coeffs_; }
  [[nodiscard]] const T& operator[](size_t i) const { return coeffs_[i]; }
  T& operator[](size_t i) { return coeffs_[i]; }

  TruncatedSeries& operator+=(const TruncatedSeries& o) {
    check(o);
    for (size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
    return *this;
  }
  TruncatedSeries& operator-=(const TruncatedSeries& o) {
    check(o);
    for (size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
    return *this;
  }
  template <typename S>
  TruncatedSeries& scale(const S& s) {
    for (auto& c : coeffs_) c *= s;
    return *this;
  }

  friend TruncatedSeries operator+(TruncatedSeries a, const TruncatedSeries& b) { a += b; return a; }
  friend TruncatedSeries operator-(TruncatedSeries a, const TruncatedSeries& b) { a -= b; return a; }

  friend TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b) {
    a.check(b);
    TruncatedSeries out(a);
    const size_t n = a.coeffs_.size();
    for (size_t k = 0; k < n; ++k) {
      T acc = a.coeffs_[0] * b.coeffs_[k];
      for (size_t i = 1; i <= k; ++i) acc += a.coeffs_[i] * b.coeffs_[k - i];
      out.coeffs_[k] = std::move(acc);
    }
    return out;
  }

  /// a / b, requiring b[0] invertible.
  friend TruncatedSeries operator/(const TruncatedSeries& a, const TruncatedSeries& b) {
    a.check(b);
    TruncatedSeries out(a);
    const size_t n = a.coeffs_.size();
    for (size_t k = 0; k < n; ++k) {
      T acc = a.coeffs_[k];
      for (size_t i = 1; i <= k; ++i) acc -= b.coeffs_[i] * out.coeffs_[k - i];
      out.coeffs_[k] = acc / b.coeffs_[0];
    }
    return out;
  }

  friend bool operator==(const TruncatedSeries& a, const TruncatedSeries& b) { return a.coeffs_ == b.coeffs_; }

 private:
  void check(const TruncatedSeries& o) const {
    if (o.coeffs_.size() != coeffs_.size()) {
      throw Error(ErrorCode::ValidationError, "series truncation orders differ");
    }
  }

  std::vector<T> coeffs_;
};

}  // namespace rank2

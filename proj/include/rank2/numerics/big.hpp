#pragma once

// Arbitrary-precision real and complex numbers on top of MPFR.
//
// Every BigReal owns its precision. Binary operations produce a result at the
// larger of the two operand precisions, so a computation started from values
// built by one PrecisionContext stays at that precision throughout. All
// rounding is to nearest.

#include <gmpxx.h>
#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>

#include "rank2/error.hpp"

namespace rank2 {

using Rational = mpq_class;
using Integer = mpz_class;

class BigReal;

/// Working precision for one computation. Cheap to copy; holds no MPFR state.
class PrecisionContext {
 public:
  PrecisionContext() : PrecisionContext(200, 20) {}

  PrecisionContext(int working_digits, int guard_digits,
                   std::optional<int> verify_digits = std::nullopt)
      : working_digits_(working_digits),
        guard_digits_(guard_digits),
        verify_digits_(verify_digits.value_or(working_digits / 2)) {
    if (working_digits_ < 50) {
      throw Error(ErrorCode::InvalidPrecision, "working_digits must be >= 50");
    }
    if (guard_digits_ < 10) {
      throw Error(ErrorCode::InvalidPrecision, "guard_digits must be >= 10");
    }
    if (verify_digits_ <= 0 || verify_digits_ >= working_digits_) {
      throw Error(ErrorCode::InvalidPrecision,
                  "verify tolerance must lie in (10^-working_digits, 1)");
    }
  }

  [[nodiscard]] int working_digits() const noexcept { return working_digits_; }
  [[nodiscard]] int guard_digits() const noexcept { return guard_digits_; }
  [[nodiscard]] int total_digits() const noexcept { return working_digits_ + guard_digits_; }
  /// verify_tolerance() == 10^-verify_digits().
  [[nodiscard]] int verify_digits() const noexcept { return verify_digits_; }

  [[nodiscard]] mpfr_prec_t bits() const noexcept {
    return static_cast<mpfr_prec_t>(std::ceil(total_digits() * 3.321928094887362)) + 16;
  }

  /// Same context at a different working precision (guard kept).
  [[nodiscard]] PrecisionContext with_digits(int working_digits) const {
    return PrecisionContext(working_digits, guard_digits_);
  }

  [[nodiscard]] BigReal zero() const;
  [[nodiscard]] BigReal real(long value) const;
  [[nodiscard]] BigReal real(const Rational& value) const;
  [[nodiscard]] BigReal real(std::string_view decimal) const;
  /// 10^exponent.
  [[nodiscard]] BigReal pow10(long exponent) const;
  [[nodiscard]] BigReal verify_tolerance() const;

  friend bool operator==(const PrecisionContext&, const PrecisionContext&) = default;

 private:
  int working_digits_;
  int guard_digits_;
  int verify_digits_;
};

class BigReal {
 public:
  BigReal() { mpfr_init2(v_, 64); mpfr_set_zero(v_, 1); }
  explicit BigReal(mpfr_prec_t bits) { mpfr_init2(v_, bits); mpfr_set_zero(v_, 1); }
  BigReal(long value, mpfr_prec_t bits) { mpfr_init2(v_, bits); mpfr_set_si(v_, value, MPFR_RNDN); }
  BigReal(const Integer& value, mpfr_prec_t bits) {
    mpfr_init2(v_, bits);
    mpfr_set_z(v_, value.get_mpz_t(), MPFR_RNDN);
  }
  BigReal(const Rational& value, mpfr_prec_t bits) {
    mpfr_init2(v_, bits);
    mpfr_set_q(v_, value.get_mpq_t(), MPFR_RNDN);
  }

  BigReal(const BigReal& other) {
    mpfr_init2(v_, mpfr_get_prec(other.v_));
    mpfr_set(v_, other.v_, MPFR_RNDN);
  }
  BigReal(BigReal&& other) noexcept {
    mpfr_init2(v_, MPFR_PREC_MIN);
    mpfr_swap(v_, other.v_);
  }
  BigReal& operator=(const BigReal& other) {
    if (this != &other) {
      mpfr_set_prec(v_, mpfr_get_prec(other.v_));
      mpfr_set(v_, other.v_, MPFR_RNDN);
    }
    return *this;
  }
  BigReal& operator=(BigReal&& other) noexcept {
    mpfr_swap(v_, other.v_);
    return *this;
  }
  ~BigReal() { mpfr_clear(v_); }

  /// Parses a decimal (or "0x"-free hexadecimal with base 16) literal; throws ParseError.
  static BigReal parse(std::string_view text, mpfr_prec_t bits, int base = 10) {
    BigReal out(bits);
    std::string s(text);
    if (s.empty() || mpfr_set_str(out.v_, s.c_str(), base, MPFR_RNDN) != 0) {
      throw Error(ErrorCode::ParseError, "not a number: '" + s + "'");
    }
    return out;
  }

  [[nodiscard]] mpfr_prec_t precision() const noexcept { return mpfr_get_prec(v_); }
  [[nodiscard]] mpfr_srcptr get() const noexcept { return v_; }
  [[nodiscard]] mpfr_ptr get() noexcept { return v_; }

  [[nodiscard]] int sign() const noexcept { return mpfr_sgn(v_); }
  [[nodiscard]] bool is_zero() const noexcept { return mpfr_zero_p(v_) != 0; }
  [[nodiscard]] bool is_finite() const noexcept { return mpfr_number_p(v_) != 0; }
  [[nodiscard]] double to_double() const noexcept { return mpfr_get_d(v_, MPFR_RNDN); }

  /// Exact value of the binary floating-point number.
  [[nodiscard]] Rational to_rational() const {
    Rational q;
    mpfr_get_q(q.get_mpq_t(), v_);
    return q;
  }
  [[nodiscard]] Integer round_to_integer() const {
    Integer z;
    mpfr_get_z(z.get_mpz_t(), v_, MPFR_RNDN);
    return z;
  }
  [[nodiscard]] Integer floor_to_integer() const {
    Integer z;
    mpfr_get_z(z.get_mpz_t(), v_, MPFR_RNDD);
    return z;
  }

  /// Approximate base-10 exponent of |x|; very negative for zero.
  [[nodiscard]] double log10_abs() const {
    if (is_zero()) return -1e9;
    long exp = 0;
    double mant = mpfr_get_d_2exp(&exp, v_, MPFR_RNDN);
    return std::log10(std::fabs(mant)) + static_cast<double>(exp) * 0.30102999566398120;
  }

  /// Scientific notation with `digits` significant digits, e.g. "-3.92e2".
  [[nodiscard]] std::string to_string(int digits) const {
    if (digits < 1) digits = 1;
    char* buf = nullptr;
    mpfr_asprintf(&buf, "%.*Re", digits - 1, v_);
    std::string out(buf);
    mpfr_free_str(buf);
    return out;
  }

  /// Exact base-16 serialization (round-trips bit for bit through parse(.., 16)).
  [[nodiscard]] std::string to_exact_string() const {
    if (is_zero()) return "0";
    mpfr_exp_t exp = 0;
    char* digits = mpfr_get_str(nullptr, &exp, 16, 0, v_, MPFR_RNDN);
    std::string mant(digits);
    mpfr_free_str(digits);
    bool negative = !mant.empty() && mant[0] == '-';
    if (negative) mant.erase(0, 1);
    // value = 0.mant * 16^exp; MPFR's base-16 exponent marker is '@'.
    return std::string(negative ? "-" : "") + "0." + mant + "@" + std::to_string(exp);
  }

  BigReal& operator+=(const BigReal& o) { widen(o); mpfr_add(v_, v_, o.v_, MPFR_RNDN); return *this; }
  BigReal& operator-=(const BigReal& o) { widen(o); mpfr_sub(v_, v_, o.v_, MPFR_RNDN); return *this; }
  BigReal& operator*=(const BigReal& o) { widen(o); mpfr_mul(v_, v_, o.v_, MPFR_RNDN); return *this; }
  BigReal& operator/=(const BigReal& o) { widen(o); mpfr_div(v_, v_, o.v_, MPFR_RNDN); return *this; }
  BigReal& operator+=(long o) { mpfr_add_si(v_, v_, o, MPFR_RNDN); return *this; }
  BigReal& operator-=(long o) { mpfr_sub_si(v_, v_, o, MPFR_RNDN); return *this; }
  BigReal& operator*=(long o) { mpfr_mul_si(v_, v_, o, MPFR_RNDN); return *this; }
  BigReal& operator/=(long o) { mpfr_div_si(v_, v_, o, MPFR_RNDN); return *this; }
  BigReal& operator*=(const Integer& o) { mpfr_mul_z(v_, v_, o.get_mpz_t(), MPFR_RNDN); return *this; }
  BigReal& operator*=(const Rational& o) { mpfr_mul_q(v_, v_, o.get_mpq_t(), MPFR_RNDN); return *this; }
  BigReal& operator+=(const Rational& o) { mpfr_add_q(v_, v_, o.get_mpq_t(), MPFR_RNDN); return *this; }

  BigReal operator-() const {
    BigReal out(*this);
    mpfr_neg(out.v_, out.v_, MPFR_RNDN);
    return out;
  }

  friend BigReal operator+(BigReal a, const BigReal& b) { a += b; return a; }
  friend BigReal operator-(BigReal a, const BigReal& b) { a -= b; return a; }
  friend BigReal operator*(BigReal a, const BigReal& b) { a *= b; return a; }
  friend BigReal operator/(BigReal a, const BigReal& b) { a /= b; return a; }
  friend BigReal operator+(BigReal a, long b) { a += b; return a; }
  friend BigReal operator-(BigReal a, long b) { a -= b; return a; }
  friend BigReal operator*(BigReal a, long b) { a *= b; return a; }
  friend BigReal operator/(BigReal a, long b) { a /= b; return a; }
  friend BigReal operator*(long b, BigReal a) { a *= b; return a; }
  friend BigReal operator*(BigReal a, const Rational& b) { a *= b; return a; }
  friend BigReal operator*(const Rational& b, BigReal a) { a *= b; return a; }
  friend BigReal operator-(long a, const BigReal& b) {
    BigReal out(b.precision());
    mpfr_si_sub(out.v_, a, b.v_, MPFR_RNDN);
    return out;
  }
  friend BigReal operator/(long a, const BigReal& b) {
    BigReal out(b.precision());
    mpfr_si_div(out.v_, a, b.v_, MPFR_RNDN);
    return out;
  }

  friend bool operator==(const BigReal& a, const BigReal& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }
  friend std::partial_ordering operator<=>(const BigReal& a, const BigReal& b) {
    if (mpfr_unordered_p(a.v_, b.v_)) return std::partial_ordering::unordered;
    int c = mpfr_cmp(a.v_, b.v_);
    return c < 0 ? std::partial_ordering::less
                 : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
  }
  friend bool operator==(const BigReal& a, long b) { return mpfr_cmp_si(a.v_, b) == 0; }
  friend std::partial_ordering operator<=>(const BigReal& a, long b) {
    int c = mpfr_cmp_si(a.v_, b);
    return c < 0 ? std::partial_ordering::less
                 : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
  }

  friend std::ostream& operator<<(std::ostream& os, const BigReal& x) { return os << x.to_string(30); }

 private:
  void widen(const BigReal& o) {
    if (mpfr_get_prec(o.v_) > mpfr_get_prec(v_)) mpfr_prec_round(v_, mpfr_get_prec(o.v_), MPFR_RNDN);
  }

  mpfr_t v_;
};

namespace detail {
template <typename F>
BigReal unary(const BigReal& x, F&& f) {
  BigReal out(x.precision());
  f(out.get(), x.get(), MPFR_RNDN);
  return out;
}
}  // namespace detail

inline BigReal abs(const BigReal& x) { return detail::unary(x, mpfr_abs); }
inline BigReal sqrt(const BigReal& x) { return detail::unary(x, mpfr_sqrt); }
inline BigReal exp(const BigReal& x) { return detail::unary(x, mpfr_exp); }
inline BigReal log(const BigReal& x) { return detail::unary(x, mpfr_log); }
inline BigReal sin(const BigReal& x) { return detail::unary(x, mpfr_sin); }
inline BigReal cos(const BigReal& x) { return detail::unary(x, mpfr_cos); }
inline BigReal atan(const BigReal& x) { return detail::unary(x, mpfr_atan); }
inline BigReal floor(const BigReal& x) {
  BigReal out(x.precision());
  mpfr_floor(out.get(), x.get());
  return out;
}
inline BigReal round(const BigReal& x) {
  BigReal out(x.precision());
  mpfr_round(out.get(), x.get());
  return out;
}
inline BigReal atan2(const BigReal& y, const BigReal& x) {
  BigReal out(std::max(y.precision(), x.precision()));
  mpfr_atan2(out.get(), y.get(), x.get(), MPFR_RNDN);
  return out;
}
inline BigReal pow(const BigReal& x, long n) {
  BigReal out(x.precision());
  mpfr_pow_si(out.get(), x.get(), n, MPFR_RNDN);
  return out;
}
inline BigReal pow(const BigReal& x, const BigReal& y) {
  BigReal out(std::max(x.precision(), y.precision()));
  mpfr_pow(out.get(), x.get(), y.get(), MPFR_RNDN);
  return out;
}
inline BigReal max(const BigReal& a, const BigReal& b) { return a < b ? b : a; }
inline BigReal min(const BigReal& a, const BigReal& b) { return b < a ? b : a; }

/// Complex number as a (real, imaginary) pair of BigReals.
class BigComplex {
 public:
  BigComplex() = default;
  explicit BigComplex(BigReal re) : re_(std::move(re)), im_(re_.precision()) {}
  BigComplex(BigReal re, BigReal im) : re_(std::move(re)), im_(std::move(im)) {}

  [[nodiscard]] const BigReal& real() const noexcept { return re_; }
  [[nodiscard]] const BigReal& imag() const noexcept { return im_; }
  [[nodiscard]] BigReal& real() noexcept { return re_; }
  [[nodiscard]] BigReal& imag() noexcept { return im_; }
  [[nodiscard]] mpfr_prec_t precision() const noexcept { return std::max(re_.precision(), im_.precision()); }
  [[nodiscard]] bool is_zero() const noexcept { return re_.is_zero() && im_.is_zero(); }

  BigComplex& operator+=(const BigComplex& o) { re_ += o.re_; im_ += o.im_; return *this; }
  BigComplex& operator-=(const BigComplex& o) { re_ -= o.re_; im_ -= o.im_; return *this; }
  BigComplex& operator*=(const BigComplex& o) {
    BigReal r = re_ * o.re_ - im_ * o.im_;
    BigReal i = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(r);
    im_ = std::move(i);
    return *this;
  }
  BigComplex& operator/=(const BigComplex& o) {
    BigReal den = o.re_ * o.re_ + o.im_ * o.im_;
    BigReal r = (re_ * o.re_ + im_ * o.im_) / den;
    BigReal i = (im_ * o.re_ - re_ * o.im_) / den;
    re_ = std::move(r);
    im_ = std::move(i);
    return *this;
  }
  BigComplex& operator*=(const BigReal& o) { re_ *= o; im_ *= o; return *this; }
  BigComplex& operator/=(const BigReal& o) { re_ /= o; im_ /= o; return *this; }
  BigComplex& operator*=(long o) { re_ *= o; im_ *= o; return *this; }
  BigComplex& operator/=(long o) { re_ /= o; im_ /= o; return *this; }
  BigComplex& operator*=(const Rational& o) { re_ *= o; im_ *= o; return *this; }
  BigComplex& operator*=(const Integer& o) { re_ *= o; im_ *= o; return *this; }
  BigComplex& operator+=(const Rational& o) { re_ += o; return *this; }
  BigComplex& operator+=(const BigReal& o) { re_ += o; return *this; }

  BigComplex operator-() const { return BigComplex(-re_, -im_); }

  friend BigComplex operator+(BigComplex a, const BigComplex& b) { a += b; return a; }
  friend BigComplex operator-(BigComplex a, const BigComplex& b) { a -= b; return a; }
  friend BigComplex operator*(BigComplex a, const BigComplex& b) { a *= b; return a; }
  friend BigComplex operator/(BigComplex a, const BigComplex& b) { a /= b; return a; }
  friend BigComplex operator*(BigComplex a, const BigReal& b) { a *= b; return a; }
  friend BigComplex operator*(const BigReal& b, BigComplex a) { a *= b; return a; }
  friend BigComplex operator/(BigComplex a, const BigReal& b) { a /= b; return a; }
  friend BigComplex operator*(BigComplex a, long b) { a *= b; return a; }
  friend BigComplex operator*(long b, BigComplex a) { a *= b; return a; }
  friend BigComplex operator/(BigComplex a, long b) { a /= b; return a; }
  friend BigComplex operator*(BigComplex a, const Rational& b) { a *= b; return a; }
  friend BigComplex operator*(const Rational& b, BigComplex a) { a *= b; return a; }
  friend BigComplex operator*(BigComplex a, const Integer& b) { a *= b; return a; }
  friend BigComplex operator+(BigComplex a, const BigReal& b) { a += b; return a; }

  friend bool operator==(const BigComplex& a, const BigComplex& b) { return a.re_ == b.re_ && a.im_ == b.im_; }

  friend std::ostream& operator<<(std::ostream& os, const BigComplex& z) {
    return os << '(' << z.re_ << ", " << z.im_ << ')';
  }

 private:
  BigReal re_;
  BigReal im_;
};

inline BigComplex conj(const BigComplex& z) { return BigComplex(z.real(), -z.imag()); }
inline BigReal norm(const BigComplex& z) { return z.real() * z.real() + z.imag() * z.imag(); }
inline BigReal abs(const BigComplex& z) {
  BigReal out(z.precision());
  mpfr_hypot(out.get(), z.real().get(), z.imag().get(), MPFR_RNDN);
  return out;
}
/// Principal argument in (-pi, pi]; arg(-x + 0i) = +pi.
inline BigReal arg(const BigComplex& z) { return atan2(z.imag(), z.real()); }
/// Principal logarithm: log(1) = 0, log(-1) = +pi i.
inline BigComplex log(const BigComplex& z) { return BigComplex(log(abs(z)), arg(z)); }
inline BigComplex exp(const BigComplex& z) {
  BigReal m = exp(z.real());
  BigReal s(z.precision()), c(z.precision());
  mpfr_sin_cos(s.get(), c.get(), z.imag().get(), MPFR_RNDN);
  return BigComplex(m * c, m * s);
}
inline BigComplex pow(const BigComplex& z, long n) {
  BigComplex result(BigReal(1, z.precision()));
  BigComplex base = z;
  bool invert = n < 0;
  unsigned long e = invert ? static_cast<unsigned long>(-n) : static_cast<unsigned long>(n);
  while (e) {
    if (e & 1UL) result *= base;
    e >>= 1UL;
    if (e) base *= base;
  }
  if (invert) return BigComplex(BigReal(1, z.precision())) / result;
  return result;
}
inline BigComplex sqrt(const BigComplex& z) {
  BigReal r = abs(z);
  BigReal re = sqrt((r + z.real()) / 2);
  BigReal im = sqrt((r - z.real()) / 2);
  if (z.imag().sign() < 0) im = -im;
  return BigComplex(std::move(re), std::move(im));
}

inline BigReal PrecisionContext::zero() const { return BigReal(bits()); }
inline BigReal PrecisionContext::real(long value) const { return BigReal(value, bits()); }
inline BigReal PrecisionContext::real(const Rational& value) const { return BigReal(value, bits()); }
inline BigReal PrecisionContext::real(std::string_view decimal) const { return BigReal::parse(decimal, bits()); }
inline BigReal PrecisionContext::pow10(long exponent) const { return pow(real(10), exponent); }
inline BigReal PrecisionContext::verify_tolerance() const { return pow10(-verify_digits_); }

/// i * x for real x.
inline BigComplex imaginary(const BigReal& x) { return BigComplex(BigReal(x.precision()), x); }

}  // namespace rank2

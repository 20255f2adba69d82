#pragma once

// q-expansions of weight 2 and 4 newforms from eta products, point counts and
// coefficient files, and L-values from the smoothed Dirichlet series.

#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rank2/error.hpp"
#include "rank2/numerics/big.hpp"
#include "rank2/numerics/constants.hpp"
#include "rank2/numerics/rational.hpp"

namespace rank2 {

enum class CoefficientSource { EtaProduct, PointCount, DataFile };

struct ModularFormSpec {
  long level = 1;
  int weight = 2;
  std::string label;
  std::optional<int> sign;  // Atkin-Lehner / functional-equation sign, +1 or -1
  CoefficientSource source = CoefficientSource::DataFile;
};

struct CoefficientTable {
  std::map<unsigned long, Integer> a;

  [[nodiscard]] const Integer& at(unsigned long n) const {
    auto it = a.find(n);
    if (it == a.end()) {
      throw Error(ErrorCode::InsufficientCoefficients, "coefficient a(" + std::to_string(n) + ") not available");
    }
    return it->second;
  }
  /// Largest m with a(1..m) all present.
  [[nodiscard]] unsigned long contiguous_limit() const {
    unsigned long m = 0;
    for (auto it = a.lower_bound(1); it != a.end() && it->first == m + 1; ++it) ++m;
    return m;
  }
};

/// ParseError carrying the 1-based position of the offending character.
class ParseFailure : public Error {
 public:
  ParseFailure(const std::string& where, size_t line, size_t column, const std::string& what)
      : Error(ErrorCode::ParseError,
              where + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  [[nodiscard]] size_t line() const noexcept { return line_; }
  [[nodiscard]] size_t column() const noexcept { return column_; }

 private:
  size_t line_, column_;
};

inline std::vector<unsigned long> primes_up_to(unsigned long n) {
  std::vector<bool> composite(n + 1, false);
  std::vector<unsigned long> out;
  for (unsigned long i = 2; i <= n; ++i) {
    if (composite[i]) continue;
    out.push_back(i);
    for (unsigned long j = i * i; j <= n; j += i) composite[j] = true;
  }
  return out;
}

inline bool is_prime(unsigned long n) {
  if (n < 2) return false;
  for (unsigned long d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

/// Coefficients of q^(sum d e_d / 24) prod_d prod_n (1 - q^(dn))^(e_d), up to q^n_max.
inline CoefficientTable eta_product_coefficients(const std::map<long, long>& exponents, unsigned long n_max) {
  long weighted = 0;
  for (const auto& [d, e] : exponents) {
    if (d <= 0) throw Error(ErrorCode::ValidationError, "eta product divisor must be positive");
    weighted += d * e;
  }
  if (weighted % 24 != 0) {
    throw Error(ErrorCode::NonIntegralLeadingPower,
                "leading power " + std::to_string(weighted) + "/24 is not an integer");
  }
  const long lead = weighted / 24;
  if (lead < 0) throw Error(ErrorCode::NonIntegralLeadingPower, "negative leading power");
  CoefficientTable out;
  for (unsigned long n = 0; n <= n_max; ++n) out.a[n] = 0;
  if (static_cast<unsigned long>(lead) > n_max) return out;
  const unsigned long len = n_max - static_cast<unsigned long>(lead) + 1;
  std::vector<Integer> c(len, Integer(0));
  c[0] = 1;
  for (const auto& [d, e] : exponents) {
    for (unsigned long step = static_cast<unsigned long>(d); step < len; step += static_cast<unsigned long>(d)) {
      for (long r = 0; r < std::abs(e); ++r) {
        if (e > 0) {
          for (unsigned long i = len; i-- > step;) c[i] -= c[i - step];  // times (1 - q^step)
        } else {
          for (unsigned long i = step; i < len; ++i) c[i] += c[i - step];  // divided by (1 - q^step)
        }
      }
    }
  }
  for (unsigned long i = 0; i < len; ++i) out.a[i + static_cast<unsigned long>(lead)] = c[i];
  return out;
}

struct EllipticCurveModel {
  Integer a1, a2, a3, a4, a6;

  [[nodiscard]] Integer discriminant() const {
    const Integer b2 = a1 * a1 + 4 * a2;
    const Integer b4 = 2 * a4 + a1 * a3;
    const Integer b6 = a3 * a3 + 4 * a6;
    const Integer b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
    return -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6;
  }

  static EllipticCurveModel make(long a1, long a2, long a3, long a4, long a6) {
    EllipticCurveModel e{a1, a2, a3, a4, a6};
    if (e.discriminant() == 0) throw Error(ErrorCode::ValidationError, "singular Weierstrass model");
    return e;
  }
};

/// a_p = p + 1 - #E(F_p). At primes of bad reduction the count includes the
/// singular point, which gives the multiplicative/additive a_p; strict mode refuses them.
inline long ap_from_point_count(const EllipticCurveModel& e, unsigned long p, bool strict = false) {
  if (!is_prime(p)) throw Error(ErrorCode::ValidationError, std::to_string(p) + " is not prime");
  if (p >= 100000) throw Error(ErrorCode::ValidationError, "point counting limited to p < 10^5");
  const Integer delta = e.discriminant();
  if (strict && mpz_divisible_ui_p(delta.get_mpz_t(), p)) {
    throw Error(ErrorCode::BadReductionPrime, "p = " + std::to_string(p) + " divides the discriminant");
  }
  auto mod = [p](const Integer& v) {
    Integer r;
    mpz_fdiv_r_ui(r.get_mpz_t(), v.get_mpz_t(), p);
    return static_cast<long>(r.get_ui());
  };
  const long lp = static_cast<long>(p);
  const long a1 = mod(e.a1), a2 = mod(e.a2), a3 = mod(e.a3), a4 = mod(e.a4), a6 = mod(e.a6);
  long count = 1;  // point at infinity
  if (p == 2) {
    for (long x = 0; x < 2; ++x)
      for (long y = 0; y < 2; ++y) {
        long lhs = (y * y + a1 * x * y + a3 * y) % 2;
        long rhs = (x * x * x + a2 * x * x + a4 * x + a6) % 2;
        if (lhs == rhs) ++count;
      }
  } else {
    // y^2 + (a1 x + a3) y = f(x) has 1 + (disc / p) solutions with disc = (a1 x + a3)^2 + 4 f(x).
    for (long x = 0; x < lp; ++x) {
      long b = (a1 * x + a3) % lp;
      long f = ((x * x % lp) * x + a2 * (x * x % lp) + a4 * x + a6) % lp;
      long disc = (b * b + 4 * f) % lp;
      Integer dz = disc;
      count += 1 + mpz_legendre(dz.get_mpz_t(), Integer(lp).get_mpz_t());
    }
  }
  return lp + 1 - count;
}

namespace detail {

inline Integer ipow(const Integer& b, unsigned long e) {
  Integer r;
  mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
  return r;
}

// n = p^r m with p not dividing m.
inline std::pair<unsigned long, unsigned long> split_prime_power(unsigned long n, unsigned long p) {
  unsigned long pr = 1;
  while (n % p == 0) {
    n /= p;
    pr *= p;
  }
  return {pr, n};
}

inline unsigned long smallest_prime_factor(unsigned long n) {
  for (unsigned long d = 2; d * d <= n; ++d)
    if (n % d == 0) return d;
  return n;
}

inline bool is_bad(const ModularFormSpec& spec, unsigned long p) { return spec.level % static_cast<long>(p) == 0; }

}  // namespace detail

/// Checks a(1) = 1, multiplicativity, the prime-power recursion and the
/// Deligne bound on every stored index. Throws ValidationError naming the index.
inline void validate_table(const CoefficientTable& t, const ModularFormSpec& spec) {
  auto fail = [&](unsigned long n, const std::string& what) {
    throw Error(ErrorCode::ValidationError, spec.label + ": " + what + " at n = " + std::to_string(n));
  };
  auto one = t.a.find(1);
  if (one == t.a.end() || one->second != 1) fail(1, "a(1) must be 1");
  for (const auto& [n, value] : t.a) {
    if (n < 2) continue;
    const unsigned long p = detail::smallest_prime_factor(n);
    auto [pr, m] = detail::split_prime_power(n, p);
    if (m > 1) {
      auto x = t.a.find(pr), y = t.a.find(m);
      if (x != t.a.end() && y != t.a.end() && value != x->second * y->second) fail(n, "multiplicativity a(mn) = a(m)a(n)");
      continue;
    }
    auto ap = t.a.find(p);
    if (n == p) {
      if (!detail::is_bad(spec, p)) {
        // a_p^2 <= 4 p^(k-1)
        if (value * value > 4 * detail::ipow(Integer(p), static_cast<unsigned long>(spec.weight - 1))) {
          fail(n, "Deligne bound |a(p)| <= 2 p^((k-1)/2)");
        }
      }
      continue;
    }
    if (ap == t.a.end()) continue;
    auto prev = t.a.find(n / p);
    if (prev == t.a.end()) continue;
    Integer expected;
    if (detail::is_bad(spec, p)) {
      expected = ap->second * prev->second;
    } else {
      auto prev2 = t.a.find(n / p / p);
      if (prev2 == t.a.end()) continue;
      expected = ap->second * prev->second -
                 detail::ipow(Integer(p), static_cast<unsigned long>(spec.weight - 1)) * prev2->second;
    }
    if (value != expected) fail(n, "Hecke recursion at p = " + std::to_string(p));
  }
}

/// Reads "label=...;level=...;weight=..." then "n:a_n" lines; '#' starts a comment.
inline CoefficientTable parse_coefficient_text(const std::string& text, const ModularFormSpec& spec,
                                               const std::string& where = "<text>") {
  std::istringstream in(text);
  std::string line;
  size_t lineno = 0;
  bool header = false;
  CoefficientTable t;
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
  while (std::getline(in, line)) {
    ++lineno;
    size_t start = 0;
    while (start < line.size() && is_space(line[start])) ++start;
    if (start == line.size() || line[start] == '#') continue;
    size_t end = line.size();
    while (end > start && is_space(line[end - 1])) --end;
    const std::string body = line.substr(start, end - start);
    if (!header) {
      std::map<std::string, std::string> fields;
      size_t pos = 0;
      while (pos <= body.size()) {
        size_t semi = body.find(';', pos);
        if (semi == std::string::npos) semi = body.size();
        const std::string item = body.substr(pos, semi - pos);
        const size_t eq = item.find('=');
        if (eq == std::string::npos || eq == 0) {
          throw ParseFailure(where, lineno, start + pos + 1, "header field '" + item + "' is not key=value");
        }
        fields[item.substr(0, eq)] = item.substr(eq + 1);
        pos = semi + 1;
      }
      for (const char* key : {"label", "level", "weight"}) {
        if (!fields.count(key)) throw ParseFailure(where, lineno, start + 1, std::string("header lacks '") + key + "'");
      }
      long level = 0, weight = 0;
      try {
        level = std::stol(fields["level"]);
        weight = std::stol(fields["weight"]);
      } catch (const std::exception&) {
        throw ParseFailure(where, lineno, start + 1, "header level/weight not integers");
      }
      if (level != spec.level || weight != spec.weight) {
        throw Error(ErrorCode::ValidationError, where + ": file is level " + std::to_string(level) + " weight " +
                                                    std::to_string(weight) + ", expected level " +
                                                    std::to_string(spec.level) + " weight " + std::to_string(spec.weight));
      }
      if (!spec.label.empty() && fields["label"] != spec.label) {
        throw Error(ErrorCode::ValidationError, where + ": file label " + fields["label"] + " != " + spec.label);
      }
      header = true;
      continue;
    }
    const size_t colon = body.find(':');
    if (colon == std::string::npos) throw ParseFailure(where, lineno, start + 1, "expected 'n:a_n'");
    // Offset of the first character that breaks an integer literal, or npos.
    auto first_bad = [](const std::string& s, bool sign) -> size_t {
      size_t i = (sign && !s.empty() && s[0] == '-') ? 1 : 0;
      if (i == s.size()) return i;
      for (; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return i;
      return std::string::npos;
    };
    const std::string n_text = body.substr(0, colon), v_text = body.substr(colon + 1);
    if (size_t bad = first_bad(n_text, false); bad != std::string::npos) {
      throw ParseFailure(where, lineno, start + bad + 1, "index is not a positive integer");
    }
    if (size_t bad = first_bad(v_text, true); bad != std::string::npos) {
      throw ParseFailure(where, lineno, start + colon + 1 + bad + 1, "coefficient is not an integer");
    }
    const unsigned long n = std::stoul(n_text);
    if (n == 0) throw ParseFailure(where, lineno, start + 1, "index must be >= 1");
    if (t.a.count(n)) throw ParseFailure(where, lineno, start + 1, "duplicate index " + n_text);
    t.a[n] = Integer(v_text);
  }
  if (!header) throw ParseFailure(where, lineno + 1, 1, "missing header line");
  validate_table(t, spec);
  return t;
}

inline CoefficientTable ingest_coefficient_file(const std::string& path, const ModularFormSpec& spec) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_coefficient_text(buf.str(), spec, path);
}

/// Extends prime coefficients to a(1..n_max) via the Hecke recursion, with
/// a(p^r) = a(p)^r at primes dividing the (squarefree) level.
inline CoefficientTable hecke_extend(const std::map<unsigned long, Integer>& primes, const ModularFormSpec& spec,
                                     unsigned long n_max) {
  for (unsigned long p : primes_up_to(n_max)) {
    if (!primes.count(p)) throw Error(ErrorCode::MissingPrime, "a(" + std::to_string(p) + ") not supplied");
  }
  CoefficientTable t;
  if (n_max >= 1) t.a[1] = 1;
  for (unsigned long n = 2; n <= n_max; ++n) {
    const unsigned long p = detail::smallest_prime_factor(n);
    auto [pr, m] = detail::split_prime_power(n, p);
    if (m > 1) {
      t.a[n] = t.a[pr] * t.a[m];
    } else if (n == p) {
      t.a[n] = primes.at(p);
    } else if (detail::is_bad(spec, p)) {
      t.a[n] = primes.at(p) * t.a[n / p];
    } else {
      t.a[n] = primes.at(p) * t.a[n / p] -
               detail::ipow(Integer(p), static_cast<unsigned long>(spec.weight - 1)) * t.a[n / p / p];
    }
  }
  return t;
}

inline std::map<unsigned long, Integer> prime_coefficients(const CoefficientTable& t, unsigned long n_max) {
  std::map<unsigned long, Integer> out;
  for (unsigned long p : primes_up_to(n_max)) out[p] = t.at(p);
  return out;
}

struct LValueOptions {
  Rational split = 1;                  // split point t of the smoothed series
  std::optional<unsigned long> n_max;  // force a longer sum than the tail bound asks for
};

namespace detail {

// Smallest n beyond which sum_{m>n} 2 m^(k/2) m^-s G_s(c m) stays below 10^-digits.
inline unsigned long tail_cutoff(int weight, int s, double c, double log10_prefactor, double digits) {
  const double log10e = 0.4342944819032518;
  const double geometric = -std::log10(1.0 - std::exp(-c));
  for (unsigned long n = 1; n < 100000000UL; ++n) {
    const double x = c * static_cast<double>(n);
    if (x < static_cast<double>(weight) + 1) continue;
    double bound = std::log10(2.0) + (weight / 2.0 - s) * std::log10(static_cast<double>(n)) + std::log10(s * 1.0) +
                   (s - 1) * std::log10(x) - x * log10e + geometric + log10_prefactor;
    if (bound < -digits) return n;
  }
  throw Error(ErrorCode::InsufficientCoefficients, "tail bound does not converge");
}

// sum_n a_n n^-s G_s(c n) with G_s(x) = e^-x sum_{j<s} x^j / j!.
inline BigReal smoothed_sum(const CoefficientTable& t, int s, const BigReal& c, unsigned long n_max) {
  const mpfr_prec_t bits = c.precision();
  const BigReal q = exp(-c);
  BigReal qn(1, bits);
  BigReal acc(bits);
  for (unsigned long n = 1; n <= n_max; ++n) {
    qn *= q;
    const Integer& an = t.at(n);
    if (an == 0) continue;
    const BigReal x = c * static_cast<long>(n);
    BigReal poly(1, bits), term(1, bits);
    for (int j = 1; j < s; ++j) {
      term = term * x / static_cast<long>(j);
      poly += term;
    }
    acc += BigReal(an, bits) * qn * poly / pow(BigReal(static_cast<long>(n), bits), static_cast<long>(s));
  }
  return acc;
}

struct LValueParts {
  BigReal direct;
  BigReal reflected;  // multiplied by the sign to form L
  unsigned long n_used;
};

inline LValueParts l_value_parts(const CoefficientTable& t, const ModularFormSpec& spec, int s,
                                 const PrecisionContext& ctx, const LValueOptions& opt) {
  const int k = spec.weight;
  if (s < 1 || s > k - 1) throw Error(ErrorCode::ValidationError, "s must lie in 1..k-1");
  if (opt.split <= 0) throw Error(ErrorCode::ValidationError, "split point must be positive");
  const BigReal pi = constant_pi(ctx);
  const BigReal sqrt_n = sqrt(ctx.real(spec.level));
  const BigReal base = pi * 2 / sqrt_n;  // x_n = base * n
  const BigReal t_split = ctx.real(opt.split);
  const BigReal c1 = base * t_split, c2 = base / t_split;
  // (sqrt N / 2 pi)^(k - 2s) Gamma(k - s) / Gamma(s)
  const BigReal prefactor = pow(sqrt_n / (pi * 2), static_cast<long>(k - 2 * s)) *
                            ctx.real(Rational(factorial(static_cast<unsigned long>(k - s - 1)),
                                              factorial(static_cast<unsigned long>(s - 1))));
  const double digits = ctx.total_digits() + 2;
  const unsigned long n1 = tail_cutoff(k, s, c1.to_double(), 0.0, digits);
  const unsigned long n2 = tail_cutoff(k, k - s, c2.to_double(), prefactor.log10_abs(), digits);
  unsigned long need = std::max(n1, n2);
  if (opt.n_max) need = std::max(need, *opt.n_max);
  if (t.contiguous_limit() < need) {
    throw Error(ErrorCode::InsufficientCoefficients,
                spec.label + ": need a(n) for n <= " + std::to_string(need) + ", have " +
                    std::to_string(t.contiguous_limit()));
  }
  LValueParts out{smoothed_sum(t, s, c1, need), smoothed_sum(t, k - s, c2, need) * prefactor, need};
  return out;
}

}  // namespace detail

/// L(f, s) for an integer s in the critical strip.
inline BigReal l_value(const CoefficientTable& t, const ModularFormSpec& spec, int s, const PrecisionContext& ctx,
                       const LValueOptions& opt = {}) {
  if (!spec.sign) throw Error(ErrorCode::UnknownSign, spec.label + ": functional-equation sign not resolved");
  auto parts = detail::l_value_parts(t, spec, s, ctx, opt);
  return *spec.sign > 0 ? parts.direct + parts.reflected : parts.direct - parts.reflected;
}

/// The sign for which L(f, s) does not depend on the split point.
inline int resolve_sign(const CoefficientTable& t, const ModularFormSpec& spec, const PrecisionContext& ctx,
                        int s = 1) {
  const BigReal tol = ctx.pow10(-ctx.working_digits() / 2);
  auto p1 = detail::l_value_parts(t, spec, s, ctx, {Rational(1), std::nullopt});
  auto p2 = detail::l_value_parts(t, spec, s, ctx, {Rational(6, 5), std::nullopt});
  std::vector<int> passing;
  for (int eps : {1, -1}) {
    BigReal l1 = p1.direct + p1.reflected * static_cast<long>(eps);
    BigReal l2 = p2.direct + p2.reflected * static_cast<long>(eps);
    if (abs(l1 - l2) <= tol) passing.push_back(eps);
  }
  if (passing.size() != 1) {
    throw Error(ErrorCode::AmbiguousSign, spec.label + ": " + std::to_string(passing.size()) +
                                              " candidate signs satisfy split-point invariance");
  }
  return passing[0];
}

}  // namespace rank2

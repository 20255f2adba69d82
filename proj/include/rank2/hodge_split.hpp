#pragma once

// Pairings of integral classes against Omega and its phi-derivatives, and
// recovery of the rational de Rham relations that split H^3.

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rank2/error.hpp"
#include "rank2/mirror_structure.hpp"
#include "rank2/numerics/big.hpp"
#include "rank2/numerics/linalg.hpp"
#include "rank2/numerics/recognize.hpp"

namespace rank2 {

/// int (beta . P) cup Omega^{(j)} = P^T Sigma S varpi^{(j)}.
inline BigComplex pairing(const RationalVector& p, const PeriodJet& jet, const TransitionMatrix& s, size_t j) {
  return symplectic_pairing(p, integral_periods(s, jet, j));
}

/// Combination sum_j c_j Omega^{(j)}, keyed by derivative order.
using DeRhamCombination = std::map<int, Rational>;

inline BigComplex pairing(const RationalVector& p, const PeriodJet& jet, const TransitionMatrix& s,
                          const DeRhamCombination& combo) {
  BigComplex acc(BigReal(jet.W[0][0].precision()));
  for (const auto& [order, c] : combo) acc += pairing(p, jet, s, static_cast<size_t>(order)) * c;
  return acc;
}

inline std::string to_string(const DeRhamCombination& combo) {
  static const char* names[4] = {"Omega", "Omega'", "Omega''", "Omega'''"};
  std::string out;
  for (auto it = combo.rbegin(); it != combo.rend(); ++it) {
    const auto& [order, c] = *it;
    if (c == 0) continue;
    std::string coeff = to_string(abs(c));
    std::string sign = c < 0 ? " - " : " + ";
    if (out.empty()) sign = c < 0 ? "-" : "";
    out += sign + (abs(c) == 1 ? "" : coeff + " ") + names[order];
  }
  return out.empty() ? "0" : out;
}

struct SplitRelation {
  DeRhamCombination coefficients;  // monic in the highest order
  std::vector<RationalVector> annihilated_by;
  BigReal residual;  // max over P of |pairing(P, relation)|
};

/// Finds the monic combination of the listed derivative orders that pairs to
/// zero with every P, and recognizes its coefficients as rationals.
inline SplitRelation discover_split_relation(const std::vector<RationalVector>& p_list, const PeriodJet& jet,
                                             const TransitionMatrix& s, std::vector<int> orders,
                                             const Integer& max_den, const BigReal& tol) {
  if (orders.empty()) throw Error(ErrorCode::ValidationError, "orders must be nonempty");
  std::sort(orders.begin(), orders.end());
  orders.erase(std::unique(orders.begin(), orders.end()), orders.end());
  for (int o : orders) {
    if (o < 0 || o > 3) throw Error(ErrorCode::ValidationError, "derivative order out of range");
  }
  const int top = orders.back();
  const std::vector<int> free(orders.begin(), orders.end() - 1);
  const mpfr_prec_t bits = jet.W[0][0].precision();

  // A x = b with A[p][i] = <P, Omega^(free_i)>, b[p] = -<P, Omega^(top)>.
  Matrix<BigComplex> a;
  Vec<BigComplex> b;
  BigReal scale(bits);
  for (const auto& p : p_list) {
    Vec<BigComplex> row;
    for (int o : free) {
      row.push_back(pairing(p, jet, s, static_cast<size_t>(o)));
      scale = max(scale, abs(row.back()));
    }
    a.push_back(std::move(row));
    b.push_back(-pairing(p, jet, s, static_cast<size_t>(top)));
    scale = max(scale, abs(b.back()));
  }
  Vec<BigComplex> x;
  if (!free.empty()) {
    if (a.size() < free.size()) throw Error(ErrorCode::NoKernel, "fewer conditions than unknowns");
    // Normal equations A^H A x = A^H b.
    const size_t n = free.size();
    Matrix<BigComplex> ah_a(n, Vec<BigComplex>(n, BigComplex(BigReal(bits))));
    Vec<BigComplex> ah_b(n, BigComplex(BigReal(bits)));
    for (size_t i = 0; i < n; ++i) {
      for (size_t r = 0; r < a.size(); ++r) {
        BigComplex ci = conj(a[r][i]);
        for (size_t k = 0; k < n; ++k) ah_a[i][k] += ci * a[r][k];
        ah_b[i] += ci * b[r];
      }
    }
    auto sol = solve(ah_a, ah_b);
    if (!sol) throw Error(ErrorCode::NoKernel, "pairing matrix is singular");
    x = *sol;
  }
  // The least-squares solution must actually annihilate every pairing.
  const BigReal rel_tol = tol * max(scale, BigReal(1, bits));
  for (size_t r = 0; r < a.size(); ++r) {
    BigComplex acc = -b[r];
    for (size_t i = 0; i < x.size(); ++i) acc += a[r][i] * x[i];
    if (abs(acc) > rel_tol) throw Error(ErrorCode::NoKernel, "no combination of these orders annihilates all pairings");
  }
  SplitRelation rel;
  rel.coefficients[top] = 1;
  for (size_t i = 0; i < x.size(); ++i) {
    if (abs(x[i].imag()) > tol) {
      throw Error(ErrorCode::RecognitionFailure, "coefficient of order " + std::to_string(free[i]) + " is not real");
    }
    auto q = recognize_rational(x[i].real(), max_den, tol);
    if (!q) {
      throw Error(ErrorCode::RecognitionFailure, "coefficient of order " + std::to_string(free[i]) + " ~ " +
                                                     x[i].real().to_string(30) + " is not a rational with denominator <= " +
                                                     max_den.get_str());
    }
    rel.coefficients[free[i]] = *q;
  }
  rel.annihilated_by = p_list;
  rel.residual = BigReal(bits);
  for (const auto& p : p_list) rel.residual = max(rel.residual, abs(pairing(p, jet, s, rel.coefficients)));
  return rel;
}

struct FiltrationStep {
  std::string motive;  // "att" or "ell"
  int p;
  std::vector<DeRhamCombination> basis;
};

struct FiltrationReport {
  std::vector<FiltrationStep> steps;
};

/// Relations feeding the filtration: the E-side relation (orders 3,2,1) and the
/// two A-side relations (orders 1,0 and 2,0).
struct SplitRelations {
  std::optional<SplitRelation> att_f0;
  std::optional<SplitRelation> ell_f2;
  std::optional<SplitRelation> ell_f1;
};

/// F^p of the attractor and elliptic pieces expressed through Omega and its derivatives.
inline FiltrationReport filtration_report(const SplitRelations& rel) {
  FiltrationReport out;
  const DeRhamCombination omega{{0, Rational(1)}};
  if (!rel.att_f0 && !rel.ell_f2 && !rel.ell_f1) {
    out.steps.push_back({"att", 3, {omega}});
    return out;
  }
  for (int p : {3, 2, 1}) out.steps.push_back({"att", p, {omega}});
  if (rel.att_f0) out.steps.push_back({"att", 0, {omega, rel.att_f0->coefficients}});
  out.steps.push_back({"ell", 3, {}});
  if (rel.ell_f2) {
    out.steps.push_back({"ell", 2, {rel.ell_f2->coefficients}});
    if (rel.ell_f1) {
      out.steps.push_back({"ell", 1, {rel.ell_f2->coefficients, rel.ell_f1->coefficients}});
      out.steps.push_back({"ell", 0, {rel.ell_f2->coefficients, rel.ell_f1->coefficients}});
    }
  }
  return out;
}

}  // namespace rank2

#pragma once

// Shared fixtures: the AESZ34 operator and family data, and cached period jets.

#include <map>
#include <memory>
#include <utility>

#include "rank2/mirror_structure.hpp"
#include "rank2/modular_forms.hpp"
#include "rank2/picard_fuchs.hpp"

namespace rank2::testing {

inline PicardFuchsOperator aesz34() {
  auto poly = [](std::initializer_list<long> c) {
    RationalPolynomial p;
    for (long v : c) p.emplace_back(v);
    return p;
  };
  return PicardFuchsOperator("AESZ34", {poly({0, -5, 285, -900}), poly({0, -28, 1088, -2700}),
                                        poly({0, -63, 1580, -2925}), poly({0, -70, 1036, -1350}),
                                        poly({1, -35, 259, -225})});
}

inline PrepotentialData aesz34_data() {
  PrepotentialData d;
  d.Y111 = 24;
  d.Y011 = 0;
  d.Y001 = -2;
  d.euler = -16;
  return d;
}

inline IntMatrix4 f_inf() {
  IntMatrix4 f;
  const long rows[4][4] = {{1, 1, -6, 12}, {0, -1, 12, -24}, {0, 0, -1, 0}, {0, 0, -1, 1}};
  for (size_t i = 0; i < 4; ++i)
    for (size_t j = 0; j < 4; ++j) f[i][j] = rows[i][j];
  return f;
}

inline EigenBasisOverride literal_basis() {
  return {{ChargeVector{1, 0, 0, 0}, ChargeVector{0, -12, 0, 1}},
          {ChargeVector{0, 0, 2, 1}, ChargeVector{-1, 2, 0, 0}}};
}

inline const ChargeVector kAPlus{16, -60, 0, 5};
inline const ChargeVector kAMinus{0, 0, 2, 1};

struct PointData {
  PrecisionContext ctx;
  PeriodJet jet;
  TransitionMatrix s;
};

/// Jet at phi continued along the negative axis from -1/50, memoized per (phi, digits).
inline const PointData& point_data(const Rational& phi, long digits) {
  static std::map<std::pair<std::string, long>, std::unique_ptr<PointData>> cache;
  auto key = std::make_pair(phi.get_str(), digits);
  auto it = cache.find(key);
  if (it != cache.end()) return *it->second;
  PrecisionContext ctx(digits, 20);
  auto op = aesz34();
  const Rational base(-1, 50);
  auto sols = frobenius_solutions(op, frobenius_order_for(op, ctx.real(-base), ctx));
  auto start = evaluate_canonical(op, sols, to_complex(base, ctx), ctx);
  auto jet = phi == base ? start : continue_jet(op, start, {{start.point, to_complex(phi, ctx)}}, ctx);
  auto data = std::make_unique<PointData>(PointData{ctx, std::move(jet), build_s_matrix(aesz34_data(), ctx)});
  return *cache.emplace(key, std::move(data)).first->second;
}

struct LValues {
  BigReal f4_1, f4_2, f2_1;
};

/// L(f4, 1), L(f4, 2), L(f2, 1) with f2 from its eta product and f4 from the shipped table.
inline const LValues& l_values(long digits) {
  static std::map<long, std::unique_ptr<LValues>> cache;
  auto it = cache.find(digits);
  if (it != cache.end()) return *it->second;
  PrecisionContext ctx(digits, 20);
  ModularFormSpec f2{14, 2, "14.2.a.a", 1, CoefficientSource::EtaProduct};
  ModularFormSpec f4{14, 4, "14.4.a.a", 1, CoefficientSource::DataFile};
  auto t2 = eta_product_coefficients({{1, 1}, {2, 1}, {7, 1}, {14, 1}}, 2000);
  t2.a.erase(0);
  auto t4 = ingest_coefficient_file(std::string(RANK2_DATA_DIR) + "/14.4.a.a.txt", f4);
  auto v = std::make_unique<LValues>(LValues{l_value(t4, f4, 1, ctx), l_value(t4, f4, 2, ctx), l_value(t2, f2, 1, ctx)});
  return *cache.emplace(digits, std::move(v)).first->second;
}

}  // namespace rank2::testing

#pragma once

// End-to-end run: periods, attractor check, charge search, de Rham split,
// L-values, Deligne periods and the elliptic curve, with a JSON report.

#include <chrono>
#include <cmath>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rank2/attractor.hpp"
#include "rank2/cache.hpp"
#include "rank2/config.hpp"
#include "rank2/deligne.hpp"
#include "rank2/elliptic.hpp"
#include "rank2/hodge_split.hpp"
#include "rank2/mirror_structure.hpp"
#include "rank2/modular_forms.hpp"
#include "rank2/numerics/recognize.hpp"
#include "rank2/picard_fuchs.hpp"

namespace rank2 {

inline constexpr int kReportSchema = 1;

// Report encoding: numbers are decimal strings tagged with the digits printed.
inline Json decimal_json(const BigReal& x, int digits) { return Json{{"value", x.to_string(digits)}, {"digits", digits}}; }
inline Json decimal_json(const BigComplex& z, int digits) {
  return Json{{"re", z.real().to_string(digits)}, {"im", z.imag().to_string(digits)}, {"digits", digits}};
}
inline Json residual_json(const BigReal& r) { return decimal_json(r, 3); }
inline Json recognized_json(const std::optional<Rational>& q, const BigReal& residual) {
  return Json{{"value", q ? Json(to_string(*q)) : Json(nullptr)}, {"residual", residual_json(residual)}};
}
inline Json charge_json(const ChargeVector& v) {
  Json out = Json::array();
  for (const auto& x : v) out.push_back(x.get_str());
  return out;
}
inline Json rational_vector_json(const RationalVector& v) {
  Json out = Json::array();
  for (const auto& x : v) out.push_back(to_string(x));
  return out;
}
inline Json combination_json(const DeRhamCombination& c) {
  Json coeffs = Json::object();
  for (auto it = c.rbegin(); it != c.rend(); ++it) coeffs[std::to_string(it->first)] = to_string(it->second);
  return Json{{"text", to_string(c)}, {"coefficients", std::move(coeffs)}};
}

/// Digits certified by a residual that should vanish: floor(-log10 r), capped.
inline int achieved_digits(const BigReal& residual, int cap) {
  if (residual.is_zero()) return cap;
  const double d = std::floor(-residual.log10_abs());
  return static_cast<int>(std::clamp(d, 0.0, static_cast<double>(cap)));
}

/// Rational cube root of q, if q is a cube.
inline std::optional<Rational> rational_cube_root(const Rational& q) {
  auto icbrt = [](const Integer& n) -> std::optional<Integer> {
    Integer a = abs(n), r;
    mpz_root(r.get_mpz_t(), a.get_mpz_t(), 3);
    if (r * r * r != a) return std::nullopt;
    return n < 0 ? Integer(-r) : r;
  };
  auto n = icbrt(q.get_num()), d = icbrt(q.get_den());
  if (!n || !d) return std::nullopt;
  return Rational(*n, *d);
}

struct StageTiming {
  std::string stage;
  double seconds;
};

/// `body` is deterministic for a given config; timings and cache events are kept apart.
struct RunReport {
  Json body;
  std::vector<StageTiming> timings;
  std::vector<std::string> cache_events;
  bool all_pass = false;

  [[nodiscard]] std::string text() const { return body.dump(2) + "\n"; }
};

struct FormData {
  FormConfig config;
  ModularFormSpec spec;  // with the resolved sign
  CoefficientTable table;
  std::string content_hash;
  std::string provenance;
};

struct LValueEntry {
  std::string label;
  int s;
  BigReal value;
  BigReal split_drift;  // |L at split 1 - L at split 2|
  unsigned long n_used;
};

struct SplitStage {
  EigenSplit eigen;
  EVectors e;
  SplitRelations relations;
  DeRhamCombination omega_ell;
  FiltrationReport filtration;
};

struct EllipticStage {
  LatticeBasis basis;
  EllipticReport report;
  BigReal j_residual;
};

/// Lazily evaluated stages over one config. Each stage is computed once.
class Pipeline {
 public:
  explicit Pipeline(PipelineConfig cfg, std::ostream* log = &std::cerr)
      : cfg_(std::move(cfg)),
        op_(load_operator(cfg_.operator_json)),
        ctx_(cfg_.digits, cfg_.guard_digits),
        cache_(cfg_.cache_dir, log),
        log_(log) {
    validate(cfg_);
  }

  [[nodiscard]] const PipelineConfig& config() const noexcept { return cfg_; }
  [[nodiscard]] const PicardFuchsOperator& op() const noexcept { return op_; }
  [[nodiscard]] const PrecisionContext& ctx() const noexcept { return ctx_; }
  [[nodiscard]] const std::vector<StageTiming>& timings() const noexcept { return timings_; }
  [[nodiscard]] const std::vector<std::string>& cache_events() const noexcept { return cache_events_; }
  [[nodiscard]] BigReal tolerance() const { return ctx_.pow10(-ctx_.working_digits() / 2); }

  [[nodiscard]] std::string operator_hash() const { return sha256_hex(canonical_operator_json(op_).dump()); }

  /// Start of the continuation: sign(point) / round(2 / radius), or the point itself when closer.
  [[nodiscard]] Rational base_point() const {
    const BigReal r = op_.convergence_radius(ctx_);
    Integer n = (ctx_.real(2) / r).round_to_integer();
    if (n < 1) n = 1;
    Rational base(cfg_.point < 0 ? -1 : 1, n);
    if (abs(cfg_.point) <= abs(base)) return cfg_.point;
    return base;
  }

  const PeriodJet& jet() {
    if (!jet_) {
      stage("periods", "move the point away from the singular locus or raise digits", [&] {
        const Rational base = base_point();
        CacheKey key{"jet", operator_hash(), to_string(cfg_.point), cfg_.digits,
                     "guard=" + std::to_string(cfg_.guard_digits) + ";base=" + to_string(base) + ";path=straight"};
        if (auto hit = cache_.lookup(key)) {
          try {
            jet_ = jet_from_json(*hit);
            cache_events_.push_back("periods: hit");
            return;
          } catch (const std::exception& e) {
            if (log_) *log_ << "warning: ignoring unreadable cached jet: " << e.what() << '\n';
          }
        }
        cache_events_.push_back("periods: miss");
        frobenius_order_ = frobenius_order_for(op_, ctx_.real(abs(base)), ctx_);
        const auto sols = frobenius_solutions(op_, frobenius_order_);
        auto start = evaluate_canonical(op_, sols, to_complex(base, ctx_), ctx_);
        jet_ = base == cfg_.point ? std::move(start)
                                  : continue_jet(op_, start, {{start.point, to_complex(cfg_.point, ctx_)}}, ctx_);
        cache_.store(key, jet_to_json(*jet_));
      });
    }
    return *jet_;
  }

  const TransitionMatrix& s_matrix() {
    if (!s_) s_ = build_s_matrix(cfg_.family.prepotential, ctx_);
    return *s_;
  }

  const AttractorCertificate& attractor() {
    if (!attractor_) {
      const auto& j = jet();
      stage("attractor", "check the charges A_plus and A_minus in the family config", [&] {
        attractor_ = verify_rank2(j.point, j, s_matrix(), cfg_.family.a_plus, cfg_.family.a_minus, tolerance());
      });
    }
    return *attractor_;
  }

  std::vector<ChargeVector> search(long height) {
    const auto& j = jet();
    std::vector<ChargeVector> out;
    stage("charge_search", "raise digits or the height bound", [&] {
      out = search_charges(integral_periods(s_matrix(), j, 0), Integer(height), tolerance());
    });
    return out;
  }

  const SplitStage& split() {
    if (!split_) {
      const auto& j = jet();
      stage("split", "check f_infinity, eigen_basis and the charges in the family config", [&] {
        SplitStage out;
        out.eigen = eigen_split(involution_matrix(cfg_.family.f_infinity), cfg_.family.eigen_basis);
        out.e = e_vectors(out.eigen, cfg_.family.a_plus, cfg_.family.a_minus);
        const std::vector<RationalVector> a_list{to_rational(cfg_.family.a_plus), to_rational(cfg_.family.a_minus)};
        const std::vector<RationalVector> e_list{out.e.plus, out.e.minus};
        const BigReal tol = tolerance();
        out.relations.att_f0 = discover_split_relation(e_list, j, s_matrix(), {3, 2, 1}, cfg_.max_denominator, tol);
        out.relations.ell_f2 = discover_split_relation(a_list, j, s_matrix(), {1, 0}, cfg_.max_denominator, tol);
        out.relations.ell_f1 = discover_split_relation(a_list, j, s_matrix(), {2, 0}, cfg_.max_denominator, tol);
        out.omega_ell = out.relations.ell_f2->coefficients;
        out.filtration = filtration_report(out.relations);
        split_ = std::move(out);
      });
    }
    return *split_;
  }

  /// Coefficients for one form; eta tables are checked against point counts first.
  const FormData& form(const std::string& label) {
    auto it = forms_.find(label);
    if (it != forms_.end()) return it->second;
    const FormConfig* fc = nullptr;
    for (const auto& f : cfg_.forms) {
      if (f.spec.label == label) fc = &f;
    }
    if (!fc) throw Error(ErrorCode::ValidationError, "no form labelled '" + label + "' in the config");
    FormData data{*fc, fc->spec, {}, {}, {}};
    stage("lvalues", "check the coefficient source of form " + label, [&] {
      if (fc->spec.source == CoefficientSource::EtaProduct) {
        data.table = eta_product_coefficients(fc->eta_exponents, fc->terms);
        data.table.a.erase(0);
        std::string eta;
        for (const auto& [d, e] : fc->eta_exponents) {
          eta += "eta(" + (d == 1 ? std::string() : std::to_string(d)) + "tau)" + (e == 1 ? "" : "^" + std::to_string(e));
        }
        data.provenance = "eta product " + eta + ", " + std::to_string(fc->terms) + " terms";
        if (fc->cross_check_curve) {
          const auto& c = *fc->cross_check_curve;
          const auto curve = EllipticCurveModel::make(c[0], c[1], c[2], c[3], c[4]);
          for (unsigned long p : primes_up_to(fc->cross_check_p_max)) {
            if (detail::is_bad(fc->spec, p)) continue;
            const long ap = ap_from_point_count(curve, p);
            if (data.table.at(p) != ap) {
              throw Error(ErrorCode::ValidationError, label + ": a(" + std::to_string(p) + ") = " +
                                                          data.table.at(p).get_str() + " from the eta product but " +
                                                          std::to_string(ap) + " from point counts; aborting");
            }
          }
          data.provenance += ", a(p) equal to point counts for good p <= " + std::to_string(fc->cross_check_p_max);
        }
      } else {
        data.table = ingest_coefficient_file(fc->path.string(), fc->spec);
        data.provenance = "data file " + fc->path.filename().string() + " (sha256 " +
                          sha256_hex(detail::read_text(fc->path)) + ")";
      }
      validate_table(data.table, fc->spec);
      Json coeffs = Json::object();
      for (const auto& [n, a] : data.table.a) coeffs[std::to_string(n)] = a.get_str();
      data.content_hash = sha256_hex(Json{{"level", fc->spec.level}, {"weight", fc->spec.weight}, {"a", coeffs}}.dump());
      const int eps = resolve_sign(data.table, fc->spec, ctx_);
      if (fc->spec.sign && *fc->spec.sign != eps) {
        throw Error(ErrorCode::ValidationError, label + ": configured sign " + std::to_string(*fc->spec.sign) +
                                                    " contradicts the resolved sign " + std::to_string(eps));
      }
      data.spec.sign = eps;
    });
    return forms_.emplace(label, std::move(data)).first->second;
  }

  /// L(f, s) at split 1, with the drift against split 2 as an accuracy witness.
  LValueEntry lvalue(const std::string& label, int s) {
    const auto key = label + "@" + std::to_string(s);
    auto it = lvalues_.find(key);
    if (it != lvalues_.end()) return it->second;
    const FormData& f = form(label);
    std::optional<LValueEntry> out;
    stage("lvalues", "supply more coefficients for " + label, [&] {
      CacheKey ck{"lvalue", f.content_hash, "s=" + std::to_string(s), cfg_.digits,
                  "guard=" + std::to_string(cfg_.guard_digits) + ";sign=" + std::to_string(*f.spec.sign)};
      if (auto hit = cache_.lookup(ck)) {
        try {
          out = LValueEntry{label, s, exact_real(hit->at("value"), ctx_.bits()), exact_real(hit->at("drift"), ctx_.bits()),
                            hit->at("n_used").get<unsigned long>()};
          cache_events_.push_back("lvalue " + key + ": hit");
          return;
        } catch (const std::exception& e) {
          if (log_) *log_ << "warning: ignoring unreadable cached L-value: " << e.what() << '\n';
        }
      }
      cache_events_.push_back("lvalue " + key + ": miss");
      const long eps = *f.spec.sign;
      const auto p1 = detail::l_value_parts(f.table, f.spec, s, ctx_, {Rational(1), std::nullopt});
      const auto p2 = detail::l_value_parts(f.table, f.spec, s, ctx_, {Rational(2), std::nullopt});
      const BigReal v1 = p1.direct + p1.reflected * eps, v2 = p2.direct + p2.reflected * eps;
      out = LValueEntry{label, s, v1, abs(v1 - v2), p1.n_used};
      cache_.store(ck, Json{{"value", exact_json(out->value)}, {"drift", exact_json(out->split_drift)},
                            {"n_used", out->n_used}});
    });
    return lvalues_.emplace(key, *out).first->second;
  }

  [[nodiscard]] const FormConfig& form_of_weight(int weight) const {
    for (const auto& f : cfg_.forms) {
      if (f.spec.weight == weight) return f;
    }
    throw Error(ErrorCode::ValidationError, "config has no weight-" + std::to_string(weight) + " form");
  }

  const DelignePeriodReport& deligne() {
    if (!deligne_) {
      const auto& sp = split();
      const auto& f4 = form_of_weight(4).spec.label;
      const auto& f2 = form_of_weight(2).spec.label;
      const BigReal l41 = lvalue(f4, 1).value, l42 = lvalue(f4, 2).value, l21 = lvalue(f2, 1).value;
      stage("deligne", "check lambda and the eigen basis normalisation", [&] {
        DeligneInputs in{c_pm_attractor(jet(), ctx_),
                         c_pm_elliptic(jet(), s_matrix(), sp.e.plus, sp.e.minus, sp.omega_ell, ctx_),
                         s_matrix().lambda_used, l41, l42, l21};
        deligne_ = verify_conjecture(in, ctx_);
        cross_check_ = attractor_cross_check(jet(), s_matrix(), cfg_.family.a_plus, cfg_.family.a_minus, ctx_);
      });
    }
    return *deligne_;
  }

  const EllipticStage& elliptic() {
    if (!elliptic_) {
      const auto& sp = split();
      stage("elliptic", "check that E_+ and (5 E_+ + 14 E_-)/2 are integral", [&] {
        EllipticStage out;
        out.basis = lattice_basis(sp.e.plus, sp.e.minus);
        out.report.primitive_basis = out.basis.primitive;
        out.report.tau = tau_from_pairings(out.basis, jet(), s_matrix(), sp.omega_ell);
        out.report.j = j_invariant(out.report.tau, ctx_);
        const BigReal scale = max(abs(out.report.j), ctx_.real(1));
        out.j_residual = abs(out.report.j.imag());
        if (out.j_residual <= tolerance() * scale) {
          out.report.recognized_j = recognize_rational(out.report.j.real(), cfg_.max_denominator, tolerance() * scale);
          if (out.report.recognized_j) {
            out.j_residual = abs(out.report.j - BigComplex(ctx_.real(*out.report.recognized_j)));
          }
        }
        elliptic_ = std::move(out);
      });
    }
    return *elliptic_;
  }

  // --- report sections -------------------------------------------------------

  Json periods_json() {
    const auto& j = jet();
    const int d = ctx_.working_digits();
    Json w = Json::array();
    for (const auto& row : j.W) {
      Json r = Json::array();
      for (const auto& z : row) r.push_back(decimal_json(z, d));
      w.push_back(std::move(r));
    }
    Json pi = Json::array();
    for (const auto& z : integral_periods(s_matrix(), j, 0)) pi.push_back(decimal_json(z, d));
    Json sing = Json::array({"0"});
    for (const auto& r : op_.rational_singular_points()) sing.push_back(to_string(r));
    sing.push_back("infinity");
    return Json{{"point", to_string(cfg_.point)},
                {"base_point", to_string(base_point())},
                {"path", "straight segment from the base point"},
                {"singular_points", std::move(sing)},
                {"jet", std::move(w)},
                {"mirror_map", decimal_json(mirror_map(j), d)},
                {"integral_periods", std::move(pi)},
                {"lambda", to_string(s_matrix().lambda_used)},
                {"verdict", "pass"}};
  }

  Json attractor_json() {
    const auto& c = attractor();
    Json coeffs = Json::array();
    for (size_t i = 0; i < c.charges.size(); ++i) {
      coeffs.push_back(Json{{"charge", charge_json(c.charges[i])},
                            {"C", decimal_json(c.coefficients[i].C, ctx_.working_digits())},
                            {"residual", residual_json(c.coefficients[i].residual)}});
    }
    return Json{{"point", to_string(cfg_.point)},
                {"rank", c.rank},
                {"tolerance", residual_json(c.tolerance_used)},
                {"charges", std::move(coeffs)},
                {"verdict", c.rank == 2 ? "pass" : "fail"}};
  }

  Json search_json(long height) {
    const auto found = search(height);
    Json list = Json::array();
    for (const auto& v : found) list.push_back(charge_json(v));
    bool spans = false;
    if (found.size() >= 2) {
      auto row = [](const ChargeVector& v) { return std::vector<Rational>{v[0], v[1], v[2], v[3]}; };
      Matrix<Rational> m{row(found[0]), row(found[1]), row(cfg_.family.a_plus), row(cfg_.family.a_minus)};
      spans = rank(m) == 2;
    }
    return Json{{"point", to_string(cfg_.point)},
                {"height_bound", height},
                {"found", std::move(list)},
                {"spans_configured_charges", spans},
                {"verdict", spans ? "pass" : "fail"}};
  }

  Json split_json() {
    const auto& sp = split();
    auto rel = [&](const std::optional<SplitRelation>& r, const char* side) {
      return Json{{"relation", combination_json(r->coefficients)},
                  {"annihilated_by", side},
                  {"residual", residual_json(r->residual)}};
    };
    Json filt = Json::array();
    for (const auto& step : sp.filtration.steps) {
      Json basis = Json::array();
      for (const auto& b : step.basis) basis.push_back(to_string(b));
      filt.push_back(Json{{"motive", step.motive}, {"p", step.p}, {"basis", std::move(basis)}});
    }
    const BigReal tol = tolerance();
    bool ok = true;
    for (const auto* r : {&sp.relations.att_f0, &sp.relations.ell_f2, &sp.relations.ell_f1}) {
      ok = ok && r->has_value() && (*r)->residual <= tol;
    }
    return Json{{"eigen_basis", Json{{"plus", Json::array({charge_json(sp.eigen.plus[0]), charge_json(sp.eigen.plus[1])})},
                                     {"minus", Json::array({charge_json(sp.eigen.minus[0]), charge_json(sp.eigen.minus[1])})}}},
                {"E_plus", rational_vector_json(sp.e.plus)},
                {"E_minus", rational_vector_json(sp.e.minus)},
                {"relations", Json::array({rel(sp.relations.att_f0, "E_plus, E_minus"),
                                           rel(sp.relations.ell_f2, "A_plus, A_minus"),
                                           rel(sp.relations.ell_f1, "A_plus, A_minus")})},
                {"filtration", std::move(filt)},
                {"verdict", ok ? "pass" : "fail"}};
  }

  Json form_json(const std::string& label, const std::vector<int>& s_list) {
    const FormData& f = form(label);
    Json values = Json::array();
    bool ok = true;
    for (int s : s_list) {
      const auto e = lvalue(label, s);
      ok = ok && e.split_drift <= tolerance();
      values.push_back(Json{{"s", s},
                            {"value", decimal_json(e.value, ctx_.working_digits())},
                            {"split_drift", residual_json(e.split_drift)},
                            {"terms_used", e.n_used}});
    }
    return Json{{"label", label},
                {"level", f.spec.level},
                {"weight", f.spec.weight},
                {"sign", *f.spec.sign},
                {"provenance", f.provenance},
                {"values", std::move(values)},
                {"verdict", ok ? "pass" : "fail"}};
  }

  Json lvalues_json() {
    Json forms = Json::array();
    bool ok = true;
    for (const auto& fc : cfg_.forms) {
      std::vector<int> s_list;
      for (int s = 1; s <= fc.spec.weight / 2; ++s) s_list.push_back(s);
      auto j = form_json(fc.spec.label, s_list);
      ok = ok && j["verdict"] == "pass";
      forms.push_back(std::move(j));
    }
    return Json{{"forms", std::move(forms)}, {"verdict", ok ? "pass" : "fail"}};
  }

  Json deligne_json() {
    const auto& rep = deligne();
    const int d = ctx_.working_digits();
    Json checks = Json::array();
    for (const auto& c : rep.checks) {
      checks.push_back(Json{{"name", c.name},
                            {"value", decimal_json(c.ratio, d)},
                            {"recognized", recognized_json(c.recognized, c.residual)},
                            {"verdict", c.pass ? "pass" : "fail"}});
    }
    auto factor = [](const std::optional<Rational>& q) { return q ? Json(to_string(*q)) : Json(nullptr); };
    Json out{{"attractor_periods", Json{{"c_plus", decimal_json(rep.att.plus, d)}, {"c_minus", decimal_json(rep.att.minus, d)}}},
             {"elliptic_periods", Json{{"c_plus", decimal_json(rep.ell.plus, d)}, {"c_minus", decimal_json(rep.ell.minus, d)}}},
             {"twisted", Json{{"att_2_plus", decimal_json(rep.att_q2_plus, d)},
                              {"att_1_plus", decimal_json(rep.att_q1_plus, d)},
                              {"ell_2_plus", decimal_json(rep.ell_q2_plus, d)},
                              {"ell_2_minus", decimal_json(rep.ell_q2_minus, d)}}},
             {"pairing_cross_check", Json{{"A_plus_factor", factor(cross_check_->first)},
                                         {"A_minus_factor", factor(cross_check_->second)}}},
             {"l_values", Json{{"L(f4,1)", decimal_json(lvalue(form_of_weight(4).spec.label, 1).value, d)},
                               {"L(f4,2)", decimal_json(lvalue(form_of_weight(4).spec.label, 2).value, d)},
                               {"L(f2,1)", decimal_json(lvalue(form_of_weight(2).spec.label, 1).value, d)}}},
             {"checks", std::move(checks)},
             {"v_perp", rep.v_perp ? decimal_json(*rep.v_perp, d) : Json(nullptr)},
             {"j_of_v_perp", rep.j_of_v_perp ? Json(to_string(*rep.j_of_v_perp)) : Json(nullptr)},
             {"lambda_note", rep.lambda_note},
             {"provenance", Json{{"periods", "continued jet, this run"},
                                 {"l_values", "smoothed functional-equation sums, this run"}}},
             {"verdict", rep.all_pass ? "pass" : "fail"}};
    return out;
  }

  Json elliptic_json() {
    const auto& el = elliptic();
    const int d = ctx_.working_digits();
    std::optional<Rational> cube;
    if (el.report.recognized_j) cube = rational_cube_root(*el.report.recognized_j);
    return Json{{"basis", Json{{"E1", charge_json(el.basis.E1)}, {"E2", charge_json(el.basis.E2)},
                               {"primitive", el.basis.primitive}}},
                {"one_form", combination_json(split().omega_ell)},
                {"tau", decimal_json(el.report.tau, d)},
                {"j", decimal_json(el.report.j, d)},
                {"recognized_j", recognized_json(el.report.recognized_j, el.j_residual)},
                {"j_cube_root", cube ? Json(to_string(*cube)) : Json(nullptr)},
                {"verdict", el.report.recognized_j ? "pass" : "fail"}};
  }

  /// All stages in order, plus the precision audit and verdicts.
  RunReport run() {
    RunReport out;
    Json stages = Json::object();
    stages["periods"] = periods_json();
    stages["attractor"] = attractor_json();
    stages["charge_search"] = search_json(cfg_.search_height);
    stages["split"] = split_json();
    stages["lvalues"] = lvalues_json();
    stages["deligne"] = deligne_json();
    stages["elliptic"] = elliptic_json();

    const bool j_agree = elliptic().report.recognized_j && deligne().j_of_v_perp &&
                         *elliptic().report.recognized_j == *deligne().j_of_v_perp;
    Json verdicts = Json::object();
    bool all = true;
    for (auto it = stages.begin(); it != stages.end(); ++it) {
      verdicts[it.key()] = it.value()["verdict"];
      all = all && it.value()["verdict"] == "pass";
    }
    verdicts["j_tau_equals_j_v_perp"] = j_agree ? "pass" : "fail";
    all = all && j_agree;

    out.all_pass = all;
    out.body = Json{{"schema", kReportSchema},
                    {"operator", Json{{"label", op_.label()}, {"hash", operator_hash()}}},
                    {"point", to_string(cfg_.point)},
                    {"digits", Json{{"working", ctx_.working_digits()}, {"guard", ctx_.guard_digits()}}},
                    {"stages", std::move(stages)},
                    {"precision_audit", precision_audit()},
                    {"verdicts", std::move(verdicts)},
                    {"all_pass", all}};
    out.timings = timings_;
    out.cache_events = cache_events_;
    return out;
  }

  Json precision_audit() {
    const int cap = ctx_.working_digits();
    Json checks = Json::array();
    int achieved = cap;
    auto add = [&](const std::string& name, const BigReal& residual) {
      const int a = achieved_digits(residual, cap);
      achieved = std::min(achieved, a);
      checks.push_back(Json{{"name", name}, {"residual", residual_json(residual)}, {"digits", a}});
    };
    BigReal att = ctx_.zero();
    for (const auto& c : attractor().coefficients) att = max(att, c.residual);
    add("attractor equations", att);
    const auto& r = split().relations;
    add("split relations", max(r.att_f0->residual, max(r.ell_f2->residual, r.ell_f1->residual)));
    BigReal drift = ctx_.zero();
    for (const auto& fc : cfg_.forms) {
      for (int s = 1; s <= fc.spec.weight / 2; ++s) drift = max(drift, lvalue(fc.spec.label, s).split_drift);
    }
    add("L-value split invariance", drift);
    BigReal ratio = ctx_.zero();
    for (size_t i = 0; i < 3 && i < deligne().checks.size(); ++i) ratio = max(ratio, deligne().checks[i].residual);
    add("Deligne ratios", ratio);
    add("j(tau) recognition, relative", elliptic().j_residual / max(abs(elliptic().report.j), ctx_.real(1)));
    return Json{{"requested_digits", cap},
                {"recognition_tolerance_digits", cap / 2},
                {"checks", std::move(checks)},
                {"achieved_digits", achieved}};
  }

 private:
  template <class F>
  void stage(const std::string& name, const std::string& hint, F&& body) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      body();
    } catch (const Error& e) {
      std::string msg = e.what();
      const auto pos = msg.find(": ");
      if (pos != std::string::npos) msg = msg.substr(pos + 2);
      throw Error(e.code(), "stage " + name + ": " + msg + " (hint: " + hint + ")");
    }
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    timings_.push_back({name, dt.count()});
  }

  PipelineConfig cfg_;
  PicardFuchsOperator op_;
  PrecisionContext ctx_;
  ResultCache cache_;
  std::ostream* log_;
  int frobenius_order_ = 0;

  std::optional<PeriodJet> jet_;
  std::optional<TransitionMatrix> s_;
  std::optional<AttractorCertificate> attractor_;
  std::optional<SplitStage> split_;
  std::map<std::string, FormData> forms_;
  std::map<std::string, LValueEntry> lvalues_;
  std::optional<DelignePeriodReport> deligne_;
  std::optional<std::pair<std::optional<Rational>, std::optional<Rational>>> cross_check_;
  std::optional<EllipticStage> elliptic_;
  std::vector<StageTiming> timings_;
  std::vector<std::string> cache_events_;
};

inline RunReport run_pipeline(const PipelineConfig& config, std::ostream* log = &std::cerr) {
  Pipeline p(config, log);
  return p.run();
}

}  // namespace rank2

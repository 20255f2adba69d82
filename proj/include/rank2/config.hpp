#pragma once

// JSON configuration: operator, family data, modular forms and the pipeline
// settings that tie them together. Every number is parsed exactly.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rank2/error.hpp"
#include "rank2/mirror_structure.hpp"
#include "rank2/modular_forms.hpp"
#include "rank2/numerics/rational.hpp"
#include "rank2/picard_fuchs.hpp"

namespace rank2 {

using Json = nlohmann::ordered_json;

namespace detail {

[[noreturn]] inline void malformed(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::MalformedConfig, where + ": " + what);
}

inline const Json& field(const Json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object()) malformed(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) malformed(where, "missing field '" + key + "'");
  return *it;
}

/// Integer literal or "p/q" string. Floats are refused: they have already lost exactness.
inline Rational json_rational(const Json& v, const std::string& where) {
  if (v.is_number_integer()) {
    return v.is_number_unsigned() ? Rational(Integer(std::to_string(v.get<unsigned long long>())))
                                  : Rational(Integer(std::to_string(v.get<long long>())));
  }
  if (v.is_number_float()) malformed(where, "floating-point literal " + v.dump() + "; write it as a \"p/q\" string");
  if (!v.is_string()) malformed(where, "expected an integer or a \"p/q\" string");
  try {
    return parse_rational(v.get<std::string>());
  } catch (const Error& e) {
    malformed(where, e.what());
  }
}

inline Integer json_integer(const Json& v, const std::string& where) {
  Rational q = json_rational(v, where);
  if (q.get_den() != 1) malformed(where, "expected an integer, got " + to_string(q));
  return q.get_num();
}

inline long json_long(const Json& v, const std::string& where) {
  Integer z = json_integer(v, where);
  if (!z.fits_slong_p()) malformed(where, "integer out of range");
  return z.get_si();
}

inline ChargeVector json_charge(const Json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 4) malformed(where, "expected 4 integers");
  ChargeVector out;
  for (size_t i = 0; i < 4; ++i) out[i] = json_integer(v[i], where + "[" + std::to_string(i) + "]");
  return out;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Json parse_json_text(const std::string& text, const std::string& where) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    malformed(where, e.what());
  }
}

}  // namespace detail

/// Builds the operator from {"label", "theta_coefficients": [R_0, ..., R_4]}.
inline PicardFuchsOperator load_operator(const Json& source) {
  const std::string where = "operator";
  const Json& label = detail::field(source, "label", where);
  if (!label.is_string()) detail::malformed(where + ".label", "expected a string");
  const Json& coeffs = detail::field(source, "theta_coefficients", where);
  if (!coeffs.is_array() || coeffs.size() != 5) {
    detail::malformed(where + ".theta_coefficients", "expected 5 coefficient lists R_0..R_4");
  }
  std::array<RationalPolynomial, 5> r;
  for (size_t i = 0; i < 5; ++i) {
    const std::string w = where + ".theta_coefficients[" + std::to_string(i) + "]";
    if (!coeffs[i].is_array()) detail::malformed(w, "expected a list of coefficients");
    for (size_t k = 0; k < coeffs[i].size(); ++k) {
      r[i].push_back(detail::json_rational(coeffs[i][k], w + "[" + std::to_string(k) + "]"));
    }
  }
  return PicardFuchsOperator(label.get<std::string>(), std::move(r));
}

/// Canonical form used for hashing: coefficients only, as trimmed "p/q" strings.
inline Json canonical_operator_json(const PicardFuchsOperator& op) {
  Json coeffs = Json::array();
  for (const auto& poly : op.coefficients()) {
    Json row = Json::array();
    for (const auto& c : poly) row.push_back(to_string(c));
    coeffs.push_back(std::move(row));
  }
  return Json{{"theta_coefficients", std::move(coeffs)}};
}

struct FamilyConfig {
  PrepotentialData prepotential;
  IntMatrix4 f_infinity;
  ChargeVector a_plus;
  ChargeVector a_minus;
  std::optional<EigenBasisOverride> eigen_basis;
};

inline FamilyConfig parse_family(const Json& j) {
  const std::string where = "family";
  FamilyConfig out;
  const Json& pre = detail::field(j, "prepotential", where);
  const std::string wp = where + ".prepotential";
  out.prepotential.Y111 = detail::json_integer(detail::field(pre, "Y111", wp), wp + ".Y111");
  if (out.prepotential.Y111 <= 0) detail::malformed(wp + ".Y111", "must be positive");
  out.prepotential.Y011 = detail::json_rational(detail::field(pre, "Y011", wp), wp + ".Y011");
  out.prepotential.Y001 = detail::json_rational(detail::field(pre, "Y001", wp), wp + ".Y001");
  out.prepotential.euler = detail::json_integer(detail::field(pre, "euler", wp), wp + ".euler");
  if (pre.contains("lambda")) {
    out.prepotential.lambda = detail::json_rational(pre["lambda"], wp + ".lambda");
    if (out.prepotential.lambda == 0) detail::malformed(wp + ".lambda", "must be nonzero");
  }
  const Json& f = detail::field(j, "f_infinity", where);
  if (!f.is_array() || f.size() != 4) detail::malformed(where + ".f_infinity", "expected a 4x4 integer matrix");
  for (size_t r = 0; r < 4; ++r) {
    out.f_infinity[r] = detail::json_charge(f[r], where + ".f_infinity[" + std::to_string(r) + "]");
  }
  const Json& ch = detail::field(j, "charges", where);
  out.a_plus = detail::json_charge(detail::field(ch, "A_plus", where + ".charges"), where + ".charges.A_plus");
  out.a_minus = detail::json_charge(detail::field(ch, "A_minus", where + ".charges"), where + ".charges.A_minus");
  if (j.contains("eigen_basis")) {
    const Json& eb = j["eigen_basis"];
    const std::string we = where + ".eigen_basis";
    auto pair = [&](const char* key) {
      const Json& v = detail::field(eb, key, we);
      if (!v.is_array() || v.size() != 2) detail::malformed(we + "." + key, "expected two vectors");
      return std::array<ChargeVector, 2>{detail::json_charge(v[0], we + "." + key + "[0]"),
                                         detail::json_charge(v[1], we + "." + key + "[1]")};
    };
    out.eigen_basis = EigenBasisOverride{pair("plus"), pair("minus")};
  }
  return out;
}

/// A modular form plus where its coefficients come from.
struct FormConfig {
  ModularFormSpec spec;
  std::map<long, long> eta_exponents;      // eta products
  unsigned long terms = 0;                 // eta products: coefficients to generate
  std::optional<std::array<long, 5>> cross_check_curve;  // a1, a2, a3, a4, a6
  unsigned long cross_check_p_max = 0;
  std::filesystem::path path;              // data files, resolved against the config directory
};

inline FormConfig parse_form(const Json& j, const std::filesystem::path& base_dir, size_t index) {
  const std::string where = "forms[" + std::to_string(index) + "]";
  FormConfig out;
  const Json& label = detail::field(j, "label", where);
  if (!label.is_string()) detail::malformed(where + ".label", "expected a string");
  out.spec.label = label.get<std::string>();
  out.spec.level = detail::json_long(detail::field(j, "level", where), where + ".level");
  out.spec.weight = static_cast<int>(detail::json_long(detail::field(j, "weight", where), where + ".weight"));
  if (out.spec.level < 1) detail::malformed(where + ".level", "must be positive");
  if (out.spec.weight < 2 || out.spec.weight % 2 != 0) detail::malformed(where + ".weight", "must be even and >= 2");
  if (j.contains("sign")) {
    long s = detail::json_long(j["sign"], where + ".sign");
    if (s != 1 && s != -1) detail::malformed(where + ".sign", "must be +1 or -1");
    out.spec.sign = static_cast<int>(s);
  }
  const Json& src = detail::field(j, "source", where);
  const std::string kind = src.is_string() ? src.get<std::string>() : "";
  if (kind == "eta-product") {
    out.spec.source = CoefficientSource::EtaProduct;
    const Json& eta = detail::field(j, "eta", where);
    if (!eta.is_object() || eta.empty()) detail::malformed(where + ".eta", "expected {\"d\": exponent, ...}");
    for (auto it = eta.begin(); it != eta.end(); ++it) {
      long d = 0;
      try {
        d = std::stol(it.key());
      } catch (const std::exception&) {
        detail::malformed(where + ".eta", "key '" + it.key() + "' is not an integer");
      }
      if (d < 1) detail::malformed(where + ".eta", "eta arguments must be positive");
      out.eta_exponents[d] = detail::json_long(it.value(), where + ".eta." + it.key());
    }
    out.terms = static_cast<unsigned long>(detail::json_long(detail::field(j, "terms", where), where + ".terms"));
    if (j.contains("cross_check")) {
      const Json& cc = j["cross_check"];
      const std::string wc = where + ".cross_check";
      const Json& a = detail::field(cc, "curve", wc);
      if (!a.is_array() || a.size() != 5) detail::malformed(wc + ".curve", "expected [a1, a2, a3, a4, a6]");
      std::array<long, 5> curve{};
      for (size_t i = 0; i < 5; ++i) curve[i] = detail::json_long(a[i], wc + ".curve");
      out.cross_check_curve = curve;
      out.cross_check_p_max = static_cast<unsigned long>(detail::json_long(detail::field(cc, "p_max", wc), wc + ".p_max"));
    }
  } else if (kind == "data-file") {
    out.spec.source = CoefficientSource::DataFile;
    const Json& p = detail::field(j, "path", where);
    if (!p.is_string()) detail::malformed(where + ".path", "expected a string");
    out.path = std::filesystem::path(p.get<std::string>());
    if (out.path.is_relative()) out.path = base_dir / out.path;
  } else {
    detail::malformed(where + ".source", "expected \"eta-product\" or \"data-file\"");
  }
  return out;
}

struct PipelineConfig {
  Json operator_json;  // as given, for load_operator
  FamilyConfig family;
  Rational point;
  int digits = 200;
  int guard_digits = 20;
  std::filesystem::path cache_dir;
  std::vector<FormConfig> forms;
  long search_height = 1000;
  Integer max_denominator = 1000000;
};

/// Rejects 0, rational roots of R_4 and points numerically on an irrational root.
inline void check_regular_point(const PicardFuchsOperator& op, const Rational& point) {
  if (point == 0) throw Error(ErrorCode::SingularPoint, "point 0 is the MUM point; choose a regular point");
  for (const auto& r : op.rational_singular_points()) {
    if (r == point) {
      throw Error(ErrorCode::SingularPoint, "point " + to_string(point) + " is a singular point of " + op.label());
    }
  }
  if (degree(op.irrational_factor()) > 0 && evaluate(op.irrational_factor(), point) == 0) {
    throw Error(ErrorCode::SingularPoint, "point " + to_string(point) + " is a root of R_4");
  }
}

inline void validate(const PipelineConfig& cfg) {
  if (cfg.digits < 50) throw Error(ErrorCode::InvalidPrecision, "digits must be >= 50, got " + std::to_string(cfg.digits));
  check_regular_point(load_operator(cfg.operator_json), cfg.point);
  if (cfg.search_height < 1) detail::malformed("search_height", "must be positive");
}

inline PipelineConfig parse_pipeline_config(const Json& j, const std::filesystem::path& base_dir) {
  PipelineConfig cfg;
  cfg.operator_json = detail::field(j, "operator", "config");
  cfg.family = parse_family(detail::field(j, "family", "config"));
  cfg.point = detail::json_rational(detail::field(j, "point", "config"), "point");
  cfg.digits = static_cast<int>(detail::json_long(detail::field(j, "digits", "config"), "digits"));
  if (j.contains("guard_digits")) cfg.guard_digits = static_cast<int>(detail::json_long(j["guard_digits"], "guard_digits"));
  if (j.contains("search_height")) cfg.search_height = detail::json_long(j["search_height"], "search_height");
  if (j.contains("max_denominator")) cfg.max_denominator = detail::json_integer(j["max_denominator"], "max_denominator");
  if (j.contains("cache_dir")) {
    if (!j["cache_dir"].is_string()) detail::malformed("cache_dir", "expected a string");
    cfg.cache_dir = std::filesystem::path(j["cache_dir"].get<std::string>());
    if (cfg.cache_dir.is_relative()) cfg.cache_dir = base_dir / cfg.cache_dir;
  }
  const Json& forms = detail::field(j, "forms", "config");
  if (!forms.is_array()) detail::malformed("forms", "expected a list");
  for (size_t i = 0; i < forms.size(); ++i) cfg.forms.push_back(parse_form(forms[i], base_dir, i));
  validate(cfg);
  return cfg;
}

/// Command-line overrides. The cache directory comes from the flag, else
/// ATTRACTOR_CACHE, else the config file.
inline void apply_overrides(PipelineConfig& cfg, const std::optional<int>& digits, const std::optional<std::string>& point,
                            const std::optional<std::string>& cache_dir) {
  if (digits) cfg.digits = *digits;
  if (point) {
    try {
      cfg.point = parse_rational(*point);
    } catch (const Error& e) {
      detail::malformed("--point", e.what());
    }
  }
  if (const char* env = std::getenv("ATTRACTOR_CACHE"); env && *env) cfg.cache_dir = env;
  if (cache_dir) cfg.cache_dir = *cache_dir;
  validate(cfg);
}

inline PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
  const Json j = detail::parse_json_text(detail::read_text(path), path.string());
  return parse_pipeline_config(j, path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

}  // namespace rank2

#pragma once

// Content-addressed cache for expensive intermediate results. Entries are JSON
// files named by the SHA-256 of their key; numbers inside are exact hex strings.

#include <openssl/evp.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "rank2/config.hpp"
#include "rank2/numerics/big.hpp"
#include "rank2/picard_fuchs.hpp"

namespace rank2 {

inline constexpr int kCacheSchema = 1;

inline std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::IoError, "SHA-256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

struct CacheKey {
  std::string stage;         // "jet", "lvalue", ...
  std::string content_hash;  // operator or coefficient-table hash
  std::string point;
  int digits = 0;
  std::string detail;        // anything else the value depends on (path, guard digits, ...)
  int schema = kCacheSchema;

  [[nodiscard]] Json to_json() const {
    return Json{{"schema", schema}, {"stage", stage}, {"content", content_hash},
                {"point", point},   {"digits", digits}, {"detail", detail}};
  }
  [[nodiscard]] std::string digest() const { return sha256_hex(to_json().dump()); }
};

/// Lookups never throw: unreadable or mismatched entries are misses, corrupt ones also warn.
class ResultCache {
 public:
  explicit ResultCache(std::filesystem::path dir, std::ostream* warnings = &std::cerr)
      : dir_(std::move(dir)), warn_(warnings) {}

  [[nodiscard]] const std::filesystem::path& dir() const noexcept { return dir_; }
  [[nodiscard]] bool enabled() const noexcept { return !dir_.empty(); }

  [[nodiscard]] std::filesystem::path entry_path(const CacheKey& key) const { return dir_ / (key.digest() + ".json"); }

  [[nodiscard]] std::optional<Json> lookup(const CacheKey& key) const {
    if (!enabled()) return std::nullopt;
    const auto path = entry_path(key);
    std::error_code ec;
    if (!std::filesystem::exists(path, ec)) return std::nullopt;
    Json entry;
    try {
      entry = Json::parse(detail::read_text(path));
    } catch (const std::exception& e) {
      warn("ignoring corrupt cache entry " + path.string() + ": " + e.what());
      return std::nullopt;
    }
    if (!entry.is_object() || !entry.contains("key") || !entry.contains("value")) {
      warn("ignoring corrupt cache entry " + path.string() + ": missing key or value");
      return std::nullopt;
    }
    if (entry["key"] != key.to_json()) return std::nullopt;
    return entry["value"];
  }

  /// Writes through a temporary file so readers never see a partial entry. Failures only warn.
  void store(const CacheKey& key, const Json& value) const {
    if (!enabled()) return;
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    const auto path = entry_path(key);
    const auto tmp = path.string() + ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) {
        warn("cannot write cache entry " + tmp);
        return;
      }
      out << Json{{"key", key.to_json()}, {"value", value}}.dump() << '\n';
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) warn("cannot move cache entry into place: " + ec.message());
  }

 private:
  void warn(const std::string& msg) const {
    if (warn_) *warn_ << "warning: " << msg << '\n';
  }

  std::filesystem::path dir_;
  std::ostream* warn_;
};

inline Json exact_json(const BigReal& x) { return x.to_exact_string(); }
inline Json exact_json(const BigComplex& z) { return Json::array({z.real().to_exact_string(), z.imag().to_exact_string()}); }

inline BigReal exact_real(const Json& j, mpfr_prec_t bits) {
  if (!j.is_string()) throw Error(ErrorCode::ParseError, "expected an exact hex string");
  return BigReal::parse(j.get<std::string>(), bits, 16);
}
inline BigComplex exact_complex(const Json& j, mpfr_prec_t bits) {
  if (!j.is_array() || j.size() != 2) throw Error(ErrorCode::ParseError, "expected [re, im]");
  return BigComplex(exact_real(j[0], bits), exact_real(j[1], bits));
}

inline Json jet_to_json(const PeriodJet& jet) {
  Json w = Json::array();
  for (const auto& row : jet.W) {
    Json r = Json::array();
    for (const auto& z : row) r.push_back(exact_json(z));
    w.push_back(std::move(r));
  }
  return Json{{"bits", jet.point.precision()}, {"point", exact_json(jet.point)}, {"W", std::move(w)}};
}

inline PeriodJet jet_from_json(const Json& j) {
  const auto bits = j.at("bits").get<mpfr_prec_t>();
  PeriodJet jet{exact_complex(j.at("point"), bits), {}};
  const Json& w = j.at("W");
  if (!w.is_array() || w.size() != 4) throw Error(ErrorCode::ParseError, "jet must have 4 rows");
  for (size_t k = 0; k < 4; ++k) {
    if (!w[k].is_array() || w[k].size() != 4) throw Error(ErrorCode::ParseError, "jet rows must have 4 entries");
    for (size_t i = 0; i < 4; ++i) jet.W[k][i] = exact_complex(w[k][i], bits);
  }
  return jet;
}

}  // namespace rank2

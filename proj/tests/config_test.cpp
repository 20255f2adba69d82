#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include <unistd.h>

#include "rank2/pipeline.hpp"

using namespace rank2;
namespace fs = std::filesystem;

namespace {

const fs::path kDataDir = RANK2_DATA_DIR;

Json shipped() { return Json::parse(detail::read_text(kDataDir / "aesz34.json")); }

PipelineConfig config_from(Json j, int digits = 60) {
  j["digits"] = digits;
  j.erase("cache_dir");
  return parse_pipeline_config(j, kDataDir);
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::IoError;
}

fs::path fresh_dir(const std::string& name) {
  fs::path d = fs::temp_directory_path() / ("rank2_config_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(d);
  return d;
}

}  // namespace

TEST(LoadOperator, ShippedConfigIsAesz34) {
  auto op = load_operator(shipped()["operator"]);
  EXPECT_EQ(op.label(), "AESZ34");
  const std::vector<Rational> expected{Rational(1, 25), Rational(1, 9), Rational(1)};
  EXPECT_EQ(op.rational_singular_points(), expected);
  EXPECT_EQ(degree(op.irrational_factor()), 0);
  // R_4 = (1 - 25 phi)(1 - 9 phi)(1 - phi).
  RationalPolynomial r4 = multiply(multiply({1, -25}, {1, -9}), {1, -1});
  EXPECT_EQ(op.coefficient(4), r4);
}

TEST(LoadOperator, RationalStringsAreExact) {
  Json j = shipped()["operator"];
  j["theta_coefficients"][0][1] = "-10/2";
  j["theta_coefficients"][1][2] = "123456789012345678901234567890123/123456789012345678901234567890123";
  auto op = load_operator(j);
  EXPECT_EQ(op.coefficient(0)[1], -5);
  EXPECT_EQ(op.coefficient(1)[2], 1);
  Json big = shipped()["operator"];
  big["theta_coefficients"][3][3] = "-1350000000000000000000000000000/1000000000000000000000000000";
  EXPECT_EQ(load_operator(big).coefficient(3)[3], -1350);
  big["theta_coefficients"][3][3] = "1/3";
  EXPECT_EQ(load_operator(big).coefficient(3)[3], Rational(1, 3));
}

TEST(LoadOperator, Rejections) {
  Json j = shipped()["operator"];
  Json floaty = j;
  floaty["theta_coefficients"][0][1] = -5.0;
  EXPECT_EQ(code_of([&] { load_operator(floaty); }), ErrorCode::MalformedConfig);
  Json four = j;
  four["theta_coefficients"].erase(4);
  EXPECT_EQ(code_of([&] { load_operator(four); }), ErrorCode::MalformedConfig);
  Json bad_den = j;
  bad_den["theta_coefficients"][2][1] = "1/0";
  EXPECT_EQ(code_of([&] { load_operator(bad_den); }), ErrorCode::MalformedConfig);
  Json decimal = j;
  decimal["theta_coefficients"][2][1] = "0.5";
  EXPECT_EQ(code_of([&] { load_operator(decimal); }), ErrorCode::MalformedConfig);
  Json non_mum = j;
  non_mum["theta_coefficients"][0][0] = 1;
  EXPECT_EQ(code_of([&] { load_operator(non_mum); }), ErrorCode::NonMUMOperator);
  Json no_label = j;
  no_label.erase("label");
  EXPECT_EQ(code_of([&] { load_operator(no_label); }), ErrorCode::MalformedConfig);
}

TEST(LoadOperator, Theta4) {
  Json j{{"label", "theta^4"}, {"theta_coefficients", Json::array({Json::array(), Json::array(), Json::array(),
                                                                    Json::array(), Json::array({1})})}};
  auto op = load_operator(j);
  EXPECT_TRUE(op.rational_singular_points().empty());
}

TEST(FamilyConfig, ShippedValues) {
  auto fam = parse_family(shipped()["family"]);
  EXPECT_EQ(fam.prepotential.Y111, 24);
  EXPECT_EQ(fam.prepotential.Y001, -2);
  EXPECT_EQ(fam.prepotential.euler, -16);
  EXPECT_EQ(fam.prepotential.lambda, 1);
  EXPECT_EQ(fam.a_plus, (ChargeVector{16, -60, 0, 5}));
  EXPECT_EQ(fam.a_minus, (ChargeVector{0, 0, 2, 1}));
  ASSERT_TRUE(fam.eigen_basis.has_value());
  EXPECT_EQ(fam.eigen_basis->plus[1], (ChargeVector{0, -12, 0, 1}));
  EXPECT_EQ(fam.f_infinity[1][3], -24);
}

TEST(FamilyConfig, Rejections) {
  Json j = shipped()["family"];
  Json y = j;
  y["prepotential"]["Y111"] = 0;
  EXPECT_EQ(code_of([&] { parse_family(y); }), ErrorCode::MalformedConfig);
  Json frac = j;
  frac["prepotential"]["euler"] = "-33/2";
  EXPECT_EQ(code_of([&] { parse_family(frac); }), ErrorCode::MalformedConfig);
  Json short_charge = j;
  short_charge["charges"]["A_plus"] = Json::array({16, -60, 0});
  EXPECT_EQ(code_of([&] { parse_family(short_charge); }), ErrorCode::MalformedConfig);
  Json lam = j;
  lam["prepotential"]["lambda"] = "0";
  EXPECT_EQ(code_of([&] { parse_family(lam); }), ErrorCode::MalformedConfig);
}

TEST(PipelineConfig, ShippedFileLoads) {
  auto cfg = load_pipeline_config(kDataDir / "aesz34.json");
  EXPECT_EQ(cfg.point, Rational(-1, 7));
  EXPECT_EQ(cfg.digits, 200);
  ASSERT_EQ(cfg.forms.size(), 2u);
  EXPECT_EQ(cfg.forms[0].spec.source, CoefficientSource::EtaProduct);
  EXPECT_EQ(cfg.forms[0].eta_exponents.size(), 4u);
  EXPECT_FALSE(cfg.forms[0].spec.sign.has_value());
  EXPECT_EQ(cfg.forms[1].path, kDataDir / "14.4.a.a.txt");
  EXPECT_TRUE(fs::exists(cfg.forms[1].path));
}

TEST(PipelineConfig, SingularAndLowPrecisionRejected) {
  Json j = shipped();
  j["point"] = "1/25";
  EXPECT_EQ(code_of([&] { config_from(j); }), ErrorCode::SingularPoint);
  j["point"] = 0;
  EXPECT_EQ(code_of([&] { config_from(j); }), ErrorCode::SingularPoint);
  j["point"] = "1/9";
  EXPECT_EQ(code_of([&] { config_from(j); }), ErrorCode::SingularPoint);
  j["point"] = "-1/7";
  EXPECT_EQ(code_of([&] { config_from(j, 40); }), ErrorCode::InvalidPrecision);
  j["point"] = -0.142857;
  EXPECT_EQ(code_of([&] { config_from(j); }), ErrorCode::MalformedConfig);
}

TEST(PipelineConfig, OverridesAndEnvironment) {
  auto cfg = config_from(shipped());
  ::unsetenv("ATTRACTOR_CACHE");
  apply_overrides(cfg, 80, std::string("-1/5"), std::nullopt);
  EXPECT_EQ(cfg.digits, 80);
  EXPECT_EQ(cfg.point, Rational(-1, 5));
  EXPECT_TRUE(cfg.cache_dir.empty());
  ::setenv("ATTRACTOR_CACHE", "/tmp/from-env", 1);
  apply_overrides(cfg, std::nullopt, std::nullopt, std::nullopt);
  EXPECT_EQ(cfg.cache_dir, fs::path("/tmp/from-env"));
  apply_overrides(cfg, std::nullopt, std::nullopt, std::string("/tmp/from-flag"));
  EXPECT_EQ(cfg.cache_dir, fs::path("/tmp/from-flag"));
  ::unsetenv("ATTRACTOR_CACHE");
  EXPECT_EQ(code_of([&] { apply_overrides(cfg, std::nullopt, std::string("1/25"), std::nullopt); }),
            ErrorCode::SingularPoint);
  EXPECT_EQ(code_of([&] { apply_overrides(cfg, std::nullopt, std::string("0.1"), std::nullopt); }),
            ErrorCode::MalformedConfig);
}

TEST(Cache, StoreThenLookupIsExact) {
  const auto dir = fresh_dir("roundtrip");
  ResultCache cache(dir, nullptr);
  PrecisionContext ctx(80, 20);
  PeriodJet jet{to_complex(Rational(-1, 7), ctx), {}};
  for (size_t k = 0; k < 4; ++k)
    for (size_t j = 0; j < 4; ++j)
      jet.W[k][j] = BigComplex(ctx.real(Rational(static_cast<long>(k * 7 + 1), static_cast<long>(j + 3))),
                               -sqrt(ctx.real(static_cast<long>(k + j + 2))));
  CacheKey key{"jet", "abc", "-1/7", 80, "guard=20"};
  EXPECT_FALSE(cache.lookup(key).has_value());
  cache.store(key, jet_to_json(jet));
  auto hit = cache.lookup(key);
  ASSERT_TRUE(hit.has_value());
  PeriodJet back = jet_from_json(*hit);
  for (size_t k = 0; k < 4; ++k) {
    for (size_t j = 0; j < 4; ++j) {
      EXPECT_EQ(back.W[k][j].real().to_string(80), jet.W[k][j].real().to_string(80));
      EXPECT_EQ(back.W[k][j].imag().to_exact_string(), jet.W[k][j].imag().to_exact_string());
    }
  }
  fs::remove_all(dir);
}

TEST(Cache, SchemaDigitsAndContentMisses) {
  const auto dir = fresh_dir("miss");
  ResultCache cache(dir, nullptr);
  CacheKey key{"lvalue", "hash", "s=1", 200, ""};
  cache.store(key, Json{{"value", "0.1@0"}});
  ASSERT_TRUE(cache.lookup(key).has_value());
  CacheKey bumped = key;
  bumped.schema = kCacheSchema + 1;
  EXPECT_FALSE(cache.lookup(bumped).has_value());
  CacheKey digits = key;
  digits.digits = 100;
  EXPECT_FALSE(cache.lookup(digits).has_value());
  CacheKey other = key;
  other.content_hash = "other";
  EXPECT_FALSE(cache.lookup(other).has_value());
  // An entry stored under a digest whose recorded key differs is not trusted.
  fs::copy_file(cache.entry_path(key), cache.entry_path(digits));
  EXPECT_FALSE(cache.lookup(digits).has_value());
  fs::remove_all(dir);
}

TEST(Cache, CorruptEntryWarnsAndMisses) {
  const auto dir = fresh_dir("corrupt");
  std::ostringstream warnings;
  ResultCache cache(dir, &warnings);
  CacheKey key{"jet", "h", "-1/7", 60, ""};
  cache.store(key, Json{{"x", 1}});
  {
    std::ofstream f(cache.entry_path(key), std::ios::trunc);
    f << "{\"key\": [truncated";
  }
  EXPECT_FALSE(cache.lookup(key).has_value());
  EXPECT_NE(warnings.str().find("corrupt"), std::string::npos);
  // A disabled cache never hits and never writes.
  ResultCache off{fs::path()};
  off.store(key, Json{{"x", 1}});
  EXPECT_FALSE(off.lookup(key).has_value());
  fs::remove_all(dir);
}

TEST(Cache, DigestIsStable) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CacheKey a{"jet", "h", "-1/7", 200, "guard=20"};
  CacheKey b = a;
  EXPECT_EQ(a.digest(), b.digest());
  b.point = "-1/5";
  EXPECT_NE(a.digest(), b.digest());
}

TEST(RunPipeline, DeterministicAndCacheTransparent) {
  const auto dir = fresh_dir("run");
  auto cfg = config_from(shipped(), 80);
  const auto cold_uncached = run_pipeline(cfg, nullptr);
  cfg.cache_dir = dir;
  const auto first = run_pipeline(cfg, nullptr);
  const auto second = run_pipeline(cfg, nullptr);
  EXPECT_EQ(first.text(), cold_uncached.text());
  EXPECT_EQ(first.text(), second.text());
  EXPECT_TRUE(first.all_pass);
  ASSERT_FALSE(second.cache_events.empty());
  for (const auto& e : first.cache_events) EXPECT_NE(e.find("miss"), std::string::npos) << e;
  for (const auto& e : second.cache_events) EXPECT_NE(e.find("hit"), std::string::npos) << e;
  // Timings are reported but kept out of the deterministic body.
  EXPECT_FALSE(first.timings.empty());
  EXPECT_EQ(first.text().find("seconds"), std::string::npos);
  fs::remove_all(dir);
}

TEST(RunPipeline, ReportShape) {
  auto cfg = config_from(shipped(), 80);
  const auto rep = run_pipeline(cfg, nullptr);
  const Json& b = rep.body;
  EXPECT_EQ(b["point"], "-1/7");
  EXPECT_EQ(b["stages"]["elliptic"]["recognized_j"]["value"], "9938375/21952");
  EXPECT_EQ(b["stages"]["elliptic"]["j_cube_root"], "215/28");
  EXPECT_EQ(b["verdicts"]["deligne"], "pass");
  EXPECT_EQ(b["precision_audit"]["requested_digits"], 80);
  EXPECT_GE(b["precision_audit"]["achieved_digits"].get<int>(), 70);
  // Every value object carries its digit count; every recognized rational carries a residual.
  std::function<void(const Json&)> walk = [&](const Json& node) {
    if (node.is_object()) {
      if (node.contains("re") || (node.contains("value") && node["value"].is_string() && !node.contains("residual") &&
                                  node["value"].get<std::string>().find('e') != std::string::npos)) {
        EXPECT_TRUE(node.contains("digits")) << node.dump();
      }
      if (node.contains("value") && node.contains("residual")) EXPECT_TRUE(node["residual"].contains("digits"));
      for (const auto& [k, v] : node.items()) walk(v);
    } else if (node.is_array()) {
      for (const auto& v : node) walk(v);
    }
  };
  walk(b);
}

TEST(RunPipeline, StageErrorsNameTheStage) {
  Json j = shipped();
  j["family"]["charges"]["A_minus"] = Json::array({32, -120, 0, 10});
  auto cfg = config_from(j, 60);
  try {
    run_pipeline(cfg, nullptr);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DependentCharges);
    EXPECT_NE(std::string(e.what()).find("stage attractor"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("hint:"), std::string::npos);
  }
}

TEST(RunPipeline, EtaMismatchAborts) {
  Json j = shipped();
  // eta(tau)^2 eta(11 tau)^2 is the level-11 form; its a(p) disagree with the level-14 curve.
  j["forms"][0]["eta"] = Json{{"1", 2}, {"11", 2}};
  Pipeline p(config_from(j, 60), nullptr);
  try {
    p.form("14.2.a.a");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ValidationError);
    EXPECT_NE(std::string(e.what()).find("point counts"), std::string::npos) << e.what();
  }
}

TEST(RunPipeline, ConfiguredSignMustAgree) {
  Json j = shipped();
  j["forms"][1]["sign"] = -1;
  Pipeline p(config_from(j, 60), nullptr);
  EXPECT_EQ(code_of([&] { p.form("14.4.a.a"); }), ErrorCode::ValidationError);
}

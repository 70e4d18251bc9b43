#include <gtest/gtest.h>

#include <cmath>

#include "rampart/ecc_model.hpp"
#include "rampart/error.hpp"

namespace rampart::ecc {
namespace {

TEST(Ecc, CombineOrdersBySeverity) {
  EXPECT_EQ(combine(OutcomeClass::clean, OutcomeClass::corrected), OutcomeClass::corrected);
  EXPECT_EQ(combine(OutcomeClass::sdc, OutcomeClass::corrected), OutcomeClass::sdc);
  EXPECT_EQ(combine(OutcomeClass::sdc, OutcomeClass::detected_ue), OutcomeClass::detected_ue);
  EXPECT_EQ(combine(OutcomeClass::clean, OutcomeClass::clean), OutcomeClass::clean);
}

TEST(Ecc, BuiltinsAreConsistent) {
  for (const auto& cfg : builtin_configs()) {
    EXPECT_NO_THROW(cfg.validate()) << cfg.name;
    EXPECT_EQ(cfg.t, (cfg.n - cfg.k) / 2) << cfg.name;
  }
  EXPECT_EQ(builtin_config("rs40_32").devices(), 10u);
  EXPECT_EQ(builtin_config("rs10_8").devices(), 10u);
  EXPECT_THROW(builtin_config("rs255_223"), ConfigError);
}

TEST(Ecc, RejectsMissingBands) {
  EccConfig cfg = builtin_config("rs10_8");
  cfg.miscorrection.clear();
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = builtin_config("rs10_8");
  cfg.t = 5;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Ecc, UndetectedProbabilityReusesLastBand) {
  const EccConfig cfg = builtin_config("rs10_8");
  EXPECT_DOUBLE_EQ(cfg.undetected_probability(2), 0.53);
  EXPECT_DOUBLE_EQ(cfg.undetected_probability(7), 0.59);
  EXPECT_DOUBLE_EQ(cfg.undetected_probability(40), 0.59);
}

TEST(Ecc, WithinCapabilityCorrectsWithoutDrawing) {
  const EccConfig cfg = builtin_config("rs40_32");
  Rng rng(1), untouched(1);
  const auto one = device_error_pattern(cfg, 3);
  EXPECT_EQ(one.total(), 4u);
  EXPECT_EQ(one.devices_with_errors(), 1u);
  const auto out = decode(cfg, one, rng);
  EXPECT_EQ(out.cls, OutcomeClass::corrected);
  EXPECT_EQ(out.corrected_symbols, 4u);
  EXPECT_EQ(decode(cfg, empty_pattern(cfg), rng).cls, OutcomeClass::clean);
  EXPECT_EQ(rng(), untouched());
}

TEST(Ecc, PartialFlipsSpreadOverSymbols) {
  const EccConfig cfg = builtin_config("rs40_32");
  EXPECT_EQ(device_error_pattern(cfg, 0, 1).total(), 1u);
  EXPECT_EQ(device_error_pattern(cfg, 0, 3).total(), 3u);
  EXPECT_EQ(device_error_pattern(cfg, 0, 64).total(), 4u);
  const auto p = device_error_pattern(cfg, 9, 2);
  for (unsigned s : p.per_device[9]) {
    EXPECT_GE(s, 36u);
    EXPECT_LT(s, 40u);
  }
}

TEST(Ecc, TwoDeviceAccessIsNeverCorrected) {
  Rng rng(3);
  const EccConfig cfg = builtin_config("rs40_32");
  const unsigned devs[] = {1, 4};
  for (int i = 0; i < 1000; ++i) {
    const auto cls = decode_access(cfg, devs, rng);
    EXPECT_TRUE(cls == OutcomeClass::detected_ue || cls == OutcomeClass::sdc);
  }
  const unsigned one[] = {7};
  EXPECT_EQ(decode_access(cfg, one, rng), OutcomeClass::corrected);
}

TEST(Ecc, TwoSymbolDetectionRateMatchesCalibration) {
  const EccConfig cfg = builtin_config("rs10_8");
  auto pattern = device_error_pattern(cfg, 2);
  merge(pattern, device_error_pattern(cfg, 6));
  ASSERT_EQ(pattern.total(), 2u);
  Rng rng(99);
  const int n = 200000;
  int detected = 0;
  for (int i = 0; i < n; ++i) detected += decode(cfg, pattern, rng).cls == OutcomeClass::detected_ue;
  const double rate = static_cast<double>(detected) / n;
  EXPECT_NEAR(rate, 0.47, 3.0 * std::sqrt(0.47 * 0.53 / n));
}

TEST(Ecc, ScrubOverheadForDailyTebibyte) {
  const auto s = scrub_overhead(1099511627776.0, 86400.0);
  EXPECT_DOUBLE_EQ(s.rate_bytes_per_s, 2.0 * 1099511627776.0 / 86400.0);
  EXPECT_NEAR(s.rate_bytes_per_s / 1e6, 25.45, 0.005);
  EXPECT_NEAR(s.fraction * 100.0, 0.0568, 0.00005);
}

}  // namespace
}  // namespace rampart::ecc

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <tuple>

#include "rampart/error.hpp"
#include "rampart/lfsr.hpp"
#include "rampart/mitigation_engine.hpp"

namespace rampart::mitigation {
namespace {

TEST(Lfsr, DefaultTapsAreMaximal) {
  EXPECT_EQ(Lfsr16().period(), 65535u);
  EXPECT_THROW(Lfsr16(0), ConfigError);
  EXPECT_THROW(Lfsr16(1, 0), ConfigError);
}

TEST(Lfsr, AdvanceMatchesStepping) {
  for (std::uint64_t cycles : {0ull, 1ull, 17ull, 65535ull, 70000ull, 1234567ull}) {
    Lfsr16 a, b;
    a.advance(cycles);
    for (std::uint64_t i = 0; i < cycles; ++i) b.step();
    EXPECT_EQ(a.state(), b.state()) << cycles;
  }
  // Non-maximal taps fall back to stepping.
  Lfsr16 a(0x1234, 0x0003), b(0x1234, 0x0003);
  a.advance(1000);
  for (int i = 0; i < 1000; ++i) b.step();
  EXPECT_EQ(a.state(), b.state());
}

TEST(Lfsr, BankViewsAreDistinct) {
  std::set<std::tuple<std::uint16_t, std::uint16_t, std::uint16_t>> views;
  for (unsigned bank = 0; bank < 32; ++bank)
    views.emplace(arrange_bits(0x0001, bank), arrange_bits(0x0003, bank), arrange_bits(0xACE1, bank));
  EXPECT_EQ(views.size(), 32u);
}

TEST(VictimLevels, DistributionIsExact) {
  const auto d = victim_level_distribution(16, 2);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d[0], 15.0 / 16.0);
  EXPECT_EQ(d[1], 1.0 / 16.0);
  for (unsigned n : {2u, 8u, 24u, 100u}) {
    for (unsigned vl = 1; vl <= 5; ++vl) {
      double sum = 0.0;
      for (double p : victim_level_distribution(n, vl)) sum += p;
      EXPECT_NEAR(sum, 1.0, 1e-12);
    }
  }
}

TEST(VictimLevels, RequiredLevels) {
  EXPECT_EQ(required_victim_levels(16, 689655), 4u);
  EXPECT_EQ(required_victim_levels(16, 256), 1u);
  EXPECT_EQ(required_victim_levels(16, 257), 2u);
  EXPECT_EQ(required_victim_levels(2, 1u << 20), 19u);
  // Brute force: smallest VL with N^(VL+1) >= APR.
  for (std::uint64_t n : {2ull, 3ull, 7ull, 24ull}) {
    for (std::uint64_t apr : {1ull, 5ull, 100ull, 4096ull, 689655ull}) {
      unsigned vl = 1;
      while (std::pow(static_cast<double>(n), vl + 1) < static_cast<double>(apr)) ++vl;
      EXPECT_EQ(required_victim_levels(n, apr), vl) << n << " " << apr;
    }
  }
}

TEST(Bac, CountsCreditsAndLimits) {
  BankActivateCounters bac(2, 4);
  for (int i = 0; i < 8; ++i) bac.activate(0);
  EXPECT_TRUE(bac.at_limit(0));
  EXPECT_THROW(bac.activate(0), ContractViolation);
  bac.credit(0);
  EXPECT_EQ(bac.value(0), 4u);
  bac.activate(1);
  bac.credit(1);
  EXPECT_EQ(bac.value(1), 0u);
}

TEST(MitigationState, RfmWithoutCaptureIsProtocolError) {
  MitigationConfig cfg;
  cfg.raaimt = 4;
  MitigationState st(cfg, 1, 1);
  Rng rng(1);
  EXPECT_THROW(st.issue_rfm(0, rng), ProtocolError);
}

TEST(MitigationState, SignalsAtRaaimtAndCapturesWindowRow) {
  MitigationConfig cfg;
  cfg.scheme = Scheme::brc;
  cfg.raaimt = 8;
  cfg.keep_window_rows = true;
  MitigationState st(cfg, 2, 5);
  Rng rng(2);
  for (int w = 0; w < 50; ++w) {
    for (unsigned i = 0; i < 8; ++i) {
      const auto due = st.record_activate(1, 100 + i);
      EXPECT_EQ(due.has_value(), i == 7);
    }
    const unsigned idx = st.bank(1).sample.target_index;
    const RfmResult r = st.issue_rfm(1, rng);
    EXPECT_EQ(r.target_row, 100 + idx);
    EXPECT_EQ(r.levels.front(), 1u);
    EXPECT_DOUBLE_EQ(r.duration_ns, 240.0);
    EXPECT_EQ(st.bac(1), 0u);
  }
  EXPECT_EQ(st.bac(0), 0u);
}

TEST(MitigationState, NoneNeverSignals) {
  MitigationConfig cfg;
  cfg.scheme = Scheme::none;
  MitigationState st(cfg, 1, 1);
  for (int i = 0; i < 1000; ++i) EXPECT_FALSE(st.record_activate(0, 3));
  EXPECT_TRUE(st.can_activate(0));
}

TEST(MitigationState, BlocksAtBacLimit) {
  MitigationConfig cfg;
  cfg.raaimt = 4;
  MitigationState st(cfg, 1, 1);
  for (int i = 0; i < 8; ++i) st.record_activate(0, 1);
  EXPECT_FALSE(st.can_activate(0));
  EXPECT_THROW(st.record_activate(0, 1), ContractViolation);
}

TEST(RefreshedRows, LevelsMapThroughDevice) {
  RfmResult r{0, 0x0001, {2}, 130.0};
  const auto rows = refreshed_rows(r, remap::DeviceMap(1, 16, 1));
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].first.value, 0u);
  EXPECT_EQ(rows[1].first.value, 4u);
  EXPECT_EQ(rows[0].second, 2u);
}

TEST(MitigationConfig, Validates) {
  MitigationConfig cfg;
  cfg.raaimt = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.raaimt = kMaxRaaimt + 1;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.raaimt = 16;
  cfg.brc_ratio = 1.5;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

}  // namespace
}  // namespace rampart::mitigation

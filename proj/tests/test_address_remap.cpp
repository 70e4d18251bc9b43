#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "oracles.hpp"
#include "rampart/address_remap.hpp"
#include "rampart/error.hpp"

namespace rampart::remap {
namespace {

RankGeometry with_shifts(const std::vector<unsigned>& shifts, unsigned width, unsigned radius = 1) {
  RankGeometry g{static_cast<unsigned>(shifts.size()), 0, width, 1, radius, {}};
  for (unsigned d = 0; d < shifts.size(); ++d) g.device_maps.emplace_back(d, width, shifts[d]);
  return g;
}

TEST(DeviceMap, RotatesLeftByShift) {
  EXPECT_EQ(DeviceMap(2, 16, 2).map_row({0x8000, 16}).value, 0x0002u);
  for (unsigned s = 0; s < 3; ++s) {
    const DeviceMap dev(s, 16, s);
    EXPECT_EQ(dev.map_row({0x0000, 16}).value, 0x0000u);
    EXPECT_EQ(dev.map_row({0x0001, 16}).value, 1u << s);
  }
}

TEST(DeviceMap, VictimsDifferPerDevice) {
  const auto v0 = victim_addresses({0x0001, 16}, DeviceMap(0, 16, 0), 1);
  const auto v1 = victim_addresses({0x0001, 16}, DeviceMap(1, 16, 1), 1);
  ASSERT_EQ(v0.size(), 2u);
  ASSERT_EQ(v1.size(), 2u);
  EXPECT_EQ(v0[0].value, 0x0000u);
  EXPECT_EQ(v0[1].value, 0x0002u);
  EXPECT_EQ(v1[0].value, 0x8000u);
  EXPECT_EQ(v1[1].value, 0x8001u);
}

TEST(DeviceMap, MatchesOracleRotation) {
  std::mt19937 rng(5);
  for (unsigned width : {4u, 9u, 16u, 20u}) {
    for (unsigned shift = 0; shift < width; ++shift) {
      const DeviceMap dev(0, width, shift);
      for (int i = 0; i < 200; ++i) {
        const std::uint32_t a = rng() & ((1u << width) - 1);
        EXPECT_EQ(dev.map_row({a, width}).value, oracle::rotl(a, shift, width));
      }
    }
  }
}

// Property: every map is a bijection and inverse_map undoes it.
TEST(DeviceMap, IsBijectionForAllKinds) {
  for (RemapKind kind : {RemapKind::rotate, RemapKind::lfsr}) {
    for (unsigned shift : {0u, 1u, 5u, 11u}) {
      const DeviceMap dev(0, 12, shift, kind);
      std::vector<bool> seen(dev.row_count(), false);
      for (std::uint32_t a = 0; a < dev.row_count(); ++a) {
        const InternalRow r = dev.map_row({a, 12});
        ASSERT_LT(r.value, dev.row_count());
        EXPECT_FALSE(seen[r.value]);
        seen[r.value] = true;
        EXPECT_EQ(dev.inverse_map(r).value, a);
      }
    }
  }
}

TEST(DeviceMap, RepairsMoveRowsToSpares) {
  DeviceMap dev(0, 8, 3, RemapKind::rotate, 4);
  dev.add_repair(10, 2);
  const std::uint32_t addr = dev.unpermute(10);
  EXPECT_EQ(dev.map_row({addr, 8}).value, 256u + 2u);
  EXPECT_TRUE(dev.is_spare(dev.map_row({addr, 8})));
  EXPECT_FALSE(dev.holds_data({10}));
  EXPECT_FALSE(dev.holds_data({256 + 1}));
  EXPECT_THROW(dev.inverse_map({10}), RemapError);
  EXPECT_THROW(dev.inverse_map({256 + 0}), RemapError);
  EXPECT_EQ(dev.inverse_map({256 + 2}).value, addr);
  EXPECT_THROW(dev.add_repair(10, 3), ConfigError);
  EXPECT_THROW(dev.add_repair(11, 2), ConfigError);
  EXPECT_THROW(dev.add_repair(11, 4), ConfigError);
}

TEST(DeviceMap, NeighborsStayInRegion) {
  DeviceMap dev(0, 4, 0, RemapKind::rotate, 3);
  dev.add_repair(15, 0);
  dev.add_repair(3, 1);
  EXPECT_FALSE(dev.neighbor({0}, -1));
  EXPECT_FALSE(dev.neighbor({14}, 1));  // 15 retired
  EXPECT_FALSE(dev.neighbor({2}, 1));   // 3 retired
  ASSERT_TRUE(dev.neighbor({16}, 1));
  EXPECT_EQ(dev.neighbor({16}, 1)->value, 17u);
  EXPECT_FALSE(dev.neighbor({17}, 1));  // spare 2 unused
  EXPECT_FALSE(dev.neighbor({16}, -1));
}

TEST(Verify, ShiftByIdMatchesBruteForce) {
  const auto rank = RankGeometry::shift_by_id(8, 2, 16, 32, 1);
  const auto report = verify_unique_neighbors(rank, 1);
  std::vector<unsigned> shifts(10);
  for (unsigned d = 0; d < 10; ++d) shifts[d] = d;
  EXPECT_EQ(report.to_json(), oracle::uniqueness_json(shifts, 16, 1));
  EXPECT_TRUE(report.clean());
  EXPECT_EQ(report.status, VerificationStatus::verified);
}

TEST(Verify, IdenticalShiftsReportEveryPair) {
  const auto report = verify_unique_neighbors(with_shifts({0, 0, 0}, 10), 1);
  EXPECT_EQ(report.violations.size(), 1023u);
  EXPECT_EQ(report.to_json(), oracle::uniqueness_json({0, 0, 0}, 10, 1));
  EXPECT_EQ(report.violations.front().devices, (std::vector<unsigned>{0, 1, 2}));
}

// Property: random shift sets and radii agree with the oracle byte for byte.
TEST(Verify, RandomShiftSetsMatchOracle) {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 25; ++trial) {
    const unsigned width = 4 + rng() % 9;
    const unsigned devices = 2 + rng() % 6;
    const unsigned radius = 1 + rng() % 3;
    std::vector<unsigned> shifts(devices);
    for (auto& s : shifts) s = rng() % width;
    const auto report = verify_unique_neighbors(with_shifts(shifts, width, radius), radius);
    EXPECT_EQ(report.to_json(), oracle::uniqueness_json(shifts, width, radius))
        << "width " << width << " radius " << radius;
  }
}

TEST(Verify, RandomRepairTablesMatchOracle) {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 25; ++trial) {
    const unsigned width = 6 + rng() % 5;
    const unsigned devices = 3 + rng() % 4;
    const unsigned radius = 1 + rng() % 2;
    std::vector<unsigned> shifts(devices);
    std::vector<std::uint32_t> spares(devices, 8);
    std::vector<oracle::Repair> repairs;
    RankGeometry g{devices, 0, width, 1, radius, {}};
    for (unsigned d = 0; d < devices; ++d) {
      shifts[d] = d % width;
      DeviceMap dev(d, width, shifts[d], RemapKind::rotate, spares[d]);
      std::set<std::uint32_t> rows, used;
      const unsigned n = rng() % 6;
      while (rows.size() < n) {
        const std::uint32_t row = rng() % (1u << width);
        std::uint32_t spare = rng() % spares[d];
        if (rows.count(row) || used.count(spare)) continue;
        rows.insert(row);
        used.insert(spare);
        dev.add_repair(row, spare);
        repairs.push_back({d, row, spare});
      }
      g.device_maps.push_back(dev);
    }
    const auto report = verify_unique_neighbors(g, radius);
    EXPECT_EQ(report.to_json(), oracle::uniqueness_json(shifts, width, radius, spares, repairs));
  }
}

TEST(Verify, WorkerCountDoesNotChangeResult) {
  const auto rank = with_shifts({0, 1, 1, 3, 0}, 12);
  VerifyOptions one, four;
  four.workers = 4;
  EXPECT_EQ(verify_unique_neighbors(rank, 1, one).to_json(),
            verify_unique_neighbors(rank, 1, four).to_json());
}

TEST(Verify, SamplesAboveCap) {
  VerifyOptions opt;
  opt.exhaustive_width_cap = 8;
  opt.sample_addresses = 512;
  const auto report = verify_unique_neighbors(with_shifts({0, 1, 2}, 12), 1, opt);
  EXPECT_EQ(report.status, VerificationStatus::sampled);
  opt.sample_addresses = 0;
  EXPECT_EQ(verify_unique_neighbors(with_shifts({0, 1, 2}, 12), 1, opt).status,
            VerificationStatus::not_verified);
}

TEST(Verify, ToJsonTruncatesListOnly) {
  const auto report = verify_unique_neighbors(with_shifts({0, 0}, 6), 1);
  const std::string j = report.to_json(2);
  EXPECT_NE(j.find("\"violation_count\":63"), std::string::npos);
  EXPECT_NE(j.find("\"violations\":[[0,1,[0,1]],[1,2,[0,1]]]"), std::string::npos);
}

TEST(Verify, RejectsBadGeometry) {
  RankGeometry g = with_shifts({0, 1}, 8);
  g.device_maps.pop_back();
  EXPECT_THROW(verify_unique_neighbors(g, 1), ConfigError);
  EXPECT_THROW(verify_unique_neighbors(with_shifts({0, 1}, 8), 0), ConfigError);
}

TEST(Shielding, FlagsCrowdedSpares) {
  DeviceMap dev(0, 8, 0, RemapKind::rotate, 8);
  dev.add_repair(5, 0);
  dev.add_repair(9, 2);
  EXPECT_TRUE(check_repair_shielding(dev, 1).shielded);
  EXPECT_FALSE(check_repair_shielding(dev, 2).shielded);
  dev.add_repair(20, 3);
  const auto r = check_repair_shielding(dev, 1);
  EXPECT_FALSE(r.shielded);
  ASSERT_EQ(r.crowded_spares.size(), 1u);
  EXPECT_EQ(r.crowded_spares[0], std::make_pair(2u, 3u));
}

}  // namespace
}  // namespace rampart::remap

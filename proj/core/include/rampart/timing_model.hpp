#pragma once

// Bank-level timing model of one DDR5 channel for RFM bandwidth overhead.
//
// Column commands honour tCCD_L, tCCD_L_WR and tWTR_L within a bank group;
// the data bus honours tWTR_S and a two-clock read-to-write bubble.
//
// A 32-deep request buffer is kept full. Each pick takes the request whose
// data burst can start earliest on the single shared data bus (row hits win
// ties, then age). Commands are placed just in time for that burst. Rows are
// precharged after an access unless another buffered request hits the same
// row. An RFM becomes due at the precharge that closes the RAAIMT-th
// activate. Same-bank refresh hits one bank set (the same bank index in every
// bank group) of a rank every tREFIsb. When any bank of a set reaches RAAIMT
// activates, one same-bank RFM blocks the whole set for tDRFMsb and credits
// every bank of the set.

#include <cstdint>
#include <string>
#include <vector>

#include "rampart/mitigation_engine.hpp"
#include "rampart/timing_params.hpp"

namespace rampart::timing {

enum class Workload { rand, hamr };

std::string to_string(Workload w);
Workload workload_from_string(const std::string& name);

struct BandwidthConfig {
  TimingParams timing;
  unsigned ranks = 2;
  unsigned bank_groups = 8;
  unsigned banks_per_group = 4;
  unsigned queue_depth = 32;
  std::uint32_t rows_per_bank = 65536;
  unsigned lines_per_row = 128;  // 64-byte lines in an 8 KiB row
  double write_fraction = 1.0 / 3.0;
  double hot_fraction = 0.2;  // hamR share aimed at one row
  double warmup_ns = 50'000.0;
  double duration_ns = 8'000'000.0;
  std::uint64_t seed = 1;

  unsigned banks_per_rank() const { return bank_groups * banks_per_group; }
  /// Throws ConfigError.
  void validate() const;
};

struct BandwidthResult {
  Workload workload = Workload::rand;
  mitigation::Scheme scheme = mitigation::Scheme::none;
  unsigned raaimt = 0;
  double efficiency = 0.0;  // data-bus busy time / measured time
  double relative = 0.0;    // efficiency / same-workload baseline (set by sweep)
  std::uint64_t transactions = 0;
  std::uint64_t activates = 0;
  std::uint64_t row_hits = 0;
  std::uint64_t rfm_count = 0;
  std::uint64_t refresh_count = 0;
  /// Sum over credits of min(RAAIMT, BAC before the credit).
  std::uint64_t bac_credited = 0;
  /// Sum of final BAC values; activates == bac_final_sum + bac_credited.
  std::uint64_t bac_final_sum = 0;
  double measured_ns = 0.0;
  double busy_ns = 0.0;
  /// Data-bus gaps between bursts inside the measured window.
  double idle_ns = 0.0;
};

/// Whole run counts (warm-up included) feed the BAC identity; efficiency uses
/// the measured window only.
BandwidthResult simulate_bandwidth(const BandwidthConfig& cfg, Workload workload,
                                   mitigation::Scheme scheme, unsigned raaimt);

/// Grid over workloads x schemes x RAAIMT. Scheme none runs once per workload
/// and is repeated for every N. Rows ordered by workload, scheme, N.
std::vector<BandwidthResult> sweep(const BandwidthConfig& cfg, const std::vector<Workload>& workloads,
                                   const std::vector<mitigation::Scheme>& schemes,
                                   const std::vector<unsigned>& raaimt_values, unsigned workers = 1);

/// CSV with header workload,scheme,N,efficiency,relative,rfm_count,refresh_count.
std::string to_csv(const std::vector<BandwidthResult>& rows);

}  // namespace rampart::timing

#pragma once

// Controller-side mitigation state: Bank Activate Counters, RAAIMT windows,
// LFSR-driven target/level sampling, target capture and directed refresh.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rampart/address_remap.hpp"
#include "rampart/lfsr.hpp"
#include "rampart/random.hpp"

namespace rampart::mitigation {

enum class Scheme { none, brc, brc_vl };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& name);

inline constexpr unsigned kMaxRaaimt = 256;

struct MitigationConfig {
  Scheme scheme = Scheme::brc_vl;
  unsigned raaimt = 16;
  unsigned victim_levels = 2;
  /// Level-2 refresh probability under BRC; unset means 1/N.
  std::optional<double> brc_ratio;
  double tdrfm_brc_ns = 240.0;
  double tdrfm_brc_vl_ns = 130.0;
  std::uint16_t lfsr_seed = Lfsr16::kDefaultSeed;
  std::uint16_t lfsr_taps = Lfsr16::kDefaultTaps;
  /// Controller clocks between consecutive activates to one bank.
  std::uint64_t cycles_per_activate = 74;
  /// Extra clocks, uniform in [0, lfsr_jitter), added between window samples
  /// to stand in for request-scheduling timing noise. 0 disables.
  std::uint64_t lfsr_jitter = 65536;
  /// Keep the activated rows of each bank's current window (tests only).
  bool keep_window_rows = false;

  unsigned bac_limit() const { return 2 * raaimt; }
  double effective_brc_ratio() const { return brc_ratio.value_or(1.0 / raaimt); }
  double tdrfm_ns() const;

  /// Throws ConfigError.
  void validate() const;
};

/// Level l < VL: (N-1)/N^l; level VL: 1/N^(VL-1). Index 0 is level 1.
std::vector<double> victim_level_distribution(unsigned raaimt, unsigned victim_levels);

/// Smallest VL >= 1 with N^(VL+1) >= APR, i.e. ceil(log_N(APR) - 1) floored
/// at 1. Exact integer arithmetic.
unsigned required_victim_levels(std::uint64_t raaimt, std::uint64_t apr);

struct WindowSample {
  unsigned target_index = 0;
  unsigned victim_level = 1;
};

/// Draws a sample from the current LFSR contents as seen by `bank`. Level
/// stages after the first clock the LFSR 8 more cycles for fresh bits.
WindowSample draw_window_sample(const MitigationConfig& cfg, unsigned bank, Lfsr16& lfsr);

struct CapturedTarget {
  std::uint32_t row = 0;  // controller row address
  unsigned level = 1;
};

struct RfmDue {
  unsigned bank = 0;
};

struct RfmResult {
  unsigned bank = 0;
  std::uint32_t target_row = 0;
  /// Victim levels refreshed around the target, ascending.
  std::vector<unsigned> levels;
  double duration_ns = 0.0;
};

/// Internal rows a directed refresh touches in one device, with their level.
std::vector<std::pair<remap::InternalRow, unsigned>> refreshed_rows(
    const RfmResult& rfm, const remap::DeviceMap& dev);

/// Per-bank activate counters with RAAIMT credit on RFM.
class BankActivateCounters {
 public:
  BankActivateCounters(unsigned banks, unsigned raaimt);

  unsigned value(unsigned bank) const { return bac_.at(bank); }
  unsigned raaimt() const { return raaimt_; }
  unsigned limit() const { return 2 * raaimt_; }
  unsigned banks() const { return static_cast<unsigned>(bac_.size()); }

  bool at_limit(unsigned bank) const { return bac_.at(bank) >= limit(); }
  bool rfm_due(unsigned bank) const { return bac_.at(bank) >= raaimt_; }

  /// Throws ContractViolation at the limit.
  void activate(unsigned bank);
  /// Subtract RAAIMT, floored at 0.
  void credit(unsigned bank);

 private:
  unsigned raaimt_;
  std::vector<unsigned> bac_;
};

struct BankState {
  unsigned window_pos = 0;
  WindowSample sample;
  std::optional<CapturedTarget> captured;
  std::vector<std::uint32_t> window_rows;
  std::uint64_t windows = 0;
};

class MitigationState {
 public:
  MitigationState(MitigationConfig cfg, unsigned banks, std::uint64_t seed);

  const MitigationConfig& config() const { return cfg_; }
  unsigned banks() const { return static_cast<unsigned>(state_.size()); }
  unsigned bac(unsigned bank) const { return bacs_.value(bank); }
  const BankState& bank(unsigned b) const { return state_.at(b); }
  const Lfsr16& lfsr() const { return lfsr_; }

  bool can_activate(unsigned bank) const;
  bool rfm_due(unsigned bank) const;

  /// Counts the activate, samples at window start, captures on the sampled
  /// position, and signals when BAC reaches RAAIMT. Throws ContractViolation
  /// when the bank sits at its BAC limit.
  std::optional<RfmDue> record_activate(unsigned bank, std::uint32_t row);

  /// Throws ProtocolError when no target is captured.
  RfmResult issue_rfm(unsigned bank, Rng& rng);

 private:
  void start_window(unsigned bank);

  MitigationConfig cfg_;
  Lfsr16 lfsr_;
  Rng jitter_rng_;
  BankActivateCounters bacs_;
  std::vector<BankState> state_;
};

}  // namespace rampart::mitigation

#pragma once

// Activate-stream generators for the modeled attack patterns.
//
// Low-frequency: every RAAIMT window of N activates holds one aggressor
// activate per attack at a uniformly random position; the rest are decoys.
// High-frequency: every activate is an aggressor activate, round-robin over
// the aggressor set.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rampart/address_remap.hpp"
#include "rampart/random.hpp"

namespace rampart::attack {

enum class Pattern { low_freq, high_freq };

std::string to_string(Pattern p);
Pattern pattern_from_string(const std::string& name);

struct AttackSpec {
  Pattern pattern = Pattern::low_freq;
  /// One entry per side; two or more make a multi-sided attack.
  std::vector<std::uint32_t> aggressors;
  /// Shared victim controller address for orchestrated attacks.
  std::optional<std::uint32_t> victim;
  unsigned banks = 1;
  unsigned channels = 1;
  /// Simultaneous attacks per bank.
  unsigned k = 1;
  bool oracle = false;
  /// Minimum internal-row distance between a decoy and any aggressor or
  /// victim, in every device. 0 selects 2 * blast_radius + victim_levels.
  unsigned decoy_guard = 0;

  /// Throws ConfigError.
  void validate() const;
};

struct Activate {
  std::uint64_t slot = 0;  // activate index on this bank; one tRC per slot
  unsigned bank = 0;
  std::uint32_t row = 0;
  /// Index of the attack this activate belongs to; -1 for a decoy.
  int attack = -1;

  bool is_aggressor() const { return attack >= 0; }
};

struct ActivateTrace {
  std::vector<Activate> activates;
};

/// Rows that are far from every aggressor and victim in every device.
class DecoyPool {
 public:
  DecoyPool() = default;
  DecoyPool(const remap::RankGeometry& rank, const std::vector<std::uint32_t>& aggressors,
            unsigned guard);

  std::size_t size() const { return rows_.size(); }
  const std::vector<std::uint32_t>& rows() const { return rows_; }
  /// Throws InfeasibleError when the pool is empty.
  std::uint32_t sample(Rng& rng) const;

 private:
  std::vector<std::uint32_t> rows_;
};

unsigned default_decoy_guard(unsigned blast_radius, unsigned victim_levels);

/// Lazily generated low-frequency stream for one bank.
class LowFreqGenerator {
 public:
  /// `attacks[i]` lists the sides of attack i. min(k, N) attacks get a slot
  /// per window; sides rotate across windows.
  LowFreqGenerator(std::vector<std::vector<std::uint32_t>> attacks, unsigned raaimt,
                   DecoyPool decoys, unsigned bank = 0);

  Activate next(Rng& rng);

  /// Replace the sides of one attack (used by oracle retargeting).
  void retarget(unsigned attack, std::vector<std::uint32_t> sides);

 private:
  void start_window(Rng& rng);

  std::vector<std::vector<std::uint32_t>> attacks_;
  std::vector<std::size_t> side_;
  unsigned raaimt_;
  DecoyPool decoys_;
  unsigned bank_;
  std::uint64_t slot_ = 0;
  std::vector<int> window_;  // attack index per window position, -1 = decoy
};

/// Lazily generated high-frequency stream for one bank.
class HighFreqGenerator {
 public:
  explicit HighFreqGenerator(std::vector<std::vector<std::uint32_t>> attacks, unsigned bank = 0);

  Activate next();
  void retarget(unsigned attack, std::vector<std::uint32_t> sides);

 private:
  std::vector<std::vector<std::uint32_t>> attacks_;
  std::vector<std::size_t> side_;
  unsigned bank_;
  std::size_t turn_ = 0;
  std::uint64_t slot_ = 0;
};

ActivateTrace low_freq_trace(const AttackSpec& spec, unsigned raaimt, std::uint64_t windows,
                             const DecoyPool& decoys, Rng& rng);

ActivateTrace high_freq_trace(const AttackSpec& spec, std::uint64_t activates);

/// Per-device aggressor sharing one victim controller address. The aggressor
/// sits one internal row above the victim, or below it at the top edge.
struct SharedVictimPlan {
  std::uint32_t victim = 0;
  std::vector<unsigned> devices;
  std::vector<std::uint32_t> aggressors;  // parallel to devices
};

/// Throws InfeasibleError naming the conflict when a device has no neighbor
/// for the victim or two devices would share an aggressor.
SharedVictimPlan plan_shared_victim(const remap::RankGeometry& rank, std::uint32_t victim,
                                    const std::vector<unsigned>& devices);

struct AttackStream {
  unsigned channel = 0;
  unsigned bank = 0;
  unsigned index = 0;  // 0..k-1 within the bank
  unsigned device = 0;
  std::uint32_t victim = 0;
  std::uint32_t aggressor = 0;
};

struct Schedule {
  std::vector<AttackStream> streams;
  std::optional<SharedVictimPlan> plan;
  bool oracle = false;
};

/// banks * channels * k streams. With a shared victim, stream i of a bank
/// targets device i mod devices; otherwise streams use the spec's first
/// aggressor.
Schedule orchestrate(const remap::RankGeometry& rank, const AttackSpec& spec);

/// Oracle policy: after a success in `stream.device`, move to the next device
/// (in plan order) that has not yet succeeded. Nullopt when none remain.
std::optional<AttackStream> retarget(const AttackStream& stream, const SharedVictimPlan& plan,
                                     const std::vector<bool>& succeeded);

}  // namespace rampart::attack

#pragma once

#include <cstdint>
#include <memory>
#include <vector>

namespace rampart::mitigation {

/// 16-bit Fibonacci LFSR clocked once per controller cycle. `taps` is a mask
/// over register bits whose parity forms the feedback bit shifted in at the
/// top. The default mask 0x100B is the polynomial x^16 + x^15 + x^13 + x^4 + 1.
class Lfsr16 {
 public:
  static constexpr std::uint16_t kDefaultTaps = 0x100B;
  static constexpr std::uint16_t kDefaultSeed = 0xACE1;

  /// Throws ConfigError for a zero seed or zero taps.
  explicit Lfsr16(std::uint16_t seed = kDefaultSeed, std::uint16_t taps = kDefaultTaps);

  std::uint16_t state() const { return state_; }
  std::uint16_t taps() const { return taps_; }

  /// One clock; returns the bit shifted out.
  unsigned step();

  /// `cycles` clocks. O(1) for maximal-length taps via a shared cycle table.
  void advance(std::uint64_t cycles);

  /// Cycle length from the current state (walks the sequence once).
  std::uint32_t period() const;

 private:
  struct CycleTable {
    std::vector<std::uint16_t> states;      // position -> state
    std::vector<std::uint32_t> positions;   // state -> position
  };
  static std::shared_ptr<const CycleTable> table_for(std::uint16_t taps);

  std::uint16_t state_;
  std::uint16_t taps_;
  std::shared_ptr<const CycleTable> table_;  // null when taps are not maximal
};

/// Fixed per-bank view of the shared register: bit-reverse for banks >= 16,
/// then rotate left by (bank * 5) mod 16. Banks 0..31 get distinct views.
std::uint16_t arrange_bits(std::uint16_t snapshot, unsigned bank);

}  // namespace rampart::mitigation

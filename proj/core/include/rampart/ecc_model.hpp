#pragma once

// Symbol-level outcome model for single-device-data-correction codes.
// Codeword contents are never materialized: a decode only looks at how many
// symbols are wrong and, past the correction capability, draws whether the
// decoder flags the word or silently miscorrects.

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "rampart/random.hpp"

namespace rampart::ecc {

enum class OutcomeClass { clean, corrected, detected_ue, sdc };

std::string to_string(OutcomeClass c);

/// Access-level combination: detected_ue > sdc > corrected > clean.
OutcomeClass combine(OutcomeClass a, OutcomeClass b);

/// Probability that `min_errors..max_errors` erroneous symbols go undetected.
struct MiscorrectionBand {
  unsigned min_errors = 0;
  unsigned max_errors = 0;
  double undetected_probability = 0.0;
};

struct EccConfig {
  std::string name;
  unsigned n = 0;  // total symbols
  unsigned k = 0;  // data symbols
  unsigned symbol_bits = 0;
  unsigned symbols_per_device = 0;
  unsigned t = 0;
  /// Codewords protecting one access (one per burst beat for 4-bit symbols).
  unsigned codewords_per_access = 1;
  /// Bands must cover every error count above t; counts past the last band
  /// reuse the last band's probability.
  std::vector<MiscorrectionBand> miscorrection;

  unsigned devices() const { return symbols_per_device == 0 ? 0 : n / symbols_per_device; }
  double undetected_probability(unsigned errors) const;

  /// Throws ConfigError when the invariants do not hold.
  void validate() const;
};

/// rs10_8, rs40_32, rs36_32.
std::vector<EccConfig> builtin_configs();

/// Throws ConfigError for unknown names.
EccConfig builtin_config(const std::string& name);

/// Published bounds for an 8-bit-symbol layout with no diagrammed placement;
/// kept for reference only.
std::vector<MiscorrectionBand> reference_8bit_bounds();

/// Erroneous symbol indices of one codeword, grouped by device.
struct ErrorPattern {
  std::vector<std::vector<unsigned>> per_device;

  unsigned total() const;
  unsigned devices_with_errors() const;
};

ErrorPattern empty_pattern(const EccConfig& cfg);

inline constexpr unsigned kAllBits = std::numeric_limits<unsigned>::max();

/// Symbols hit when `bits_flipped` bits of one device's burst flip. Bits are
/// counted in burst order, so consecutive bits fall on consecutive pins and
/// spread over min(bits, symbols_per_device) symbols. Indices are global:
/// device d owns [d * spd, (d + 1) * spd).
ErrorPattern device_error_pattern(const EccConfig& cfg, unsigned device_id,
                                  unsigned bits_flipped = kAllBits);

/// Merge `other` into `into` (set union per device).
void merge(ErrorPattern& into, const ErrorPattern& other);

struct DecodeOutcome {
  OutcomeClass cls = OutcomeClass::clean;
  unsigned corrected_symbols = 0;
};

/// Consumes one draw from `rng` only when the error count exceeds t.
DecodeOutcome decode(const EccConfig& cfg, const ErrorPattern& err, Rng& rng);

/// Decodes every codeword of an access where each listed device has all of its
/// bits wrong, and combines the outcomes.
OutcomeClass decode_access(const EccConfig& cfg, std::span<const unsigned> erroneous_devices,
                           Rng& rng);

struct ScrubOverhead {
  double rate_bytes_per_s = 0.0;
  double fraction = 0.0;
};

/// Patrol scrub reads and writes back all of `capacity_bytes` every period.
ScrubOverhead scrub_overhead(double capacity_bytes, double period_s,
                             double peak_bandwidth_bytes_per_s = 44.8e9);

}  // namespace rampart::ecc

#pragma once

// Scenario builders and checks shared by the unit tests and the acceptance
// suite.

#include <cstdint>
#include <string>

#include "rampart/rank_simulator.hpp"

namespace fixtures {

/// Desk-scale single-device bank without ECC: one refresh interval of
/// `interval` ticks, attack on row 1, success when a tracked victim flips.
rampart::sim::SimScenario desk_scenario(rampart::mitigation::Scheme scheme, unsigned raaimt,
                                        unsigned hc, std::uint64_t interval,
                                        rampart::attack::Pattern pattern, unsigned tracked_level);

/// Chain absorption over the scenario's horizon, from the analysis module.
double chain_reference(const rampart::sim::SimScenario& s);

struct ConfinementCase {
  std::uint32_t aggressor = 0;
  std::uint64_t tick = 0;
  unsigned bank = 0;
  unsigned hc = 1000;
  unsigned bits_per_flip = rampart::ecc::kAllBits;
};

struct ConfinementResult {
  std::uint64_t victim_addresses = 0;
  std::uint64_t single_device = 0;  // addresses with errors in exactly one device
  std::uint64_t multi_device = 0;   // addresses with errors in two or more
  std::uint64_t corrected = 0;
  std::uint64_t uncorrected = 0;  // detected or silent
};

/// One forced success on a 10-device RS(40,32) rank followed by patrol scrub
/// reads of every erroneous address. `remapped` selects shift-by-ID maps;
/// otherwise every device uses the identity map.
ConfinementResult run_confinement(const ConfinementCase& c, bool remapped, std::uint64_t seed);

ConfinementCase random_case(std::uint64_t seed);

/// Hex digest of a file's bytes (std::hash), for determinism checks.
std::string file_digest(const std::string& path);

}  // namespace fixtures

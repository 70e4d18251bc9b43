#include "fixtures.hpp"

#include <bit>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "rampart/markov_chain.hpp"
#include "rampart/reliability_analysis.hpp"

namespace fixtures {

using namespace rampart;

sim::SimScenario desk_scenario(mitigation::Scheme scheme, unsigned raaimt, unsigned hc,
                               std::uint64_t interval, attack::Pattern pattern,
                               unsigned tracked_level) {
  sim::SimScenario s;
  s.rank = remap::RankGeometry::shift_by_id(1, 0, 12, 1, 1);
  s.ecc = ecc::EccConfig{"none", 1, 1, 8, 1, 0, 1, {}};
  s.mitigation.scheme = scheme;
  s.mitigation.raaimt = raaimt;
  attack::AttackSpec a;
  a.pattern = pattern;
  a.aggressors = {1};
  s.attack = a;
  s.hc = hc;
  s.activates_per_interval = interval;
  s.horizon_ticks = interval;
  s.criterion = sim::SuccessCriterion::target_victims;
  s.tracked_level = tracked_level;
  s.stop_on_success = true;
  return s;
}

double chain_reference(const sim::SimScenario& s) {
  analysis::AnalysisParams p;
  p.hc = s.hc;
  p.raaimt = s.mitigation.raaimt;
  p.scheme = s.mitigation.scheme;
  p.victim_levels = s.mitigation.victim_levels;
  p.brc_ratio = s.mitigation.brc_ratio;
  p.attack = s.attack && s.attack->pattern == attack::Pattern::high_freq
                 ? analysis::AttackType::victim_focused
                 : analysis::AttackType::traditional;
  const std::uint64_t windows = s.ticks_per_interval() / s.mitigation.raaimt;
  const analysis::IntervalChain chain(s.hc, analysis::make_kernel(p), windows);
  // Horizons used here never exceed one interval.
  return static_cast<double>(chain.absorbed_within(s.horizon_ticks / s.mitigation.raaimt));
}

ConfinementResult run_confinement(const ConfinementCase& c, bool remapped, std::uint64_t seed) {
  sim::SimScenario s;
  s.rank = remapped ? remap::RankGeometry::shift_by_id(8, 2, 16, 2, 1)
                    : remap::RankGeometry::identity(8, 2, 16, 2, 1);
  s.ecc = ecc::builtin_config("rs40_32");
  s.hc = c.hc;
  s.bits_per_flip = c.bits_per_flip;
  s.forced = {{c.tick, c.bank, c.aggressor}};
  s.scrub.patrol_period_s = 0.002;
  s.horizon_ticks = c.tick + 2 * s.seconds_to_ticks(0.002) + 2;

  sim::RankSimulator simulator(s);
  const sim::SimOutcome out = simulator.run(seed, {true, false});

  std::map<std::pair<unsigned, std::uint32_t>, std::uint32_t> masks;
  ConfinementResult r;
  for (const auto& e : out.events) {
    if (e.kind == sim::EventKind::flip) masks[{e.bank, e.controller_addr}] |= 1u << e.device;
    if (e.kind == sim::EventKind::corrected) ++r.corrected;
    if (e.kind == sim::EventKind::detected_ue || e.kind == sim::EventKind::sdc) ++r.uncorrected;
  }
  r.victim_addresses = masks.size();
  for (const auto& [key, mask] : masks) {
    if (std::popcount(mask) == 1) ++r.single_device;
    else ++r.multi_device;
  }
  return r;
}

ConfinementCase random_case(std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0xC0F1));
  ConfinementCase c;
  c.aggressor = static_cast<std::uint32_t>(uniform_below(rng, 1u << 16));
  c.tick = uniform_below(rng, 100000);
  c.bank = static_cast<unsigned>(uniform_below(rng, 2));
  c.hc = 100 + static_cast<unsigned>(uniform_below(rng, 4900));
  const unsigned bits[] = {1, 2, 3, 4, ecc::kAllBits};
  c.bits_per_flip = bits[uniform_below(rng, 5)];
  return c;
}

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016zx", std::hash<std::string>{}(ss.str()));
  return buf;
}

}  // namespace fixtures

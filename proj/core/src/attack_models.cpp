#include "rampart/attack_models.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "rampart/error.hpp"

namespace rampart::attack {

std::string to_string(Pattern p) { return p == Pattern::low_freq ? "low_freq" : "high_freq"; }

Pattern pattern_from_string(const std::string& name) {
  if (name == "low_freq") return Pattern::low_freq;
  if (name == "high_freq") return Pattern::high_freq;
  throw ConfigError("unknown attack pattern '" + name + "' (expected low_freq or high_freq)");
}

void AttackSpec::validate() const {
  if (aggressors.empty() && !victim) throw ConfigError("attack needs aggressors or a victim");
  if (banks == 0 || channels == 0) throw ConfigError("attack banks and channels must be positive");
  if (k == 0) throw ConfigError("attack k must be >= 1");
}

unsigned default_decoy_guard(unsigned blast_radius, unsigned victim_levels) {
  return 2 * blast_radius + victim_levels;
}

DecoyPool::DecoyPool(const remap::RankGeometry& rank, const std::vector<std::uint32_t>& aggressors,
                     unsigned guard) {
  const std::uint32_t rows = rank.row_count();
  std::vector<bool> excluded(rows, false);
  const std::int64_t reach = static_cast<std::int64_t>(guard) + rank.blast_radius;
  for (const auto& dev : rank.device_maps) {
    for (std::uint32_t a : aggressors) {
      const auto r = dev.map_row({a, rank.row_width});
      if (dev.is_spare(r)) {
        excluded[a] = true;
        continue;
      }
      for (std::int64_t off = -(reach - 1); off <= reach - 1; ++off) {
        const std::int64_t x = static_cast<std::int64_t>(r.value) + off;
        if (x < 0 || x >= rows) continue;
        const remap::InternalRow ir{static_cast<std::uint32_t>(x)};
        if (!dev.holds_data(ir)) continue;
        excluded[dev.inverse_map(ir).value] = true;
      }
    }
  }
  for (std::uint32_t a = 0; a < rows; ++a)
    if (!excluded[a]) rows_.push_back(a);
}

std::uint32_t DecoyPool::sample(Rng& rng) const {
  if (rows_.empty()) throw InfeasibleError("decoy pool is empty");
  return rows_[uniform_below(rng, rows_.size())];
}

LowFreqGenerator::LowFreqGenerator(std::vector<std::vector<std::uint32_t>> attacks,
                                   unsigned raaimt, DecoyPool decoys, unsigned bank)
    : attacks_(std::move(attacks)), side_(attacks_.size(), 0), raaimt_(raaimt),
      decoys_(std::move(decoys)), bank_(bank), window_(raaimt, -1) {
  if (raaimt == 0) throw ConfigError("raaimt must be >= 1");
  for (const auto& a : attacks_)
    if (a.empty()) throw ConfigError("every attack needs at least one aggressor");
}

void LowFreqGenerator::start_window(Rng& rng) {
  std::fill(window_.begin(), window_.end(), -1);
  const unsigned active = std::min<unsigned>(static_cast<unsigned>(attacks_.size()), raaimt_);
  // Partial Fisher-Yates over window positions.
  std::vector<unsigned> pos(raaimt_);
  std::iota(pos.begin(), pos.end(), 0u);
  for (unsigned i = 0; i < active; ++i) {
    const unsigned j = i + static_cast<unsigned>(uniform_below(rng, raaimt_ - i));
    std::swap(pos[i], pos[j]);
    window_[pos[i]] = static_cast<int>(i);
  }
}

Activate LowFreqGenerator::next(Rng& rng) {
  const unsigned p = static_cast<unsigned>(slot_ % raaimt_);
  if (p == 0) start_window(rng);
  Activate a;
  a.slot = slot_++;
  a.bank = bank_;
  a.attack = window_[p];
  if (a.attack >= 0) {
    auto& sides = attacks_[a.attack];
    auto& s = side_[a.attack];
    a.row = sides[s];
    s = (s + 1) % sides.size();
  } else {
    a.row = decoys_.sample(rng);
  }
  return a;
}

void LowFreqGenerator::retarget(unsigned attack, std::vector<std::uint32_t> sides) {
  if (sides.empty()) throw ConfigError("retarget needs at least one aggressor");
  attacks_.at(attack) = std::move(sides);
  side_.at(attack) = 0;
}

HighFreqGenerator::HighFreqGenerator(std::vector<std::vector<std::uint32_t>> attacks, unsigned bank)
    : attacks_(std::move(attacks)), side_(attacks_.size(), 0), bank_(bank) {
  if (attacks_.empty()) throw ConfigError("high-frequency attack needs an aggressor");
  for (const auto& a : attacks_)
    if (a.empty()) throw ConfigError("every attack needs at least one aggressor");
}

Activate HighFreqGenerator::next() {
  Activate a;
  a.slot = slot_++;
  a.bank = bank_;
  a.attack = static_cast<int>(turn_);
  auto& sides = attacks_[turn_];
  auto& s = side_[turn_];
  a.row = sides[s];
  s = (s + 1) % sides.size();
  turn_ = (turn_ + 1) % attacks_.size();
  return a;
}

void HighFreqGenerator::retarget(unsigned attack, std::vector<std::uint32_t> sides) {
  if (sides.empty()) throw ConfigError("retarget needs at least one aggressor");
  attacks_.at(attack) = std::move(sides);
  side_.at(attack) = 0;
}

namespace {
std::vector<std::vector<std::uint32_t>> attack_sets(const AttackSpec& spec) {
  if (spec.aggressors.empty()) throw ConfigError("trace generation needs explicit aggressors");
  return std::vector<std::vector<std::uint32_t>>(spec.k, spec.aggressors);
}
}  // namespace

ActivateTrace low_freq_trace(const AttackSpec& spec, unsigned raaimt, std::uint64_t windows,
                             const DecoyPool& decoys, Rng& rng) {
  spec.validate();
  ActivateTrace trace;
  for (unsigned b = 0; b < spec.banks; ++b) {
    LowFreqGenerator gen(attack_sets(spec), raaimt, decoys, b);
    for (std::uint64_t i = 0; i < windows * raaimt; ++i) trace.activates.push_back(gen.next(rng));
  }
  std::stable_sort(trace.activates.begin(), trace.activates.end(),
                   [](const Activate& x, const Activate& y) { return x.slot < y.slot; });
  return trace;
}

ActivateTrace high_freq_trace(const AttackSpec& spec, std::uint64_t activates) {
  spec.validate();
  ActivateTrace trace;
  for (unsigned b = 0; b < spec.banks; ++b) {
    HighFreqGenerator gen({spec.aggressors}, b);
    for (std::uint64_t i = 0; i < activates; ++i) trace.activates.push_back(gen.next());
  }
  std::stable_sort(trace.activates.begin(), trace.activates.end(),
                   [](const Activate& x, const Activate& y) { return x.slot < y.slot; });
  return trace;
}

SharedVictimPlan plan_shared_victim(const remap::RankGeometry& rank, std::uint32_t victim,
                                    const std::vector<unsigned>& devices) {
  if (victim >= rank.row_count())
    throw ConfigError("victim " + std::to_string(victim) + " outside the row address space");
  SharedVictimPlan plan;
  plan.victim = victim;
  std::set<std::uint32_t> used;
  for (unsigned d : devices) {
    if (d >= rank.device_maps.size())
      throw ConfigError("device " + std::to_string(d) + " not in rank");
    const auto& dev = rank.device_maps[d];
    const auto v = dev.map_row({victim, rank.row_width});
    auto n = dev.neighbor(v, 1);
    if (!n) n = dev.neighbor(v, -1);
    if (!n)
      throw InfeasibleError("victim " + std::to_string(victim) + " has no neighbor in device " +
                            std::to_string(d));
    const std::uint32_t agg = dev.inverse_map(*n).value;
    if (!used.insert(agg).second)
      throw InfeasibleError("aggressor " + std::to_string(agg) + " for victim " +
                            std::to_string(victim) + " in device " + std::to_string(d) +
                            " is already used by another device");
    plan.devices.push_back(d);
    plan.aggressors.push_back(agg);
  }
  return plan;
}

Schedule orchestrate(const remap::RankGeometry& rank, const AttackSpec& spec) {
  spec.validate();
  Schedule sched;
  sched.oracle = spec.oracle;
  if (spec.victim) {
    std::vector<unsigned> devs(rank.total_devices());
    std::iota(devs.begin(), devs.end(), 0u);
    sched.plan = plan_shared_victim(rank, *spec.victim, devs);
  }
  for (unsigned c = 0; c < spec.channels; ++c) {
    for (unsigned b = 0; b < spec.banks; ++b) {
      for (unsigned i = 0; i < spec.k; ++i) {
        AttackStream s{c, b, i, 0, 0, 0};
        if (sched.plan) {
          const unsigned slot = i % static_cast<unsigned>(sched.plan->devices.size());
          s.device = sched.plan->devices[slot];
          s.victim = sched.plan->victim;
          s.aggressor = sched.plan->aggressors[slot];
        } else {
          s.aggressor = spec.aggressors.front();
          const auto& dev = rank.device_maps.front();
          const auto victims = remap::victim_addresses({s.aggressor, rank.row_width}, dev, 1);
          s.victim = victims.empty() ? s.aggressor : victims.front().value;
        }
        sched.streams.push_back(s);
      }
    }
  }
  return sched;
}

std::optional<AttackStream> retarget(const AttackStream& stream, const SharedVictimPlan& plan,
                                     const std::vector<bool>& succeeded) {
  const auto n = plan.devices.size();
  auto it = std::find(plan.devices.begin(), plan.devices.end(), stream.device);
  const std::size_t start = it == plan.devices.end() ? 0 : static_cast<std::size_t>(it - plan.devices.begin());
  for (std::size_t step = 1; step <= n; ++step) {
    const std::size_t i = (start + step) % n;
    const unsigned d = plan.devices[i];
    if (d < succeeded.size() && succeeded[d]) continue;
    AttackStream s = stream;
    s.device = d;
    s.aggressor = plan.aggressors[i];
    return s;
  }
  return std::nullopt;
}

}  // namespace rampart::attack

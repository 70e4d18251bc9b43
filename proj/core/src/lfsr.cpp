#include "rampart/lfsr.hpp"

#include <bit>
#include <map>
#include <mutex>

#include "rampart/error.hpp"

namespace rampart::mitigation {

namespace {
constexpr std::uint32_t kMaximalPeriod = 0xFFFF;

std::uint16_t next_state(std::uint16_t s, std::uint16_t taps) {
  const unsigned fb = std::popcount(static_cast<unsigned>(s & taps)) & 1u;
  return static_cast<std::uint16_t>((s >> 1) | (fb << 15));
}
}  // namespace

Lfsr16::Lfsr16(std::uint16_t seed, std::uint16_t taps) : state_(seed), taps_(taps) {
  if (seed == 0) throw ConfigError("lfsr seed must be nonzero");
  if (taps == 0) throw ConfigError("lfsr taps must be nonzero");
  table_ = table_for(taps);
}

std::shared_ptr<const Lfsr16::CycleTable> Lfsr16::table_for(std::uint16_t taps) {
  static std::mutex mu;
  static std::map<std::uint16_t, std::shared_ptr<const CycleTable>> cache;
  std::lock_guard lock(mu);
  if (auto it = cache.find(taps); it != cache.end()) return it->second;

  auto t = std::make_shared<CycleTable>();
  t->positions.assign(1u << 16, 0);
  std::uint16_t s = 1;
  for (std::uint32_t i = 0; i < kMaximalPeriod; ++i) {
    t->states.push_back(s);
    t->positions[s] = i;
    s = next_state(s, taps);
    if (s == 1 && i + 1 < kMaximalPeriod) {
      t.reset();
      break;
    }
  }
  if (t && s != 1) t.reset();
  cache.emplace(taps, t);
  return t;
}

unsigned Lfsr16::step() {
  const unsigned out = state_ & 1u;
  state_ = next_state(state_, taps_);
  return out;
}

void Lfsr16::advance(std::uint64_t cycles) {
  if (table_) {
    const std::uint64_t pos = (table_->positions[state_] + cycles) % kMaximalPeriod;
    state_ = table_->states[pos];
    return;
  }
  for (std::uint64_t i = 0; i < cycles; ++i) state_ = next_state(state_, taps_);
}

std::uint32_t Lfsr16::period() const {
  std::uint16_t s = next_state(state_, taps_);
  std::uint32_t n = 1;
  while (s != state_ && n <= (1u << 16)) {
    s = next_state(s, taps_);
    ++n;
  }
  return n;
}

std::uint16_t arrange_bits(std::uint16_t snapshot, unsigned bank) {
  std::uint16_t v = snapshot;
  if ((bank / 16) % 2 == 1) {
    std::uint16_t r = 0;
    for (unsigned i = 0; i < 16; ++i) r |= static_cast<std::uint16_t>(((v >> i) & 1u) << (15 - i));
    v = r;
  }
  return std::rotl(v, static_cast<int>((bank * 5) % 16));
}

}  // namespace rampart::mitigation

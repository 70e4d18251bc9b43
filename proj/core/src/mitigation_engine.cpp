#include "rampart/mitigation_engine.hpp"

#include <algorithm>
#include <cmath>

#include "rampart/error.hpp"

namespace rampart::mitigation {

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::none: return "none";
    case Scheme::brc: return "brc";
    case Scheme::brc_vl: return "brc_vl";
  }
  return "none";
}

Scheme scheme_from_string(const std::string& name) {
  if (name == "none") return Scheme::none;
  if (name == "brc" || name == "BRC") return Scheme::brc;
  if (name == "brc_vl" || name == "BRC_VL" || name == "BRC-VL") return Scheme::brc_vl;
  throw ConfigError("unknown scheme '" + name + "' (expected none, brc or brc_vl)");
}

double MitigationConfig::tdrfm_ns() const {
  switch (scheme) {
    case Scheme::brc: return tdrfm_brc_ns;
    case Scheme::brc_vl: return tdrfm_brc_vl_ns;
    case Scheme::none: return 0.0;
  }
  return 0.0;
}

void MitigationConfig::validate() const {
  if (raaimt < 1 || raaimt > kMaxRaaimt)
    throw ConfigError("raaimt " + std::to_string(raaimt) + " outside [1, 256]");
  if (victim_levels < 1) throw ConfigError("victim_levels must be >= 1");
  if (scheme == Scheme::brc_vl && victim_levels > 1 && raaimt < 2)
    throw ConfigError("more than one victim level needs raaimt >= 2");
  if (brc_ratio && (*brc_ratio < 0.0 || *brc_ratio > 1.0))
    throw ConfigError("brc_ratio outside [0, 1]");
  if (tdrfm_brc_ns <= 0.0 || tdrfm_brc_vl_ns <= 0.0) throw ConfigError("tdrfm must be positive");
  if (lfsr_seed == 0) throw ConfigError("lfsr_seed must be nonzero");
  if (lfsr_taps == 0) throw ConfigError("lfsr_taps must be nonzero");
}

std::vector<double> victim_level_distribution(unsigned raaimt, unsigned victim_levels) {
  if (raaimt < 1) throw ConfigError("raaimt must be >= 1");
  if (victim_levels < 1) throw ConfigError("victim_levels must be >= 1");
  const double n = raaimt;
  std::vector<double> p(victim_levels);
  for (unsigned l = 1; l < victim_levels; ++l) p[l - 1] = (n - 1.0) / std::pow(n, l);
  p[victim_levels - 1] = 1.0 / std::pow(n, victim_levels - 1);
  return p;
}

unsigned required_victim_levels(std::uint64_t raaimt, std::uint64_t apr) {
  if (raaimt < 2) throw ConfigError("required_victim_levels needs raaimt >= 2");
  if (apr < 1) throw ConfigError("required_victim_levels needs apr >= 1");
  unsigned vl = 1;
  std::uint64_t power = raaimt * raaimt;  // N^(VL+1)
  while (power < apr) {
    ++vl;
    if (power > apr / raaimt + 1) break;
    power *= raaimt;
  }
  return vl;
}

WindowSample draw_window_sample(const MitigationConfig& cfg, unsigned bank, Lfsr16& lfsr) {
  const unsigned n = cfg.raaimt;
  std::uint16_t snap = arrange_bits(lfsr.state(), bank);
  WindowSample s;
  s.target_index = n == 1 ? 0 : (snap & 0xFFu) % n;
  if (cfg.scheme != Scheme::brc_vl || cfg.victim_levels < 2) return s;

  const unsigned accept_below = (256 / n) * n;
  unsigned u = snap >> 8;
  while (s.victim_level < cfg.victim_levels) {
    for (int tries = 0; u >= accept_below && tries < 64; ++tries) {
      lfsr.advance(8);
      u = arrange_bits(lfsr.state(), bank) >> 8;
    }
    if (u % n != 0) break;
    ++s.victim_level;
    if (s.victim_level < cfg.victim_levels) {
      lfsr.advance(8);
      u = arrange_bits(lfsr.state(), bank) >> 8;
    }
  }
  return s;
}

std::vector<std::pair<remap::InternalRow, unsigned>> refreshed_rows(const RfmResult& rfm,
                                                                    const remap::DeviceMap& dev) {
  std::vector<std::pair<remap::InternalRow, unsigned>> out;
  const remap::InternalRow target = dev.map_row({rfm.target_row, dev.width()});
  for (unsigned level : rfm.levels) {
    for (int sign : {-1, 1}) {
      if (auto n = dev.neighbor(target, sign * static_cast<int>(level))) out.emplace_back(*n, level);
    }
  }
  return out;
}

BankActivateCounters::BankActivateCounters(unsigned banks, unsigned raaimt)
    : raaimt_(raaimt), bac_(banks, 0) {
  if (raaimt == 0) throw ConfigError("raaimt must be >= 1");
}

void BankActivateCounters::activate(unsigned bank) {
  if (at_limit(bank))
    throw ContractViolation("activate to bank " + std::to_string(bank) + " with BAC at limit " +
                            std::to_string(limit()));
  ++bac_[bank];
}

void BankActivateCounters::credit(unsigned bank) {
  auto& b = bac_.at(bank);
  b = b > raaimt_ ? b - raaimt_ : 0;
}

MitigationState::MitigationState(MitigationConfig cfg, unsigned banks, std::uint64_t seed)
    : cfg_(std::move(cfg)),
      lfsr_(cfg_.lfsr_seed, cfg_.lfsr_taps),
      jitter_rng_(derive_seed(seed, 0x1F5Bu)),
      bacs_(banks, cfg_.raaimt),
      state_(banks) {
  cfg_.validate();
  if (banks == 0) throw ConfigError("mitigation needs at least one bank");
}

bool MitigationState::can_activate(unsigned bank) const {
  return cfg_.scheme == Scheme::none || !bacs_.at_limit(bank);
}

bool MitigationState::rfm_due(unsigned bank) const {
  return cfg_.scheme != Scheme::none && bacs_.rfm_due(bank);
}

void MitigationState::start_window(unsigned bank) {
  std::uint64_t cycles = cfg_.cycles_per_activate * cfg_.raaimt;
  if (cfg_.lfsr_jitter > 0) cycles += uniform_below(jitter_rng_, cfg_.lfsr_jitter);
  lfsr_.advance(cycles);
  auto& st = state_[bank];
  st.sample = draw_window_sample(cfg_, bank, lfsr_);
  st.window_rows.clear();
  ++st.windows;
}

std::optional<RfmDue> MitigationState::record_activate(unsigned bank, std::uint32_t row) {
  if (bank >= state_.size()) throw ConfigError("bank " + std::to_string(bank) + " out of range");
  if (cfg_.scheme == Scheme::none) return std::nullopt;
  bacs_.activate(bank);
  auto& st = state_[bank];
  if (st.window_pos == 0) start_window(bank);
  if (cfg_.keep_window_rows) st.window_rows.push_back(row);
  if (st.window_pos == st.sample.target_index) st.captured = CapturedTarget{row, st.sample.victim_level};
  if (++st.window_pos == cfg_.raaimt) st.window_pos = 0;
  if (bacs_.rfm_due(bank)) return RfmDue{bank};
  return std::nullopt;
}

RfmResult MitigationState::issue_rfm(unsigned bank, Rng& rng) {
  auto& st = state_.at(bank);
  if (!st.captured)
    throw ProtocolError("RFM to bank " + std::to_string(bank) + " with no captured target");
  RfmResult r;
  r.bank = bank;
  r.target_row = st.captured->row;
  r.duration_ns = cfg_.tdrfm_ns();
  if (cfg_.scheme == Scheme::brc) {
    r.levels.push_back(1);
    if (bernoulli(rng, cfg_.effective_brc_ratio())) r.levels.push_back(2);
  } else {
    r.levels.push_back(st.captured->level);
  }
  st.captured.reset();
  bacs_.credit(bank);
  return r;
}

}  // namespace rampart::mitigation

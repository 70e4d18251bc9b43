#include "rampart/ecc_model.hpp"

#include <algorithm>

#include "rampart/error.hpp"

namespace rampart::ecc {

std::string to_string(OutcomeClass c) {
  switch (c) {
    case OutcomeClass::clean: return "clean";
    case OutcomeClass::corrected: return "corrected";
    case OutcomeClass::detected_ue: return "detected_ue";
    case OutcomeClass::sdc: return "sdc";
  }
  return "clean";
}

namespace {
int severity(OutcomeClass c) {
  switch (c) {
    case OutcomeClass::clean: return 0;
    case OutcomeClass::corrected: return 1;
    case OutcomeClass::sdc: return 2;
    case OutcomeClass::detected_ue: return 3;
  }
  return 0;
}
}  // namespace

OutcomeClass combine(OutcomeClass a, OutcomeClass b) {
  return severity(a) >= severity(b) ? a : b;
}

double EccConfig::undetected_probability(unsigned errors) const {
  if (errors <= t || miscorrection.empty()) return 0.0;
  for (const auto& band : miscorrection)
    if (errors >= band.min_errors && errors <= band.max_errors) return band.undetected_probability;
  return miscorrection.back().undetected_probability;
}

void EccConfig::validate() const {
  if (n == 0 || k == 0 || k > n) throw ConfigError("ecc '" + name + "': need 0 < k <= n");
  const unsigned r = n - k;
  if (r != 0 && r != 2 && r != 4 && r != 8)
    throw ConfigError("ecc '" + name + "': n - k must be 0, 2, 4 or 8");
  if (t != r / 2) throw ConfigError("ecc '" + name + "': t must equal (n - k) / 2");
  if (symbol_bits == 0) throw ConfigError("ecc '" + name + "': symbol_bits must be positive");
  if (symbols_per_device == 0 || n % symbols_per_device != 0)
    throw ConfigError("ecc '" + name + "': symbols_per_device must divide n");
  if (codewords_per_access == 0)
    throw ConfigError("ecc '" + name + "': codewords_per_access must be positive");
  for (const auto& b : miscorrection) {
    if (b.min_errors > b.max_errors || b.min_errors <= t)
      throw ConfigError("ecc '" + name + "': miscorrection bands must start above t");
    if (b.undetected_probability < 0.0 || b.undetected_probability > 1.0)
      throw ConfigError("ecc '" + name + "': miscorrection probability outside [0, 1]");
  }
  if (r > 0 && miscorrection.empty())
    throw ConfigError("ecc '" + name + "': miscorrection table required when n > k");
}

std::vector<EccConfig> builtin_configs() {
  return {
      {"rs10_8", 10, 8, 4, 1, 1, 16, {{2, 2, 0.53}, {3, 10, 0.59}}},
      {"rs40_32", 40, 32, 16, 4, 4, 1, {{5, 40, 5.0e-15}}},
      {"rs36_32", 36, 32, 16, 4, 2, 1, {{3, 36, 1.5e-7}}},
  };
}

EccConfig builtin_config(const std::string& name) {
  for (auto& c : builtin_configs())
    if (c.name == name) return c;
  throw ConfigError("unknown ecc config '" + name + "' (expected rs10_8, rs40_32 or rs36_32)");
}

std::vector<MiscorrectionBand> reference_8bit_bounds() {
  return {{3, 4, 2.2e-5}, {5, 8, 9.5e-3}};
}

unsigned ErrorPattern::total() const {
  unsigned s = 0;
  for (const auto& d : per_device) s += static_cast<unsigned>(d.size());
  return s;
}

unsigned ErrorPattern::devices_with_errors() const {
  return static_cast<unsigned>(
      std::count_if(per_device.begin(), per_device.end(), [](const auto& d) { return !d.empty(); }));
}

ErrorPattern empty_pattern(const EccConfig& cfg) {
  return ErrorPattern{std::vector<std::vector<unsigned>>(cfg.devices())};
}

ErrorPattern device_error_pattern(const EccConfig& cfg, unsigned device_id, unsigned bits_flipped) {
  if (device_id >= cfg.devices())
    throw ConfigError("device " + std::to_string(device_id) + " outside ecc layout of " +
                      std::to_string(cfg.devices()) + " devices");
  ErrorPattern p = empty_pattern(cfg);
  const unsigned hit = std::min(bits_flipped, cfg.symbols_per_device);
  for (unsigned s = 0; s < hit; ++s) p.per_device[device_id].push_back(device_id * cfg.symbols_per_device + s);
  return p;
}

void merge(ErrorPattern& into, const ErrorPattern& other) {
  if (into.per_device.size() < other.per_device.size()) into.per_device.resize(other.per_device.size());
  for (std::size_t d = 0; d < other.per_device.size(); ++d) {
    auto& dst = into.per_device[d];
    dst.insert(dst.end(), other.per_device[d].begin(), other.per_device[d].end());
    std::sort(dst.begin(), dst.end());
    dst.erase(std::unique(dst.begin(), dst.end()), dst.end());
  }
}

DecodeOutcome decode(const EccConfig& cfg, const ErrorPattern& err, Rng& rng) {
  const unsigned e = err.total();
  if (e == 0) return {OutcomeClass::clean, 0};
  if (e <= cfg.t) return {OutcomeClass::corrected, e};
  const bool undetected = bernoulli(rng, cfg.undetected_probability(e));
  return {undetected ? OutcomeClass::sdc : OutcomeClass::detected_ue, 0};
}

OutcomeClass decode_access(const EccConfig& cfg, std::span<const unsigned> erroneous_devices,
                           Rng& rng) {
  ErrorPattern p = empty_pattern(cfg);
  for (unsigned d : erroneous_devices) merge(p, device_error_pattern(cfg, d));
  OutcomeClass out = OutcomeClass::clean;
  for (unsigned cw = 0; cw < cfg.codewords_per_access; ++cw) out = combine(out, decode(cfg, p, rng).cls);
  return out;
}

ScrubOverhead scrub_overhead(double capacity_bytes, double period_s,
                             double peak_bandwidth_bytes_per_s) {
  if (capacity_bytes < 0.0 || period_s <= 0.0 || peak_bandwidth_bytes_per_s <= 0.0)
    throw ConfigError("scrub_overhead needs capacity >= 0 and positive period and bandwidth");
  const double rate = 2.0 * capacity_bytes / period_s;
  return {rate, rate / peak_bandwidth_bytes_per_s};
}

}  // namespace rampart::ecc

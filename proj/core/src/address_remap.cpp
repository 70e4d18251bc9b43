#include "rampart/address_remap.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <thread>

#include <nlohmann/json.hpp>

#include "rampart/error.hpp"

namespace rampart::remap {

namespace {

std::uint32_t mask_of(unsigned width) { return (std::uint32_t{1} << width) - 1; }

std::uint32_t rotl(std::uint32_t v, unsigned s, unsigned width) {
  if (s == 0) return v;
  return ((v << s) | (v >> (width - s))) & mask_of(width);
}

std::uint32_t rotr(std::uint32_t v, unsigned s, unsigned width) {
  if (s == 0) return v;
  return ((v >> s) | (v << (width - s))) & mask_of(width);
}

std::uint32_t galois_forward(std::uint32_t s, std::uint32_t mask) {
  const std::uint32_t lsb = s & 1u;
  s >>= 1;
  if (lsb) s ^= mask;
  return s;
}

std::uint32_t galois_backward(std::uint32_t s, std::uint32_t mask, unsigned width) {
  const std::uint32_t top = (s >> (width - 1)) & 1u;
  if (top) s ^= mask;
  return ((s << 1) | top) & mask_of(width);
}

}  // namespace

std::string to_string(RemapKind kind) {
  return kind == RemapKind::rotate ? "rotate" : "lfsr";
}

RemapKind remap_kind_from_string(const std::string& name) {
  if (name == "rotate") return RemapKind::rotate;
  if (name == "lfsr") return RemapKind::lfsr;
  throw ConfigError("unknown remap kind '" + name + "' (expected rotate or lfsr)");
}

std::optional<std::uint32_t> maximal_galois_mask(unsigned width) {
  static constexpr std::uint32_t kMasks[] = {
      0x6,    0xC,     0x14,    0x30,    0x60,    0xB8,   0x110,  0x240,   0x500,
      0x829,  0x100D,  0x2015,  0x6000,  0xD008,  0x12000, 0x20400, 0x40023, 0x90000};
  if (width < 3 || width > 20) return std::nullopt;
  return kMasks[width - 3];
}

DeviceMap::DeviceMap(unsigned device_id, unsigned width, unsigned shift, RemapKind kind,
                     std::uint32_t spare_count)
    : device_id_(device_id), width_(width), shift_(shift), kind_(kind),
      spare_count_(spare_count) {
  if (width < kMinRowWidth || width > kMaxRowWidth)
    throw ConfigError("row width " + std::to_string(width) + " outside [" +
                      std::to_string(kMinRowWidth) + ", " + std::to_string(kMaxRowWidth) + "]");
  if (kind == RemapKind::rotate && shift >= width)
    throw ConfigError("shift " + std::to_string(shift) + " must be below width " +
                      std::to_string(width));
  if (kind == RemapKind::lfsr) {
    auto m = maximal_galois_mask(width);
    if (!m) throw ConfigError("lfsr remap supports widths 3..20, got " + std::to_string(width));
    galois_mask_ = *m;
  }
}

std::uint32_t DeviceMap::permute(std::uint32_t addr) const {
  if (kind_ == RemapKind::rotate) return rotl(addr, shift_, width_);
  if (addr == 0) return 0;
  for (unsigned i = 0; i < shift_; ++i) addr = galois_forward(addr, galois_mask_);
  return addr;
}

std::uint32_t DeviceMap::unpermute(std::uint32_t row) const {
  if (kind_ == RemapKind::rotate) return rotr(row, shift_, width_);
  if (row == 0) return 0;
  for (unsigned i = 0; i < shift_; ++i) row = galois_backward(row, galois_mask_, width_);
  return row;
}

void DeviceMap::add_repair(std::uint32_t internal_row, std::uint32_t spare_index) {
  if (internal_row >= row_count())
    throw ConfigError("repair key " + std::to_string(internal_row) + " is not a regular row");
  if (spare_index >= spare_count_)
    throw ConfigError("spare index " + std::to_string(spare_index) + " >= spare_count " +
                      std::to_string(spare_count_));
  if (repairs_.contains(internal_row))
    throw ConfigError("row " + std::to_string(internal_row) + " repaired twice");
  if (spare_owner_.contains(spare_index))
    throw ConfigError("spare " + std::to_string(spare_index) + " used twice");
  repairs_.emplace(internal_row, spare_index);
  spare_owner_.emplace(spare_index, internal_row);
}

InternalRow DeviceMap::map_row(RowAddress addr) const {
  const std::uint32_t r = permute(addr.value & mask_of(width_));
  if (!repairs_.empty()) {
    if (auto it = repairs_.find(r); it != repairs_.end()) return {row_count() + it->second};
  }
  return {r};
}

RowAddress DeviceMap::inverse_map(InternalRow row) const {
  if (is_spare(row)) {
    const std::uint32_t idx = row.value - row_count();
    auto it = spare_owner_.find(idx);
    if (it == spare_owner_.end())
      throw RemapError("spare row " + std::to_string(idx) + " of device " +
                       std::to_string(device_id_) + " has no controller address");
    return {unpermute(it->second), width_};
  }
  if (repairs_.contains(row.value))
    throw RemapError("row " + std::to_string(row.value) + " of device " +
                     std::to_string(device_id_) + " is retired and has no controller address");
  return {unpermute(row.value), width_};
}

bool DeviceMap::holds_data(InternalRow row) const {
  if (is_spare(row)) return spare_owner_.contains(row.value - row_count());
  return !repairs_.contains(row.value);
}

std::optional<InternalRow> DeviceMap::neighbor(InternalRow row, int offset) const {
  const bool spare = is_spare(row);
  const std::int64_t base = spare ? row_count() : 0;
  const std::int64_t size = spare ? spare_count_ : row_count();
  const std::int64_t pos = static_cast<std::int64_t>(row.value) - base + offset;
  if (pos < 0 || pos >= size) return std::nullopt;
  InternalRow n{static_cast<std::uint32_t>(base + pos)};
  if (!holds_data(n)) return std::nullopt;
  return n;
}

std::vector<RowAddress> victim_addresses(RowAddress aggressor, const DeviceMap& dev,
                                         unsigned level) {
  std::vector<RowAddress> out;
  if (level == 0) return out;
  const InternalRow r = dev.map_row(aggressor);
  for (int sign : {-1, 1}) {
    if (auto n = dev.neighbor(r, sign * static_cast<int>(level))) out.push_back(dev.inverse_map(*n));
  }
  std::sort(out.begin(), out.end());
  return out;
}

void RankGeometry::validate() const {
  if (data_devices == 0) throw ConfigError("rank needs at least one data device");
  if (ecc_devices > 2) throw ConfigError("ecc_devices must be 0, 1 or 2");
  if (row_width < kMinRowWidth || row_width > kMaxRowWidth)
    throw ConfigError("row_width " + std::to_string(row_width) + " out of range");
  if (banks_per_rank == 0) throw ConfigError("banks_per_rank must be positive");
  if (blast_radius == 0) throw ConfigError("blast_radius must be >= 1");
  if (device_maps.size() != total_devices())
    throw ConfigError("rank has " + std::to_string(total_devices()) + " devices but " +
                      std::to_string(device_maps.size()) + " device maps");
  for (std::size_t i = 0; i < device_maps.size(); ++i) {
    if (device_maps[i].width() != row_width)
      throw ConfigError("device " + std::to_string(i) + " map width differs from row_width");
    if (device_maps[i].device_id() != i)
      throw ConfigError("device map " + std::to_string(i) + " carries id " +
                        std::to_string(device_maps[i].device_id()));
  }
}

RankGeometry RankGeometry::shift_by_id(unsigned data_devices, unsigned ecc_devices,
                                       unsigned row_width, unsigned banks_per_rank,
                                       unsigned blast_radius, unsigned shift_multiplier,
                                       RemapKind kind) {
  RankGeometry g{data_devices, ecc_devices, row_width, banks_per_rank, blast_radius, {}};
  for (unsigned d = 0; d < g.total_devices(); ++d) {
    unsigned s = d * shift_multiplier;
    if (kind == RemapKind::rotate) s %= row_width;
    g.device_maps.emplace_back(d, row_width, s, kind);
  }
  g.validate();
  return g;
}

RankGeometry RankGeometry::identity(unsigned data_devices, unsigned ecc_devices,
                                    unsigned row_width, unsigned banks_per_rank,
                                    unsigned blast_radius) {
  RankGeometry g{data_devices, ecc_devices, row_width, banks_per_rank, blast_radius, {}};
  for (unsigned d = 0; d < g.total_devices(); ++d) g.device_maps.emplace_back(d, row_width, 0);
  g.validate();
  return g;
}

std::string to_string(VerificationStatus status) {
  switch (status) {
    case VerificationStatus::verified: return "verified";
    case VerificationStatus::sampled: return "sampled";
    case VerificationStatus::not_verified: return "not_verified";
  }
  return "not_verified";
}

std::string UniquenessReport::to_json(std::size_t max_listed) const {
  nlohmann::ordered_json j;
  j["status"] = to_string(status);
  j["width"] = width;
  j["radius"] = radius;
  j["checked_pairs"] = checked_pairs;
  j["violation_count"] = violations.size();
  auto list = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < violations.size() && i < max_listed; ++i) {
    const auto& v = violations[i];
    list.push_back(nlohmann::ordered_json::array({v.a, v.b, v.devices}));
  }
  j["violations"] = std::move(list);
  return j.dump();
}

namespace {

// Controller-address pairs (a < b) whose rows sit within `radius` of each
// other in `dev`, including pairs inside the spare region.
template <typename Fn>
void for_each_neighbor_pair(const DeviceMap& dev, unsigned radius, Fn&& fn) {
  auto visit_region = [&](std::uint32_t base, std::uint32_t size) {
    for (std::uint32_t pos = 0; pos < size; ++pos) {
      const InternalRow r{base + pos};
      if (!dev.holds_data(r)) continue;
      const std::uint32_t a = dev.inverse_map(r).value;
      for (unsigned d = 1; d <= radius && pos + d < size; ++d) {
        const InternalRow n{base + pos + d};
        if (!dev.holds_data(n)) continue;
        const std::uint32_t b = dev.inverse_map(n).value;
        fn(std::min(a, b), std::max(a, b));
      }
    }
  };
  visit_region(0, dev.row_count());
  if (dev.spare_count() > 0) visit_region(dev.row_count(), dev.spare_count());
}

bool are_neighbors(const DeviceMap& dev, std::uint32_t a, std::uint32_t b, unsigned radius) {
  const InternalRow ra = dev.map_row({a, dev.width()});
  const InternalRow rb = dev.map_row({b, dev.width()});
  if (dev.is_spare(ra) != dev.is_spare(rb)) return false;
  const std::uint32_t dist = ra.value > rb.value ? ra.value - rb.value : rb.value - ra.value;
  return dist >= 1 && dist <= radius;
}

struct PartialResult {
  std::uint64_t checked = 0;
  std::vector<NeighborViolation> violations;
};

// Each device reports only pairs for which it is the lowest device that holds
// them, so partitions never overlap.
PartialResult scan_devices(const RankGeometry& rank, unsigned radius, unsigned first,
                           unsigned stride) {
  PartialResult out;
  const auto& maps = rank.device_maps;
  for (unsigned d = first; d < maps.size(); d += stride) {
    for_each_neighbor_pair(maps[d], radius, [&](std::uint32_t a, std::uint32_t b) {
      ++out.checked;
      for (unsigned e = 0; e < d; ++e)
        if (are_neighbors(maps[e], a, b, radius)) return;
      std::vector<unsigned> devs{d};
      for (unsigned e = d + 1; e < maps.size(); ++e)
        if (are_neighbors(maps[e], a, b, radius)) devs.push_back(e);
      if (devs.size() >= 2) out.violations.push_back({a, b, std::move(devs)});
    });
  }
  return out;
}

}  // namespace

UniquenessReport verify_unique_neighbors(const RankGeometry& rank, unsigned radius,
                                         const VerifyOptions& options) {
  rank.validate();
  if (rank.total_devices() < 2) throw ConfigError("uniqueness needs at least two devices");
  if (radius == 0) throw ConfigError("radius must be >= 1");

  UniquenessReport report;
  report.width = rank.row_width;
  report.radius = radius;

  if (rank.row_width <= options.exhaustive_width_cap) {
    const unsigned workers =
        std::max(1u, std::min<unsigned>(options.workers, rank.total_devices()));
    std::vector<PartialResult> parts(workers);
    if (workers == 1) {
      parts[0] = scan_devices(rank, radius, 0, 1);
    } else {
      std::vector<std::thread> pool;
      for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&, w] { parts[w] = scan_devices(rank, radius, w, workers); });
      for (auto& t : pool) t.join();
    }
    for (auto& p : parts) {
      report.checked_pairs += p.checked;
      std::move(p.violations.begin(), p.violations.end(), std::back_inserter(report.violations));
    }
    report.status = VerificationStatus::verified;
  } else if (options.sample_addresses > 0) {
    std::mt19937_64 rng(options.sample_seed);
    std::uniform_int_distribution<std::uint32_t> pick(0, rank.row_count() - 1);
    std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
    for (std::uint64_t i = 0; i < options.sample_addresses; ++i) {
      const RowAddress a{pick(rng), rank.row_width};
      for (const auto& dev : rank.device_maps) {
        for (unsigned lvl = 1; lvl <= radius; ++lvl) {
          for (const auto& b : victim_addresses(a, dev, lvl)) {
            ++report.checked_pairs;
            const auto key = std::minmax(a.value, b.value);
            if (!seen.insert(key).second) continue;
            std::vector<unsigned> devs;
            for (const auto& e : rank.device_maps)
              if (are_neighbors(e, key.first, key.second, radius)) devs.push_back(e.device_id());
            if (devs.size() >= 2) report.violations.push_back({key.first, key.second, devs});
          }
        }
      }
    }
    report.status = VerificationStatus::sampled;
  }
  std::sort(report.violations.begin(), report.violations.end(),
            [](const auto& x, const auto& y) { return std::tie(x.a, x.b) < std::tie(y.a, y.b); });
  return report;
}

ShieldingReport check_repair_shielding(const DeviceMap& dev, unsigned radius,
                                       std::span<const DeviceMap> other_devices) {
  ShieldingReport report;
  std::vector<std::uint32_t> used;
  for (const auto& [row, spare] : dev.repair_table()) used.push_back(spare);
  std::sort(used.begin(), used.end());
  for (std::size_t i = 1; i < used.size(); ++i) {
    if (used[i] - used[i - 1] - 1 < radius) report.crowded_spares.emplace_back(used[i - 1], used[i]);
  }
  report.shielded = report.crowded_spares.empty();

  const std::uint32_t base = dev.row_count();
  for (std::uint32_t s : used) {
    const std::uint32_t a = dev.inverse_map({base + s}).value;
    for (unsigned d = 1; d <= radius; ++d) {
      auto n = dev.neighbor({base + s}, static_cast<int>(d));
      if (!n) continue;
      const std::uint32_t b = dev.inverse_map(*n).value;
      const auto [lo, hi] = std::minmax(a, b);
      for (const auto& other : other_devices) {
        if (other.device_id() == dev.device_id()) continue;
        if (are_neighbors(other, lo, hi, radius)) {
          report.duplicated_pairs.emplace_back(lo, hi);
          break;
        }
      }
    }
  }
  return report;
}

}  // namespace rampart::remap

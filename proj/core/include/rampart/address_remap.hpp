#pragma once

// Per-device row address remapping.
//
// Every device in a rank receives the same controller row address on an
// activate. A DeviceMap turns that address into the device's internal row.
// With a distinct map per device, the rows that physically neighbor a given
// row differ from device to device, so disturbance errors at any controller
// address land in a single device.
//
// Internal row identities: regular rows occupy [0, 2^width); spare rows are a
// separate contiguous region numbered 2^width + spare_index. The two regions
// are not physically adjacent.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rampart::remap {

inline constexpr unsigned kDefaultRowWidth = 16;
inline constexpr unsigned kMinRowWidth = 2;
inline constexpr unsigned kMaxRowWidth = 24;

/// Controller-visible row address.
struct RowAddress {
  std::uint32_t value = 0;
  unsigned width = kDefaultRowWidth;

  friend bool operator==(const RowAddress&, const RowAddress&) = default;
  friend auto operator<=>(const RowAddress&, const RowAddress&) = default;
};

/// Physical row inside one device's bank (regular or spare).
struct InternalRow {
  std::uint32_t value = 0;

  friend bool operator==(const InternalRow&, const InternalRow&) = default;
  friend auto operator<=>(const InternalRow&, const InternalRow&) = default;
};

enum class RemapKind {
  rotate,  ///< circular left shift by `shift` bits
  lfsr,    ///< `shift` steps of a maximal-length Galois LFSR (0 stays fixed)
};

std::string to_string(RemapKind kind);
RemapKind remap_kind_from_string(const std::string& name);

/// Galois (right-shift) feedback mask of a maximal-length LFSR for `width`
/// bits. Available for widths 3..20.
std::optional<std::uint32_t> maximal_galois_mask(unsigned width);

class DeviceMap {
 public:
  DeviceMap() = default;
  DeviceMap(unsigned device_id, unsigned width, unsigned shift,
            RemapKind kind = RemapKind::rotate, std::uint32_t spare_count = 0);

  unsigned device_id() const { return device_id_; }
  unsigned width() const { return width_; }
  unsigned shift() const { return shift_; }
  RemapKind kind() const { return kind_; }
  std::uint32_t row_count() const { return std::uint32_t{1} << width_; }
  std::uint32_t spare_count() const { return spare_count_; }

  /// internal regular row -> spare index
  const std::map<std::uint32_t, std::uint32_t>& repair_table() const { return repairs_; }

  /// Retire regular internal row `internal_row` onto spare `spare_index`.
  /// Throws ConfigError on out-of-range or duplicate keys/values.
  void add_repair(std::uint32_t internal_row, std::uint32_t spare_index);

  InternalRow map_row(RowAddress addr) const;

  /// Throws RemapError for unused spares and retired regular rows.
  RowAddress inverse_map(InternalRow row) const;

  bool is_spare(InternalRow row) const { return row.value >= row_count(); }

  /// True when some controller address currently resolves to `row`.
  bool holds_data(InternalRow row) const;

  /// Row at `offset` from `row` within the same region, if it exists and
  /// holds data. Regions do not wrap.
  std::optional<InternalRow> neighbor(InternalRow row, int offset) const;

  /// Pure permutation of the regular address space (no repairs applied).
  std::uint32_t permute(std::uint32_t addr) const;
  std::uint32_t unpermute(std::uint32_t row) const;

 private:
  unsigned device_id_ = 0;
  unsigned width_ = kDefaultRowWidth;
  unsigned shift_ = 0;
  RemapKind kind_ = RemapKind::rotate;
  std::uint32_t spare_count_ = 0;
  std::uint32_t galois_mask_ = 0;
  std::map<std::uint32_t, std::uint32_t> repairs_;      // internal -> spare index
  std::map<std::uint32_t, std::uint32_t> spare_owner_;  // spare index -> internal
};

/// Controller addresses whose rows sit exactly `level` rows away from the
/// aggressor's row in `dev`. Sorted ascending; one-sided at region edges.
std::vector<RowAddress> victim_addresses(RowAddress aggressor, const DeviceMap& dev,
                                         unsigned level);

struct RankGeometry {
  unsigned data_devices = 8;
  unsigned ecc_devices = 2;
  unsigned row_width = kDefaultRowWidth;
  unsigned banks_per_rank = 32;
  unsigned blast_radius = 1;
  std::vector<DeviceMap> device_maps;

  unsigned total_devices() const { return data_devices + ecc_devices; }
  std::uint32_t row_count() const { return std::uint32_t{1} << row_width; }

  /// Throws ConfigError when the invariants do not hold.
  void validate() const;

  /// Device i gets shift (i * shift_multiplier) mod width.
  static RankGeometry shift_by_id(unsigned data_devices, unsigned ecc_devices,
                                  unsigned row_width, unsigned banks_per_rank,
                                  unsigned blast_radius, unsigned shift_multiplier = 1,
                                  RemapKind kind = RemapKind::rotate);

  /// Remapping disabled: every device uses the identity map.
  static RankGeometry identity(unsigned data_devices, unsigned ecc_devices,
                               unsigned row_width, unsigned banks_per_rank,
                               unsigned blast_radius);
};

enum class VerificationStatus { verified, sampled, not_verified };
std::string to_string(VerificationStatus status);

struct NeighborViolation {
  std::uint32_t a = 0;  // a < b
  std::uint32_t b = 0;
  std::vector<unsigned> devices;  // ascending, size >= 2

  friend bool operator==(const NeighborViolation&, const NeighborViolation&) = default;
};

struct UniquenessReport {
  VerificationStatus status = VerificationStatus::not_verified;
  unsigned width = 0;
  unsigned radius = 0;
  /// Device/neighbor-pair incidences examined.
  std::uint64_t checked_pairs = 0;
  /// Sorted by (a, b).
  std::vector<NeighborViolation> violations;

  bool clean() const { return violations.empty() && status != VerificationStatus::not_verified; }

  /// {"violations": [[a, b, [devs]]...], "violation_count", "checked_pairs",
  /// "status", "width", "radius"}. `max_listed` truncates the list only;
  /// violation_count always carries the full count.
  std::string to_json(std::size_t max_listed = static_cast<std::size_t>(-1)) const;
};

struct VerifyOptions {
  unsigned exhaustive_width_cap = 20;
  /// Controller addresses sampled above the cap; 0 means report not_verified.
  std::uint64_t sample_addresses = 1u << 16;
  std::uint64_t sample_seed = 1;
  unsigned workers = 1;
};

UniquenessReport verify_unique_neighbors(const RankGeometry& rank, unsigned radius,
                                         const VerifyOptions& options = {});

struct ShieldingReport {
  bool shielded = true;
  /// Consecutive used spares with fewer than `radius` unused spares between.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> crowded_spares;
  /// Controller pairs that neighbor each other in the spare region of this
  /// device and also neighbor each other in another device.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> duplicated_pairs;

  bool passes_binning() const { return shielded && duplicated_pairs.empty(); }
};

ShieldingReport check_repair_shielding(const DeviceMap& dev, unsigned radius,
                                       std::span<const DeviceMap> other_devices = {});

}  // namespace rampart::remap

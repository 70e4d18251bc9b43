#pragma once

// Monte Carlo simulation of one rank under attack.
//
// Time advances in ticks; one tick is one tRC slot in which every attacked
// bank receives one activate. An activate restores its own row and disturbs
// rows within the blast radius in every device, each at that device's mapped
// location. A directed refresh issued after the N-th activate of a window is
// instantaneous: rows next to the refreshed set are disturbed once, then the
// refreshed rows are restored. Periodic auto-refresh restores row r of the
// regular region at ticks floor(r * APR / rows) + j * APR and is applied
// lazily. A row whose disturb count reaches its threshold flips; the error
// persists until a corrected read writes the address back.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rampart/address_remap.hpp"
#include "rampart/attack_models.hpp"
#include "rampart/ecc_model.hpp"
#include "rampart/mitigation_engine.hpp"
#include "rampart/timing_params.hpp"

namespace rampart::sim {

enum class SuccessCriterion {
  any_flip,        ///< any row flips in any device
  target_victims,  ///< a tracked victim of an attack aggressor flips
  two_device,      ///< one controller address holds errors in two devices
};

std::string to_string(SuccessCriterion c);
SuccessCriterion success_criterion_from_string(const std::string& name);

struct ScrubConfig {
  /// Full patrol pass period; unset disables patrol scrub.
  std::optional<double> patrol_period_s;
  /// Poisson application reads per second over the whole rank; 0 disables.
  double app_read_rate_per_s = 0.0;
};

/// Drive `aggressor` HC times at tick `tick` without mitigation in between.
struct ForcedSuccess {
  std::uint64_t tick = 0;
  unsigned bank = 0;
  std::uint32_t aggressor = 0;
};

struct SimScenario {
  remap::RankGeometry rank;
  ecc::EccConfig ecc;
  mitigation::MitigationConfig mitigation;
  std::optional<attack::AttackSpec> attack;
  unsigned hc = 1000;
  /// Threshold multiplier per disturb distance 1..R; empty means all 1.
  std::vector<double> hc_multipliers;
  unsigned bits_per_flip = ecc::kAllBits;
  TimingParams timing;
  /// Ticks per refresh interval; 0 means floor(tREF / tRC).
  std::uint64_t activates_per_interval = 0;
  std::uint64_t horizon_ticks = 0;
  ScrubConfig scrub;
  SuccessCriterion criterion = SuccessCriterion::any_flip;
  /// Victim level tracked by target_victims.
  unsigned tracked_level = 1;
  bool stop_on_success = false;
  std::vector<ForcedSuccess> forced;

  std::uint64_t ticks_per_interval() const;
  std::uint64_t seconds_to_ticks(double s) const;

  /// Throws ConfigError.
  void validate() const;
};

enum class EventKind { activate, rfm, flip, corrected, detected_ue, sdc, forced, retarget };

std::string to_string(EventKind k);

struct Event {
  std::uint64_t t = 0;
  EventKind kind = EventKind::activate;
  int device = -1;  // -1: rank-wide
  unsigned bank = 0;
  std::uint32_t controller_addr = 0;
  std::int64_t internal_row = -1;
  std::string detail;
};

/// One JSON object per line: {t, kind, device, bank, controller_addr,
/// internal_row, detail}.
std::string to_jsonl(const std::vector<Event>& events);

struct SimOutcome {
  bool success = false;
  std::optional<std::uint64_t> success_tick;
  std::uint64_t ticks = 0;
  std::uint64_t activates = 0;
  std::uint64_t rfms = 0;
  std::uint64_t flips = 0;
  std::uint64_t corrected = 0;
  std::uint64_t detected_ue = 0;
  std::uint64_t sdc = 0;
  std::uint64_t double_hammer_rfms = 0;  // RFMs that refreshed a level >= 2
  /// Terminal class per (bank, controller address) that saw an uncorrectable read.
  std::map<std::pair<unsigned, std::uint32_t>, ecc::OutcomeClass> terminal;
  /// Device error mask per (bank, controller address) at the end of the run.
  std::map<std::pair<unsigned, std::uint32_t>, std::uint32_t> errors;
  std::vector<Event> events;

  std::string summary_json() const;
};

struct RunOptions {
  bool log_events = false;
  bool log_activates = false;  // activate/rfm events for counter replay
};

class RankSimulator {
 public:
  explicit RankSimulator(SimScenario scenario);

  const SimScenario& scenario() const { return sc_; }

  SimOutcome run(std::uint64_t seed, const RunOptions& options = {});

  /// Disturb count of a row as of tick `t` (after the last run).
  std::uint32_t counter(unsigned device, unsigned bank, remap::InternalRow row, std::uint64_t t) const;

  /// Internal rows tracked by target_victims, indexed [device][bank].
  const std::vector<std::vector<std::vector<std::uint32_t>>>& tracked() const { return tracked_rows_; }

  /// Auto-refresh slot of a regular internal row within an interval.
  std::uint64_t refresh_slot(std::uint32_t internal_row) const;

 private:
  struct Cell {
    std::uint32_t value = 0;
    std::uint32_t epoch = 0;
    std::uint32_t stamp = 0;
  };
  struct TrialState;

  std::size_t cell_index(unsigned device, unsigned bank, std::uint32_t row) const;
  std::uint32_t epoch_at(std::uint32_t row, std::uint64_t t) const;
  Cell& cell(unsigned device, unsigned bank, std::uint32_t row, std::uint64_t t);
  void restore(unsigned device, unsigned bank, std::uint32_t row, std::uint64_t t);
  void disturb(unsigned device, unsigned bank, std::uint32_t row, unsigned distance, std::uint64_t t,
               TrialState& st);
  void activate(unsigned bank, std::uint32_t addr, std::uint64_t t, TrialState& st);
  void apply_rfm(const mitigation::RfmResult& rfm, std::uint64_t t, TrialState& st);
  void force_success(const ForcedSuccess& f, TrialState& st);
  void read_address(unsigned bank, std::uint32_t addr, std::uint64_t t, TrialState& st);
  void mark_flip(unsigned device, unsigned bank, std::uint32_t row, std::uint64_t t, TrialState& st);
  void schedule_patrol(unsigned bank, std::uint32_t addr, std::uint64_t t, TrialState& st);
  void schedule_app_read(unsigned bank, std::uint32_t addr, std::uint64_t t, TrialState& st);
  void check_retarget(unsigned device, unsigned bank, std::uint32_t addr, std::uint64_t t,
                      TrialState& st);

  SimScenario sc_;
  std::uint64_t apr_;
  std::uint32_t rows_;
  std::uint32_t region_;  // rows + largest spare count
  unsigned banks_;        // banks with allocated state
  std::uint64_t patrol_ticks_ = 0;
  double app_rate_per_tick_ = 0.0;  // per address
  std::vector<std::uint32_t> thresholds_;  // per distance, index 0 = distance 1
  std::vector<Cell> cells_;
  std::uint32_t stamp_ = 0;
  std::uint64_t last_tick_ = 0;
  attack::DecoyPool decoys_;
  std::optional<attack::Schedule> schedule_;
  /// [device][bank] -> sorted internal rows tracked for target_victims.
  std::vector<std::vector<std::vector<std::uint32_t>>> tracked_rows_;
};

struct SuccessRate {
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  double rate = 0.0;
  double sigma = 0.0;  // binomial standard error of the rate
  double lo = 0.0;     // rate - 3 sigma, floored at 0
  double hi = 0.0;     // rate + 3 sigma, capped at 1
};

/// Independent trials with seeds derive_seed(seed, trial); the result does
/// not depend on the worker count.
SuccessRate empirical_success_rate(const SimScenario& scenario, std::uint64_t trials,
                                   std::uint64_t seed, unsigned workers = 1);

}  // namespace rampart::sim

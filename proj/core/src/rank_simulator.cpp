#include "rampart/rank_simulator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <queue>
#include <set>
#include <thread>
#include <variant>

#include <nlohmann/json.hpp>

#include "rampart/error.hpp"

namespace rampart::sim {

using nlohmann::ordered_json;

std::string to_string(SuccessCriterion c) {
  switch (c) {
    case SuccessCriterion::any_flip: return "any_flip";
    case SuccessCriterion::target_victims: return "target_victims";
    case SuccessCriterion::two_device: return "two_device";
  }
  return "any_flip";
}

SuccessCriterion success_criterion_from_string(const std::string& name) {
  if (name == "any_flip") return SuccessCriterion::any_flip;
  if (name == "target_victims") return SuccessCriterion::target_victims;
  if (name == "two_device") return SuccessCriterion::two_device;
  throw ConfigError("unknown success criterion '" + name +
                    "' (expected any_flip, target_victims or two_device)");
}

std::string to_string(EventKind k) {
  switch (k) {
    case EventKind::activate: return "activate";
    case EventKind::rfm: return "rfm";
    case EventKind::flip: return "flip";
    case EventKind::corrected: return "corrected";
    case EventKind::detected_ue: return "detected_ue";
    case EventKind::sdc: return "sdc";
    case EventKind::forced: return "forced";
    case EventKind::retarget: return "retarget";
  }
  return "activate";
}

std::string to_jsonl(const std::vector<Event>& events) {
  std::string out;
  for (const auto& e : events) {
    ordered_json j;
    j["t"] = e.t;
    j["kind"] = to_string(e.kind);
    j["device"] = e.device;
    j["bank"] = e.bank;
    j["controller_addr"] = e.controller_addr;
    j["internal_row"] = e.internal_row;
    j["detail"] = e.detail;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::string SimOutcome::summary_json() const {
  ordered_json j;
  j["success"] = success;
  j["success_tick"] = success_tick ? ordered_json(*success_tick) : ordered_json(nullptr);
  j["ticks"] = ticks;
  j["activates"] = activates;
  j["rfms"] = rfms;
  j["double_hammer_rfms"] = double_hammer_rfms;
  j["flips"] = flips;
  j["corrected"] = corrected;
  j["detected_ue"] = detected_ue;
  j["sdc"] = sdc;
  auto term = ordered_json::array();
  for (const auto& [key, cls] : terminal)
    term.push_back({{"bank", key.first}, {"controller_addr", key.second}, {"class", ecc::to_string(cls)}});
  j["terminal"] = std::move(term);
  auto errs = ordered_json::array();
  for (const auto& [key, mask] : errors) {
    auto devs = ordered_json::array();
    for (unsigned d = 0; d < 32; ++d)
      if (mask & (1u << d)) devs.push_back(d);
    errs.push_back({{"bank", key.first}, {"controller_addr", key.second}, {"devices", devs}});
  }
  j["errors"] = std::move(errs);
  return j.dump();
}

std::uint64_t SimScenario::ticks_per_interval() const {
  return activates_per_interval ? activates_per_interval : timing.activates_per_refresh();
}

std::uint64_t SimScenario::seconds_to_ticks(double s) const {
  return static_cast<std::uint64_t>(std::llround(s / (timing.trc_ns * 1e-9)));
}

void SimScenario::validate() const {
  rank.validate();
  if (rank.total_devices() > 32) throw ConfigError("simulator supports at most 32 devices");
  ecc.validate();
  if (ecc.devices() != rank.total_devices())
    throw ConfigError("ecc layout covers " + std::to_string(ecc.devices()) + " devices but rank has " +
                      std::to_string(rank.total_devices()));
  mitigation.validate();
  if (hc < 1) throw ConfigError("hc must be >= 1");
  if (!hc_multipliers.empty() && hc_multipliers.size() != rank.blast_radius)
    throw ConfigError("hc_multipliers needs one entry per distance up to blast_radius");
  for (double m : hc_multipliers)
    if (!(m > 0.0)) throw ConfigError("hc_multipliers must be positive");
  if (bits_per_flip == 0) throw ConfigError("bits_per_flip must be positive");
  if (ticks_per_interval() == 0) throw ConfigError("activates_per_interval must be positive");
  if (tracked_level < 1) throw ConfigError("tracked_level must be >= 1");
  if (scrub.patrol_period_s && !(*scrub.patrol_period_s > 0.0))
    throw ConfigError("patrol period must be positive");
  if (scrub.app_read_rate_per_s < 0.0) throw ConfigError("app_read_rate must be >= 0");
  if (attack) {
    attack->validate();
    if (attack->channels != 1)
      throw ConfigError("the rank simulator models one channel; use analysis aggregation for more");
    if (attack->banks > rank.banks_per_rank)
      throw ConfigError("attack banks exceed banks_per_rank");
    for (auto a : attack->aggressors)
      if (a >= rank.row_count())
        throw ConfigError("aggressor " + std::to_string(a) + " outside the row address space");
    if (attack->victim && *attack->victim >= rank.row_count())
      throw ConfigError("victim " + std::to_string(*attack->victim) + " outside the row address space");
  }
  for (const auto& f : forced) {
    if (f.aggressor >= rank.row_count())
      throw ConfigError("forced aggressor " + std::to_string(f.aggressor) + " outside the row address space");
    if (f.bank >= rank.banks_per_rank) throw ConfigError("forced bank out of range");
  }
}

namespace {
constexpr std::size_t kMaxCells = std::size_t{1} << 24;

using Generator = std::variant<attack::LowFreqGenerator, attack::HighFreqGenerator>;

enum class ReadKind { patrol, app };

struct PendingRead {
  std::uint64_t tick;
  std::uint64_t seq;
  ReadKind kind;
  unsigned bank;
  std::uint32_t addr;
  bool operator>(const PendingRead& o) const {
    return std::tie(tick, seq) > std::tie(o.tick, o.seq);
  }
};
}  // namespace

struct RankSimulator::TrialState {
  TrialState(const SimScenario& sc, std::uint64_t seed, RunOptions o)
      : rng(seed), mit(sc.mitigation, std::max(1u, sc.rank.banks_per_rank), derive_seed(seed, 1)), opt(o) {}

  Rng rng;
  mitigation::MitigationState mit;
  RunOptions opt;
  SimOutcome out;
  std::vector<Generator> gens;
  std::vector<unsigned> gen_bank;
  std::priority_queue<PendingRead, std::vector<PendingRead>, std::greater<>> reads;
  std::uint64_t seq = 0;
  /// [bank] -> devices whose shared-victim attack already succeeded.
  std::vector<std::vector<bool>> succeeded;
  /// [bank][stream] -> current stream for oracle retargeting.
  std::vector<std::vector<attack::AttackStream>> streams;

  void log(Event e) {
    if (opt.log_events) out.events.push_back(std::move(e));
  }
  void succeed(std::uint64_t t) {
    if (!out.success) {
      out.success = true;
      out.success_tick = t;
    }
  }
};

RankSimulator::RankSimulator(SimScenario scenario) : sc_(std::move(scenario)) {
  sc_.validate();
  apr_ = sc_.ticks_per_interval();
  rows_ = sc_.rank.row_count();
  std::uint32_t spares = 0;
  for (const auto& d : sc_.rank.device_maps) spares = std::max(spares, d.spare_count());
  region_ = rows_ + spares;

  banks_ = 1;
  if (sc_.attack) banks_ = std::max(banks_, sc_.attack->banks);
  for (const auto& f : sc_.forced) banks_ = std::max(banks_, f.bank + 1);
  const std::size_t cells = static_cast<std::size_t>(sc_.rank.total_devices()) * banks_ * region_;
  if (cells > kMaxCells)
    throw ConfigError("simulated state of " + std::to_string(cells) +
                      " rows exceeds the dense limit; reduce row_width, devices or banks");
  cells_.assign(cells, Cell{});

  for (unsigned d = 1; d <= sc_.rank.blast_radius; ++d) {
    const double m = sc_.hc_multipliers.empty() ? 1.0 : sc_.hc_multipliers[d - 1];
    thresholds_.push_back(std::max<std::uint32_t>(1, static_cast<std::uint32_t>(std::ceil(sc_.hc * m))));
  }
  if (sc_.scrub.patrol_period_s)
    patrol_ticks_ = std::max<std::uint64_t>(1, sc_.seconds_to_ticks(*sc_.scrub.patrol_period_s));
  if (sc_.scrub.app_read_rate_per_s > 0.0)
    app_rate_per_tick_ = sc_.scrub.app_read_rate_per_s * sc_.timing.trc_ns * 1e-9 /
                         (static_cast<double>(sc_.rank.banks_per_rank) * rows_);

  std::vector<std::uint32_t> aggressors;
  if (sc_.attack) {
    const auto& a = *sc_.attack;
    if (a.victim) {
      schedule_ = attack::orchestrate(sc_.rank, a);
      aggressors = schedule_->plan->aggressors;
    } else {
      aggressors = a.aggressors;
    }
    if (a.pattern == attack::Pattern::low_freq && sc_.mitigation.raaimt > a.k) {
      const unsigned guard = a.decoy_guard ? a.decoy_guard
                                           : attack::default_decoy_guard(sc_.rank.blast_radius,
                                                                         sc_.mitigation.victim_levels);
      decoys_ = attack::DecoyPool(sc_.rank, aggressors, guard);
      if (decoys_.size() == 0) throw ConfigError("no decoy rows satisfy the guard distance");
    }
  }

  tracked_rows_.assign(sc_.rank.total_devices(), std::vector<std::vector<std::uint32_t>>(banks_));
  if (sc_.attack) {
    for (const auto& dev : sc_.rank.device_maps) {
      std::vector<std::uint32_t> rows;
      for (std::uint32_t a : aggressors) {
        const auto r = dev.map_row({a, sc_.rank.row_width});
        for (int sign : {-1, 1})
          if (auto n = dev.neighbor(r, sign * static_cast<int>(sc_.tracked_level))) rows.push_back(n->value);
      }
      std::sort(rows.begin(), rows.end());
      rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
      for (unsigned b = 0; b < sc_.attack->banks; ++b) tracked_rows_[dev.device_id()][b] = rows;
    }
  }
}

std::uint64_t RankSimulator::refresh_slot(std::uint32_t internal_row) const {
  if (internal_row < rows_) return static_cast<std::uint64_t>(internal_row) * apr_ / rows_;
  const std::uint64_t spares = std::max<std::uint32_t>(1, region_ - rows_);
  return static_cast<std::uint64_t>(internal_row - rows_) * apr_ / spares;
}

std::uint32_t RankSimulator::epoch_at(std::uint32_t row, std::uint64_t t) const {
  const std::uint64_t slot = refresh_slot(row);
  return t < slot ? 0 : static_cast<std::uint32_t>((t - slot) / apr_ + 1);
}

std::size_t RankSimulator::cell_index(unsigned device, unsigned bank, std::uint32_t row) const {
  return (static_cast<std::size_t>(device) * banks_ + bank) * region_ + row;
}

RankSimulator::Cell& RankSimulator::cell(unsigned device, unsigned bank, std::uint32_t row,
                                         std::uint64_t t) {
  Cell& c = cells_[cell_index(device, bank, row)];
  const std::uint32_t e = epoch_at(row, t);
  if (c.stamp != stamp_ || c.epoch != e) c = Cell{0, e, stamp_};
  return c;
}

std::uint32_t RankSimulator::counter(unsigned device, unsigned bank, remap::InternalRow row,
                                     std::uint64_t t) const {
  if (bank >= banks_ || row.value >= region_ || device >= sc_.rank.total_devices()) return 0;
  const Cell& c = cells_[cell_index(device, bank, row.value)];
  if (c.stamp != stamp_ || c.epoch != epoch_at(row.value, t)) return 0;
  return c.value;
}

void RankSimulator::restore(unsigned device, unsigned bank, std::uint32_t row, std::uint64_t t) {
  cell(device, bank, row, t).value = 0;
}

void RankSimulator::mark_flip(unsigned device, unsigned bank, std::uint32_t row, std::uint64_t t,
                              TrialState& st) {
  const auto& dev = sc_.rank.device_maps[device];
  const std::uint32_t addr = dev.inverse_map({row}).value;
  auto& mask = st.out.errors[{bank, addr}];
  const std::uint32_t bit = 1u << device;
  if (mask & bit) return;
  const bool was_clean = mask == 0;
  mask |= bit;
  ++st.out.flips;
  st.log({t, EventKind::flip, static_cast<int>(device), bank, addr, row, ""});

  switch (sc_.criterion) {
    case SuccessCriterion::any_flip: st.succeed(t); break;
    case SuccessCriterion::target_victims: {
      const auto& tr = tracked_rows_[device][bank];
      if (std::binary_search(tr.begin(), tr.end(), row)) st.succeed(t);
      break;
    }
    case SuccessCriterion::two_device:
      if (std::popcount(mask) >= 2) st.succeed(t);
      break;
  }
  if (was_clean) {
    if (patrol_ticks_) schedule_patrol(bank, addr, t, st);
    if (app_rate_per_tick_ > 0.0) schedule_app_read(bank, addr, t, st);
  }
  check_retarget(device, bank, addr, t, st);
}

void RankSimulator::disturb(unsigned device, unsigned bank, std::uint32_t row, unsigned distance,
                            std::uint64_t t, TrialState& st) {
  Cell& c = cell(device, bank, row, t);
  ++c.value;
  if (c.value >= thresholds_[distance - 1]) mark_flip(device, bank, row, t, st);
}

void RankSimulator::activate(unsigned bank, std::uint32_t addr, std::uint64_t t, TrialState& st) {
  ++st.out.activates;
  if (st.opt.log_activates) st.log({t, EventKind::activate, -1, bank, addr, -1, ""});
  if (!st.out.errors.empty()) {
    auto it = st.out.errors.find({bank, addr});
    if (it != st.out.errors.end() && it->second != 0) read_address(bank, addr, t, st);
  }
  const unsigned radius = sc_.rank.blast_radius;
  for (const auto& dev : sc_.rank.device_maps) {
    const unsigned d = dev.device_id();
    const auto r = dev.map_row({addr, sc_.rank.row_width});
    restore(d, bank, r.value, t);
    for (unsigned dist = 1; dist <= radius; ++dist) {
      for (int sign : {-1, 1}) {
        if (auto n = dev.neighbor(r, sign * static_cast<int>(dist))) disturb(d, bank, n->value, dist, t, st);
      }
    }
  }
}

void RankSimulator::apply_rfm(const mitigation::RfmResult& rfm, std::uint64_t t, TrialState& st) {
  ++st.out.rfms;
  if (rfm.levels.back() >= 2) ++st.out.double_hammer_rfms;
  std::string levels;
  for (unsigned l : rfm.levels) levels += (levels.empty() ? "" : ",") + std::to_string(l);
  const unsigned radius = sc_.rank.blast_radius;
  for (const auto& dev : sc_.rank.device_maps) {
    const unsigned d = dev.device_id();
    if (st.opt.log_activates) {
      const auto target = dev.map_row({rfm.target_row, sc_.rank.row_width});
      st.log({t, EventKind::rfm, static_cast<int>(d), rfm.bank, rfm.target_row, target.value, "levels=" + levels});
    }
    std::vector<std::uint32_t> refreshed;
    for (const auto& [row, level] : mitigation::refreshed_rows(rfm, dev)) refreshed.push_back(row.value);
    std::sort(refreshed.begin(), refreshed.end());
    for (std::uint32_t x : refreshed) {
      for (unsigned dist = 1; dist <= radius; ++dist) {
        for (int sign : {-1, 1}) {
          auto n = dev.neighbor({x}, sign * static_cast<int>(dist));
          if (n && !std::binary_search(refreshed.begin(), refreshed.end(), n->value))
            disturb(d, rfm.bank, n->value, dist, t, st);
        }
      }
    }
    for (std::uint32_t x : refreshed) restore(d, rfm.bank, x, t);
  }
}

void RankSimulator::force_success(const ForcedSuccess& f, TrialState& st) {
  st.log({f.tick, EventKind::forced, -1, f.bank, f.aggressor, -1, "hc=" + std::to_string(sc_.hc)});
  const unsigned radius = sc_.rank.blast_radius;
  for (const auto& dev : sc_.rank.device_maps) {
    const unsigned d = dev.device_id();
    const auto r = dev.map_row({f.aggressor, sc_.rank.row_width});
    restore(d, f.bank, r.value, f.tick);
    for (unsigned dist = 1; dist <= radius; ++dist) {
      for (int sign : {-1, 1}) {
        auto n = dev.neighbor(r, sign * static_cast<int>(dist));
        if (!n) continue;
        Cell& c = cell(d, f.bank, n->value, f.tick);
        c.value = std::max(c.value, thresholds_[dist - 1]);
        mark_flip(d, f.bank, n->value, f.tick, st);
      }
    }
  }
}

void RankSimulator::read_address(unsigned bank, std::uint32_t addr, std::uint64_t t, TrialState& st) {
  auto it = st.out.errors.find({bank, addr});
  if (it == st.out.errors.end() || it->second == 0) return;
  const std::uint32_t mask = it->second;
  ecc::ErrorPattern pattern = ecc::empty_pattern(sc_.ecc);
  for (unsigned d = 0; d < 32; ++d)
    if (mask & (1u << d)) ecc::merge(pattern, ecc::device_error_pattern(sc_.ecc, d, sc_.bits_per_flip));
  ecc::OutcomeClass cls = ecc::OutcomeClass::clean;
  for (unsigned cw = 0; cw < sc_.ecc.codewords_per_access; ++cw)
    cls = ecc::combine(cls, ecc::decode(sc_.ecc, pattern, st.rng).cls);

  if (cls == ecc::OutcomeClass::corrected) {
    ++st.out.corrected;
    st.log({t, EventKind::corrected, -1, bank, addr, -1, "mask=" + std::to_string(mask)});
    st.out.errors.erase(it);
    for (const auto& dev : sc_.rank.device_maps)
      restore(dev.device_id(), bank, dev.map_row({addr, sc_.rank.row_width}).value, t);
    return;
  }
  if (st.out.terminal.contains({bank, addr})) return;
  st.out.terminal[{bank, addr}] = cls;
  if (cls == ecc::OutcomeClass::sdc) {
    ++st.out.sdc;
    st.log({t, EventKind::sdc, -1, bank, addr, -1, "mask=" + std::to_string(mask)});
  } else {
    ++st.out.detected_ue;
    st.log({t, EventKind::detected_ue, -1, bank, addr, -1, "mask=" + std::to_string(mask)});
  }
}

void RankSimulator::schedule_patrol(unsigned bank, std::uint32_t addr, std::uint64_t t, TrialState& st) {
  const std::uint64_t total = static_cast<std::uint64_t>(sc_.rank.banks_per_rank) * rows_;
  const std::uint64_t index = static_cast<std::uint64_t>(bank) * rows_ + addr;
  const std::uint64_t offset = static_cast<std::uint64_t>(
      static_cast<long double>(index) * patrol_ticks_ / total);
  const std::uint64_t phase = t % patrol_ticks_;
  std::uint64_t next = t - phase + offset;
  if (next <= t) next += patrol_ticks_;
  st.reads.push({next, st.seq++, ReadKind::patrol, bank, addr});
}

void RankSimulator::schedule_app_read(unsigned bank, std::uint32_t addr, std::uint64_t t, TrialState& st) {
  std::exponential_distribution<double> gap(app_rate_per_tick_);
  const double g = gap(st.rng);
  const std::uint64_t next = t + 1 + static_cast<std::uint64_t>(std::min(g, 1e18));
  st.reads.push({next, st.seq++, ReadKind::app, bank, addr});
}

void RankSimulator::check_retarget(unsigned device, unsigned bank, std::uint32_t addr, std::uint64_t t,
                                   TrialState& st) {
  if (!schedule_ || !schedule_->plan || !schedule_->oracle) return;
  if (addr != schedule_->plan->victim || bank >= st.succeeded.size()) return;
  st.succeeded[bank][device] = true;
  for (std::size_t i = 0; i < st.streams[bank].size(); ++i) {
    auto& s = st.streams[bank][i];
    if (s.device != device) continue;
    auto next = attack::retarget(s, *schedule_->plan, st.succeeded[bank]);
    if (!next) continue;
    s = *next;
    for (std::size_t g = 0; g < st.gens.size(); ++g) {
      if (st.gen_bank[g] != bank) continue;
      std::visit([&](auto& gen) { gen.retarget(static_cast<unsigned>(i), {s.aggressor}); }, st.gens[g]);
    }
    st.log({t, EventKind::retarget, static_cast<int>(s.device), bank, s.aggressor, -1,
            "stream=" + std::to_string(i)});
  }
}

SimOutcome RankSimulator::run(std::uint64_t seed, const RunOptions& options) {
  ++stamp_;
  if (stamp_ == 0) {
    std::fill(cells_.begin(), cells_.end(), Cell{});
    stamp_ = 1;
  }
  TrialState st(sc_, seed, options);

  if (sc_.attack) {
    const auto& a = *sc_.attack;
    st.succeeded.assign(a.banks, std::vector<bool>(sc_.rank.total_devices(), false));
    st.streams.assign(a.banks, {});
    for (unsigned b = 0; b < a.banks; ++b) {
      std::vector<std::vector<std::uint32_t>> sets;
      if (schedule_) {
        for (const auto& s : schedule_->streams) {
          if (s.bank != b || s.channel != 0) continue;
          st.streams[b].push_back(s);
          sets.push_back({s.aggressor});
        }
      } else {
        sets.assign(a.k, a.aggressors);
      }
      if (a.pattern == attack::Pattern::low_freq)
        st.gens.emplace_back(attack::LowFreqGenerator(std::move(sets), sc_.mitigation.raaimt, decoys_, b));
      else
        st.gens.emplace_back(attack::HighFreqGenerator(std::move(sets), b));
      st.gen_bank.push_back(b);
    }
  }

  std::vector<ForcedSuccess> forced = sc_.forced;
  std::stable_sort(forced.begin(), forced.end(),
                   [](const auto& x, const auto& y) { return x.tick < y.tick; });
  std::size_t next_forced = 0;

  const bool attacking = !st.gens.empty();
  std::uint64_t t = 0;
  while (t < sc_.horizon_ticks) {
    while (next_forced < forced.size() && forced[next_forced].tick <= t) force_success(forced[next_forced++], st);
    while (!st.reads.empty() && st.reads.top().tick <= t) {
      const PendingRead r = st.reads.top();
      st.reads.pop();
      read_address(r.bank, r.addr, t, st);
      auto it = st.out.errors.find({r.bank, r.addr});
      if (it == st.out.errors.end() || st.out.terminal.contains({r.bank, r.addr})) continue;
      if (r.kind == ReadKind::patrol) schedule_patrol(r.bank, r.addr, t, st);
      else schedule_app_read(r.bank, r.addr, t, st);
    }
    if (attacking) {
      for (std::size_t g = 0; g < st.gens.size(); ++g) {
        const unsigned bank = st.gen_bank[g];
        const attack::Activate act = std::visit(
            [&](auto& gen) {
              if constexpr (std::is_same_v<std::decay_t<decltype(gen)>, attack::LowFreqGenerator>)
                return gen.next(st.rng);
              else
                return gen.next();
            },
            st.gens[g]);
        activate(bank, act.row, t, st);
        if (st.mit.record_activate(bank, act.row)) apply_rfm(st.mit.issue_rfm(bank, st.rng), t, st);
      }
    }
    if (sc_.stop_on_success && st.out.success) {
      ++t;
      break;
    }
    if (attacking) {
      ++t;
    } else {
      std::uint64_t nt = sc_.horizon_ticks;
      if (next_forced < forced.size()) nt = std::min(nt, forced[next_forced].tick);
      if (!st.reads.empty()) nt = std::min(nt, st.reads.top().tick);
      t = std::max(t + 1, nt);
    }
  }
  st.out.ticks = std::min(t, sc_.horizon_ticks);
  last_tick_ = st.out.ticks;
  for (auto it = st.out.errors.begin(); it != st.out.errors.end();)
    it = it->second == 0 ? st.out.errors.erase(it) : std::next(it);
  return std::move(st.out);
}

SuccessRate empirical_success_rate(const SimScenario& scenario, std::uint64_t trials,
                                   std::uint64_t seed, unsigned workers) {
  workers = std::max(1u, workers);
  SimScenario sc = scenario;
  sc.stop_on_success = true;
  std::vector<std::uint64_t> wins(workers, 0);
  auto work = [&](unsigned w) {
    RankSimulator sim(sc);
    for (std::uint64_t i = w; i < trials; i += workers)
      if (sim.run(derive_seed(seed, i)).success) ++wins[w];
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }
  SuccessRate r;
  r.trials = trials;
  for (auto x : wins) r.successes += x;
  if (trials > 0) {
    r.rate = static_cast<double>(r.successes) / static_cast<double>(trials);
    r.sigma = std::sqrt(r.rate * (1.0 - r.rate) / static_cast<double>(trials));
  }
  r.lo = std::max(0.0, r.rate - 3.0 * r.sigma);
  r.hi = std::min(1.0, r.rate + 3.0 * r.sigma);
  return r;
}

}  // namespace rampart::sim

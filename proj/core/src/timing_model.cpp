#include "rampart/timing_model.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <optional>
#include <queue>
#include <sstream>
#include <thread>

#include "rampart/error.hpp"
#include "rampart/random.hpp"

namespace rampart::timing {

using mitigation::Scheme;

std::string to_string(Workload w) { return w == Workload::rand ? "rand" : "hamR"; }

Workload workload_from_string(const std::string& name) {
  if (name == "rand") return Workload::rand;
  if (name == "hamR" || name == "hamr") return Workload::hamr;
  throw ConfigError("unknown workload '" + name + "' (expected rand or hamR)");
}

void BandwidthConfig::validate() const {
  if (ranks < 1 || bank_groups < 1 || banks_per_group < 1) throw ConfigError("bank geometry must be positive");
  if (queue_depth < 1) throw ConfigError("queue_depth must be >= 1");
  if (rows_per_bank < 2 || lines_per_row < 1) throw ConfigError("rows_per_bank >= 2 and lines_per_row >= 1");
  if (write_fraction < 0.0 || write_fraction > 1.0) throw ConfigError("write_fraction outside [0, 1]");
  if (hot_fraction < 0.0 || hot_fraction > 1.0) throw ConfigError("hot_fraction outside [0, 1]");
  if (!(duration_ns > 0.0) || warmup_ns < 0.0) throw ConfigError("duration must be positive, warm-up >= 0");
}

namespace {

using Ps = std::int64_t;  // picoseconds
constexpr Ps kNever = std::numeric_limits<Ps>::max() / 4;

Ps ps(double ns) { return static_cast<Ps>(std::llround(ns * 1000.0)); }

struct Request {
  unsigned bank = 0;  // flat: rank * banks_per_rank + bank
  std::uint32_t row = 0;
  bool write = false;
  Ps arrival = 0;
  std::uint64_t seq = 0;
};

struct Bank {
  std::int64_t open_row = -1;
  Ps ready_act = 0;  // tRC, tRP and refresh/RFM blocking
  Ps ready_col = 0;
  Ps ready_pre = 0;
  Ps last_act = -kNever;
};

struct Group {
  Ps next_col = 0;   // tCCD_L after the last column command
  Ps next_read = 0;  // tWTR_L after the last write burst
  Ps next_write = 0;  // tCCD_L_WR after the last write command
};

struct Timeline {
  Ps act = -1;  // -1: row hit
  Ps col = 0;
  Ps data = 0;
};

struct PendingOp {
  Ps due = 0;
  bool rfm = false;
  unsigned set = 0;  // flat: rank * banks_per_group + bank index
  bool operator>(const PendingOp& o) const { return due != o.due ? due > o.due : set > o.set; }
};

class Channel {
 public:
  Channel(const BandwidthConfig& cfg, Workload w, Scheme scheme, unsigned raaimt)
      : cfg_(cfg),
        workload_(w),
        scheme_(scheme),
        raaimt_(raaimt),
        bpr_(cfg.banks_per_rank()),
        nbanks_(cfg.ranks * bpr_),
        banks_(nbanks_),
        groups_(cfg.ranks * cfg.bank_groups),
        bac_(nbanks_, 0),
        rfm_pending_(cfg.ranks * cfg.banks_per_group, false),
        rng_(cfg.seed) {
    const TimingParams& t = cfg.timing;
    trc_ = ps(t.trc_ns);
    tras_ = ps(t.tras_ns);
    trp_ = ps(t.trp_ns);
    trcd_ = ps(t.trcd_ns);
    cl_ = ps(t.cl_ns);
    cwl_ = ps(t.cwl_ns);
    tburst_ = ps(t.tburst_ns);
    twr_ = ps(t.twr_ns);
    trtp_ = ps(t.trtp_ns);
    tccd_l_ = ps(t.tccd_l_ns);
    twtr_l_ = ps(t.twtr_l_ns);
    tccd_l_wr_ = ps(t.tccd_l_wr_ns);
    wtr_s_ = ps(t.twtr_s_ns);
    rtw_ = ps(t.trtw_ns);
    trefi_ = ps(t.trefi_sb_ns);
    trfc_ = ps(t.trfc_sb_ns);
    tdrfm_ = ps(scheme == Scheme::brc ? t.tdrfm_brc_ns : t.tdrfm_brc_vl_ns);
    // Ranks refresh out of phase.
    for (unsigned r = 0; r < cfg.ranks; ++r) {
      const Ps offset = trefi_ * r / cfg.ranks;
      ops_.push({trefi_ + offset, false, r * cfg.banks_per_group});
    }
    next_ref_set_.assign(cfg.ranks, 0);
    hot_row_ = cfg.rows_per_bank / 2;
  }

  BandwidthResult run() {
    const Ps warm = ps(cfg_.warmup_ns);
    const Ps end = warm + ps(cfg_.duration_ns);
    for (unsigned i = 0; i < cfg_.queue_depth; ++i) queue_.push_back(make_request(0));

    BandwidthResult res;
    res.workload = workload_;
    res.scheme = scheme_;
    res.raaimt = raaimt_;
    Ps busy = 0;
    Ps idle = 0;
    for (;;) {
      // Pick the request with the earliest burst start.
      std::size_t best = queue_.size();
      Timeline best_tl;
      bool best_hit = false;
      for (std::size_t i = 0; i < queue_.size(); ++i) {
        const Timeline tl = plan(queue_[i]);
        if (tl.data >= kNever) continue;
        const bool hit = tl.act < 0;
        if (best == queue_.size() || tl.data < best_tl.data ||
            (tl.data == best_tl.data && hit && !best_hit) ||
            (tl.data == best_tl.data && hit == best_hit && queue_[i].seq < queue_[best].seq)) {
          best = i;
          best_tl = tl;
          best_hit = hit;
        }
      }
      // Refresh and RFM operations the data bus has reached go first.
      if (!ops_.empty() && (best == queue_.size() || ops_.top().due <= best_tl.data)) {
        const PendingOp op = ops_.top();
        ops_.pop();
        if (op.due >= end) break;
        execute(op, res);
        continue;
      }
      if (best == queue_.size()) throw ContractViolation("timing model stalled");
      if (best_tl.data >= end) break;

      const Request req = queue_[best];
      queue_.erase(queue_.begin() + static_cast<std::ptrdiff_t>(best));
      const Ps prev_free = bus_free_;
      commit(req, best_tl, res);
      if (best_tl.data >= warm) {
        busy += tburst_;
        idle += best_tl.data - std::max(prev_free, warm);
        ++res.transactions;
      }
      queue_.push_back(make_request(best_tl.act >= 0 ? best_tl.act : best_tl.col));
    }
    res.busy_ns = static_cast<double>(busy) / 1000.0;
    res.idle_ns = static_cast<double>(idle) / 1000.0;
    res.measured_ns = cfg_.duration_ns;
    res.efficiency = res.busy_ns / res.measured_ns;
    for (unsigned v : bac_) res.bac_final_sum += v;
    return res;
  }

 private:
  unsigned set_of(unsigned bank) const {
    return (bank / bpr_) * cfg_.banks_per_group + (bank % bpr_) % cfg_.banks_per_group;
  }

  // Banks of a set: same bank index in every bank group of one rank.
  template <typename Fn>
  void for_set(unsigned set, Fn&& fn) {
    const unsigned rank = set / cfg_.banks_per_group;
    const unsigned idx = set % cfg_.banks_per_group;
    for (unsigned g = 0; g < cfg_.bank_groups; ++g) fn(rank * bpr_ + g * cfg_.banks_per_group + idx);
  }

  Request make_request(Ps arrival) {
    Request r;
    r.arrival = arrival;
    r.seq = seq_++;
    r.write = uniform01(rng_) < cfg_.write_fraction;
    if (workload_ == Workload::hamr && uniform01(rng_) < cfg_.hot_fraction) {
      r.bank = 0;
      r.row = hot_row_;
    } else {
      r.bank = static_cast<unsigned>(uniform_below(rng_, nbanks_));
      r.row = static_cast<std::uint32_t>(uniform_below(rng_, cfg_.rows_per_bank));
    }
    // The column only matters for bus occupancy; every line is one burst.
    return r;
  }

  Ps latency(bool write) const { return write ? cwl_ : cl_; }

  unsigned group_of(unsigned bank) const { return (bank / bpr_) * cfg_.bank_groups + (bank % bpr_) / cfg_.banks_per_group; }

  Ps col_ready(const Request& r) const {
    const Group& g = groups_[group_of(r.bank)];
    return r.write ? std::max(g.next_col, g.next_write) : std::max(g.next_col, g.next_read);
  }

  // Turnaround on the shared data bus.
  Ps bus_ready(bool write) const {
    if (write) return last_read_end_ + rtw_;
    return last_write_end_ + wtr_s_ + cl_;
  }

  Timeline plan(const Request& r) const {
    const Bank& b = banks_[r.bank];
    Timeline tl;
    const Ps lat = latency(r.write);
    if (b.open_row == static_cast<std::int64_t>(r.row)) {
      tl.col = std::max({r.arrival, b.ready_col, col_ready(r)});
      tl.data = std::max({tl.col + lat, bus_free_, bus_ready(r.write)});
      tl.col = tl.data - lat;
      return tl;
    }
    if (scheme_ != Scheme::none && bac_[r.bank] >= 2 * raaimt_) {
      tl.data = kNever;  // suspended until the pending RFM
      return tl;
    }
    Ps act = std::max(r.arrival, b.ready_act);
    if (b.open_row >= 0) act = std::max(act, std::max(r.arrival, b.ready_pre) + trp_);
    tl.data = std::max({act + trcd_ + lat, col_ready(r) + lat, bus_free_, bus_ready(r.write)});
    tl.col = tl.data - lat;
    tl.act = tl.col - trcd_;
    return tl;
  }

  bool queued_hit(unsigned bank, std::uint32_t row) const {
    return std::any_of(queue_.begin(), queue_.end(),
                       [&](const Request& q) { return q.bank == bank && q.row == row; });
  }

  void commit(const Request& r, const Timeline& tl, BandwidthResult& res) {
    Bank& b = banks_[r.bank];
    if (tl.act >= 0) {
      b.open_row = r.row;
      b.last_act = tl.act;
      b.ready_col = tl.act + trcd_;
      b.ready_pre = tl.act + tras_;
      ++res.activates;
      if (scheme_ != Scheme::none) {
        ++bac_[r.bank];
        const unsigned set = set_of(r.bank);
        if (bac_[r.bank] >= raaimt_ && !rfm_pending_[set]) rfm_trigger_ = set;
      }
    } else {
      ++res.row_hits;
    }
    b.ready_col = std::max(b.ready_col, tl.col + tburst_);
    b.ready_pre = std::max(b.ready_pre, r.write ? tl.data + tburst_ + twr_ : tl.col + trtp_);
    bus_free_ = tl.data + tburst_;
    (r.write ? last_write_end_ : last_read_end_) = bus_free_;
    Group& g = groups_[group_of(r.bank)];
    g.next_col = std::max(g.next_col, tl.col + tccd_l_);
    if (r.write) {
      g.next_read = std::max(g.next_read, tl.data + tburst_ + twtr_l_);
      g.next_write = std::max(g.next_write, tl.col + tccd_l_wr_);
    }
    if (!queued_hit(r.bank, r.row)) close(b);
    // The RFM rides on the precharge that closes the RAAIMT-th activate.
    if (rfm_trigger_) {
      rfm_pending_[*rfm_trigger_] = true;
      ops_.push({b.ready_pre, true, *rfm_trigger_});
      rfm_trigger_.reset();
    }
  }

  // Auto-precharge at the earliest legal time.
  void close(Bank& b) {
    if (b.open_row < 0) return;
    b.open_row = -1;
    b.ready_act = std::max({b.ready_act, b.last_act + trc_, b.ready_pre + trp_});
  }

  void execute(const PendingOp& op, BandwidthResult& res) {
    Ps start = op.due;
    for_set(op.set, [&](unsigned i) {
      Bank& b = banks_[i];
      close(b);
      start = std::max(start, b.ready_act);
    });
    const Ps finish = start + (op.rfm ? tdrfm_ : trfc_);
    for_set(op.set, [&](unsigned i) { banks_[i].ready_act = finish; });
    if (op.rfm) {
      ++res.rfm_count;
      rfm_pending_[op.set] = false;
      for_set(op.set, [&](unsigned i) {
        const unsigned take = std::min(bac_[i], raaimt_);
        res.bac_credited += take;
        bac_[i] -= take;
      });
      // Another bank of the set may already sit at RAAIMT.
      bool again = false;
      for_set(op.set, [&](unsigned i) { again = again || bac_[i] >= raaimt_; });
      if (again) {
        rfm_pending_[op.set] = true;
        ops_.push({finish, true, op.set});
      }
    } else {
      ++res.refresh_count;
      const unsigned rank = op.set / cfg_.banks_per_group;
      next_ref_set_[rank] = (next_ref_set_[rank] + 1) % cfg_.banks_per_group;
      ops_.push({op.due + trefi_, false, rank * cfg_.banks_per_group + next_ref_set_[rank]});
    }
  }

  const BandwidthConfig& cfg_;
  Workload workload_;
  Scheme scheme_;
  unsigned raaimt_;
  unsigned bpr_;
  unsigned nbanks_;
  Ps trc_, tras_, trp_, trcd_, cl_, cwl_, tburst_, twr_, trtp_, tccd_l_, twtr_l_, tccd_l_wr_, wtr_s_, rtw_, trefi_, trfc_, tdrfm_;
  std::vector<Bank> banks_;
  std::vector<Group> groups_;
  std::vector<unsigned> bac_;
  std::vector<bool> rfm_pending_;
  std::vector<unsigned> next_ref_set_;
  std::priority_queue<PendingOp, std::vector<PendingOp>, std::greater<>> ops_;
  std::vector<Request> queue_;
  Ps bus_free_ = 0;
  Ps last_write_end_ = -kNever;
  Ps last_read_end_ = -kNever;
  std::optional<unsigned> rfm_trigger_;
  std::uint64_t seq_ = 0;
  std::uint32_t hot_row_ = 0;
  Rng rng_;
};

}  // namespace

BandwidthResult simulate_bandwidth(const BandwidthConfig& cfg, Workload workload, Scheme scheme,
                                   unsigned raaimt) {
  cfg.validate();
  if (scheme != Scheme::none && (raaimt < 1 || raaimt > mitigation::kMaxRaaimt))
    throw ConfigError("RAAIMT must lie in [1, 256]");
  Channel ch(cfg, workload, scheme, raaimt);
  return ch.run();
}

std::vector<BandwidthResult> sweep(const BandwidthConfig& cfg, const std::vector<Workload>& workloads,
                                   const std::vector<Scheme>& schemes,
                                   const std::vector<unsigned>& raaimt_values, unsigned workers) {
  cfg.validate();
  struct Job {
    Workload w;
    Scheme s;
    unsigned n;
  };
  std::vector<Job> jobs;
  for (Workload w : workloads) {
    jobs.push_back({w, Scheme::none, 0});
    for (Scheme s : schemes)
      if (s != Scheme::none)
        for (unsigned n : raaimt_values) jobs.push_back({w, s, n});
  }
  std::vector<BandwidthResult> out(jobs.size());
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(jobs.size())));
  auto work = [&](unsigned id) {
    for (std::size_t j = id; j < jobs.size(); j += workers)
      out[j] = simulate_bandwidth(cfg, jobs[j].w, jobs[j].s, jobs[j].n);
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(work, i);
    for (auto& t : pool) t.join();
  }

  std::vector<BandwidthResult> rows;
  for (Workload w : workloads) {
    const auto base = std::find_if(out.begin(), out.end(), [&](const BandwidthResult& r) {
      return r.workload == w && r.scheme == Scheme::none;
    });
    for (Scheme s : schemes)
      for (unsigned n : raaimt_values) {
        BandwidthResult r;
        if (s == Scheme::none) {
          r = *base;
          r.raaimt = n;
        } else {
          r = *std::find_if(out.begin(), out.end(), [&](const BandwidthResult& x) {
            return x.workload == w && x.scheme == s && x.raaimt == n;
          });
        }
        r.relative = base->efficiency > 0.0 ? r.efficiency / base->efficiency : 0.0;
        rows.push_back(r);
      }
  }
  return rows;
}

std::string to_csv(const std::vector<BandwidthResult>& rows) {
  std::ostringstream os;
  os << "workload,scheme,N,efficiency,relative,rfm_count,refresh_count\n";
  os << std::setprecision(6) << std::fixed;
  for (const auto& r : rows)
    os << to_string(r.workload) << ',' << mitigation::to_string(r.scheme) << ',' << r.raaimt << ','
       << r.efficiency << ',' << r.relative << ',' << r.rfm_count << ',' << r.refresh_count << '\n';
  return os.str();
}

}  // namespace rampart::timing

#include "scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "rampart/error.hpp"

namespace rampart::cli {

using nlohmann::ordered_json;

namespace {

std::string where(const std::string& source, const YAML::Mark& m) {
  if (m.is_null()) return source + ": ";
  return source + ":" + std::to_string(m.line + 1) + ":" + std::to_string(m.column + 1) + ": ";
}

// One mapping node. Reads are recorded so finish() can reject leftovers.
class Section {
 public:
  Section(YAML::Node node, std::string path, const std::string& source, ordered_json& out)
      : node_(std::move(node)), path_(std::move(path)), source_(source), out_(out) {
    if (node_ && !node_.IsNull() && !node_.IsMap()) fail(node_.Mark(), "section '" + path_ + "' must be a mapping");
    if (!out_.is_object()) out_ = ordered_json::object();
  }

  bool has(const std::string& key) const { return node_ && node_.IsMap() && node_[key]; }

  template <typename T>
  T get(const std::string& key, T fallback) {
    seen_.insert(key);
    if (has(key)) fallback = convert<T>(node_[key], key);
    out_[key] = fallback;
    return fallback;
  }

  template <typename T>
  T require(const std::string& key) {
    seen_.insert(key);
    if (!has(key)) fail(node_ ? node_.Mark() : YAML::Mark::null_mark(), "missing key '" + path_ + "." + key + "'");
    T v = convert<T>(node_[key], key);
    out_[key] = v;
    return v;
  }

  template <typename T>
  std::optional<T> optional(const std::string& key, std::optional<T> fallback = std::nullopt) {
    seen_.insert(key);
    if (has(key) && !node_[key].IsNull()) fallback = convert<T>(node_[key], key);
    if (fallback)
      out_[key] = *fallback;
    else
      out_[key] = nullptr;
    return fallback;
  }

  /// Unsigned count that may be written as a float literal such as 1e6.
  std::uint64_t count(const std::string& key, std::uint64_t fallback) {
    seen_.insert(key);
    if (has(key)) {
      const double v = convert<double>(node_[key], key);
      if (!(v >= 0.0) || v != std::floor(v) || v > 1.8e19) fail(node_[key].Mark(), "'" + key + "' must be a non-negative integer");
      fallback = static_cast<std::uint64_t>(v);
    }
    out_[key] = fallback;
    return fallback;
  }

  Section child(const std::string& key) {
    seen_.insert(key);
    return Section(has(key) ? node_[key] : YAML::Node(), path_ + "." + key, source_, out_[key]);
  }

  /// Sequence of mappings under `key`.
  std::vector<Section> list(const std::string& key) {
    seen_.insert(key);
    std::vector<Section> items;
    ordered_json& arr = out_[key];
    arr = ordered_json::array();
    if (!has(key)) return items;
    const YAML::Node seq = node_[key];
    if (!seq.IsSequence()) fail(seq.Mark(), "'" + path_ + "." + key + "' must be a list");
    for (std::size_t i = 0; i < seq.size(); ++i) arr.push_back(ordered_json::object());
    for (std::size_t i = 0; i < seq.size(); ++i)
      items.emplace_back(seq[i], path_ + "." + key + "[" + std::to_string(i) + "]", source_, arr[i]);
    return items;
  }

  /// Ordered key/value pairs of a mapping under `key`.
  template <typename T>
  std::vector<std::pair<std::string, T>> pairs(const std::string& key) {
    seen_.insert(key);
    std::vector<std::pair<std::string, T>> items;
    ordered_json& obj = out_[key];
    obj = ordered_json::object();
    if (!has(key)) return items;
    const YAML::Node map = node_[key];
    if (!map.IsMap()) fail(map.Mark(), "'" + path_ + "." + key + "' must be a mapping");
    for (const auto& kv : map) {
      const auto name = kv.first.as<std::string>();
      const T v = convert<T>(kv.second, key + "." + name);
      obj[name] = v;
      items.emplace_back(name, v);
    }
    return items;
  }

  [[noreturn]] void fail(const YAML::Mark& m, const std::string& msg) const {
    throw ScenarioError(where(source_, m) + msg);
  }

  [[noreturn]] void fail_key(const std::string& key, const std::string& msg) const {
    fail(has(key) ? node_[key].Mark() : (node_ ? node_.Mark() : YAML::Mark::null_mark()), msg);
  }

  void finish() const {
    if (!node_ || !node_.IsMap()) return;
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!seen_.count(key)) fail(kv.first.Mark(), "unknown key '" + key + "' in section '" + path_ + "'");
    }
  }

  const YAML::Node& node() const { return node_; }

  /// Materialize a derived value without reading it from the file.
  void echo(const std::string& key, const ordered_json& value) { out_[key] = value; }

 private:
  template <typename T>
  T convert(const YAML::Node& n, const std::string& key) const {
    try {
      return n.as<T>();
    } catch (const YAML::Exception&) {
      fail(n.Mark(), "bad value for '" + path_ + "." + key + "'");
    }
  }

  YAML::Node node_;
  std::string path_;
  const std::string& source_;
  ordered_json& out_;
  std::set<std::string> seen_;
};

// Library validation errors carry no location; anchor them to the section.
template <typename Fn>
void validated(const Section& s, Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError& e) {
    s.fail(s.node() ? s.node().Mark() : YAML::Mark::null_mark(), e.what());
  }
}

template <typename Parse>
auto parse_enum(Section& s, const std::string& key, const std::string& fallback, Parse&& parse) {
  const auto name = s.get<std::string>(key, fallback);
  try {
    return parse(name);
  } catch (const ConfigError& e) {
    s.fail_key(key, e.what());
  }
}

void parse_timing(Section s, TimingParams& t) {
  t.trc_ns = s.get("trc_ns", t.trc_ns);
  t.tref_s = s.get("tref_s", t.tref_s);
  t.trefi_sb_ns = s.get("trefi_sb_ns", t.trefi_sb_ns);
  t.trfc_sb_ns = s.get("trfc_sb_ns", t.trfc_sb_ns);
  t.tdrfm_brc_ns = s.get("tdrfm_brc_ns", t.tdrfm_brc_ns);
  t.tdrfm_brc_vl_ns = s.get("tdrfm_brc_vl_ns", t.tdrfm_brc_vl_ns);
  t.tras_ns = s.get("tras_ns", t.tras_ns);
  t.trp_ns = s.get("trp_ns", t.trp_ns);
  t.trcd_ns = s.get("trcd_ns", t.trcd_ns);
  t.cl_ns = s.get("cl_ns", t.cl_ns);
  t.cwl_ns = s.get("cwl_ns", t.cwl_ns);
  t.tburst_ns = s.get("tburst_ns", t.tburst_ns);
  t.twr_ns = s.get("twr_ns", t.twr_ns);
  t.trtp_ns = s.get("trtp_ns", t.trtp_ns);
  t.tccd_l_ns = s.get("tccd_l_ns", t.tccd_l_ns);
  t.tccd_l_wr_ns = s.get("tccd_l_wr_ns", t.tccd_l_wr_ns);
  t.twtr_l_ns = s.get("twtr_l_ns", t.twtr_l_ns);
  t.twtr_s_ns = s.get("twtr_s_ns", t.twtr_s_ns);
  t.trtw_ns = s.get("trtw_ns", t.trtw_ns);
  s.finish();
  const double positive[] = {t.trc_ns,  t.tref_s, t.trefi_sb_ns, t.trfc_sb_ns, t.tdrfm_brc_ns,
                             t.tdrfm_brc_vl_ns, t.tras_ns, t.trp_ns, t.trcd_ns, t.cl_ns,
                             t.cwl_ns, t.tburst_ns};
  for (double v : positive)
    if (!(v > 0.0)) s.fail(s.node().Mark(), "timing durations must be positive");
  if (!(t.tdrfm_brc_ns > t.tdrfm_brc_vl_ns)) s.fail(s.node().Mark(), "tdrfm_brc_ns must exceed tdrfm_brc_vl_ns");
}

remap::RankGeometry parse_rank(Section s) {
  const auto data = s.get<unsigned>("data_devices", 8);
  const auto ecc = s.get<unsigned>("ecc_devices", 2);
  const auto width = s.get<unsigned>("row_width", remap::kDefaultRowWidth);
  const auto banks = s.get<unsigned>("banks", 32);
  const auto radius = s.get<unsigned>("blast_radius", 1);
  const auto kind = parse_enum(s, "remap", "rotate", remap::remap_kind_from_string);
  const auto mult = s.get<unsigned>("shift_multiplier", 1);
  const auto spares = s.get<std::uint32_t>("spares", 0);
  std::vector<unsigned> shifts;
  const bool explicit_shifts = s.has("shifts");
  if (explicit_shifts) shifts = s.get<std::vector<unsigned>>("shifts", {});
  remap::RankGeometry g;
  g.data_devices = data;
  g.ecc_devices = ecc;
  g.row_width = width;
  g.banks_per_rank = banks;
  g.blast_radius = radius;
  if (width < remap::kMinRowWidth || width > remap::kMaxRowWidth)
    s.fail_key("row_width", "row_width must lie in [2, 24]");
  const unsigned devices = data + ecc;
  if (!explicit_shifts) {
    for (unsigned i = 0; i < devices; ++i) shifts.push_back((i * mult) % width);
    s.echo("shifts", shifts);
  }
  if (shifts.size() != devices) s.fail_key("shifts", "shifts must list one value per device");
  validated(s, [&] {
    for (unsigned i = 0; i < devices; ++i) g.device_maps.emplace_back(i, width, shifts[i], kind, spares);
  });
  for (auto& r : s.list("repairs")) {
    const auto dev = r.require<unsigned>("device");
    const auto row = r.require<std::uint32_t>("row");
    const auto spare = r.require<std::uint32_t>("spare");
    r.finish();
    if (dev >= devices) r.fail(r.node().Mark(), "repair device out of range");
    validated(r, [&] { g.device_maps[dev].add_repair(row, spare); });
  }
  s.finish();
  validated(s, [&] { g.validate(); });
  return g;
}

ecc::EccConfig parse_ecc(Section s) {
  const auto name = s.get<std::string>("config", "rs40_32");
  ecc::EccConfig c;
  if (name == "custom") {
    Section cs = s.child("custom");
    c.name = cs.get<std::string>("name", "custom");
    c.n = cs.require<unsigned>("n");
    c.k = cs.require<unsigned>("k");
    c.symbol_bits = cs.require<unsigned>("symbol_bits");
    c.symbols_per_device = cs.require<unsigned>("symbols_per_device");
    c.t = cs.get<unsigned>("t", (c.n - c.k) / 2);
    c.codewords_per_access = cs.get<unsigned>("codewords_per_access", 1);
    for (auto& b : cs.list("miscorrection")) {
      ecc::MiscorrectionBand band;
      band.min_errors = b.require<unsigned>("min_errors");
      band.max_errors = b.require<unsigned>("max_errors");
      band.undetected_probability = b.require<double>("undetected");
      b.finish();
      c.miscorrection.push_back(band);
    }
    cs.finish();
    validated(cs, [&] { c.validate(); });
  } else {
    try {
      c = ecc::builtin_config(name);
    } catch (const ConfigError& e) {
      s.fail_key("config", e.what());
    }
  }
  s.finish();
  return c;
}

mitigation::MitigationConfig parse_mitigation(Section s, const TimingParams& timing) {
  mitigation::MitigationConfig m;
  m.scheme = parse_enum(s, "scheme", "brc_vl", mitigation::scheme_from_string);
  m.raaimt = s.get("raaimt", m.raaimt);
  m.victim_levels = s.get("victim_levels", m.victim_levels);
  m.brc_ratio = s.optional<double>("brc_ratio");
  m.tdrfm_brc_ns = timing.tdrfm_brc_ns;
  m.tdrfm_brc_vl_ns = timing.tdrfm_brc_vl_ns;
  m.lfsr_seed = static_cast<std::uint16_t>(s.get<unsigned>("lfsr_seed", m.lfsr_seed));
  m.lfsr_taps = static_cast<std::uint16_t>(s.get<unsigned>("lfsr_taps", m.lfsr_taps));
  m.cycles_per_activate = s.get("cycles_per_activate", m.cycles_per_activate);
  m.lfsr_jitter = s.get("lfsr_jitter", m.lfsr_jitter);
  s.finish();
  validated(s, [&] { m.validate(); });
  return m;
}

attack::AttackSpec parse_attack(Section s) {
  attack::AttackSpec a;
  const auto pattern = s.get<std::string>("pattern", "low_freq");
  if (pattern == "low_freq")
    a.pattern = attack::Pattern::low_freq;
  else if (pattern == "high_freq")
    a.pattern = attack::Pattern::high_freq;
  else
    s.fail_key("pattern", "pattern must be low_freq or high_freq");
  a.aggressors = s.get<std::vector<std::uint32_t>>("aggressors", {});
  a.victim = s.optional<std::uint32_t>("victim");
  a.banks = s.get("banks", a.banks);
  a.channels = s.get("channels", a.channels);
  a.k = s.get("k", a.k);
  a.oracle = s.get("oracle", a.oracle);
  a.decoy_guard = s.get("decoy_guard", a.decoy_guard);
  s.finish();
  validated(s, [&] { a.validate(); });
  return a;
}

sim::ScrubConfig parse_scrub(Section s) {
  sim::ScrubConfig c;
  c.patrol_period_s = s.optional<double>("patrol_period_s");
  c.app_read_rate_per_s = s.get("app_read_rate_per_s", c.app_read_rate_per_s);
  s.finish();
  return c;
}

analysis::AnalysisParams parse_params(Section& s, analysis::AnalysisParams p) {
  p.hc = s.get("hc", p.hc);
  p.raaimt = s.get("raaimt", p.raaimt);
  p.scheme = parse_enum(s, "scheme", mitigation::to_string(p.scheme), mitigation::scheme_from_string);
  p.victim_levels = s.get("victim_levels", p.victim_levels);
  p.attack = parse_enum(s, "attack", analysis::to_string(p.attack), analysis::attack_type_from_string);
  p.scrub_period_s = s.optional<double>("scrub_period_s", p.scrub_period_s);
  p.requires_two_successes = s.get("two_successes", p.requires_two_successes);
  p.k = s.get("k", p.k);
  p.banks_attacked = s.get("banks_attacked", p.banks_attacked);
  p.channels = s.get("channels", p.channels);
  p.brc_ratio = s.optional<double>("brc_ratio", p.brc_ratio);
  return p;
}

AnalysisSection parse_analysis(Section s, const TimingParams& timing) {
  AnalysisSection a;
  analysis::AnalysisParams base;
  base.timing = timing;
  {
    Section d = s.child("defaults");
    base = parse_params(d, base);
    d.finish();
  }
  for (auto& c : s.list("cells")) {
    tables::CellSpec cell;
    cell.table = c.require<std::string>("table");
    cell.row = c.require<std::string>("row");
    cell.method = parse_enum(c, "method", "markov", tables::method_from_string);
    cell.params = parse_params(c, base);
    for (const auto& [label, secs] : c.pairs<double>("horizons")) cell.horizons.push_back({label, secs});
    c.finish();
    if (cell.horizons.empty()) c.fail(c.node().Mark(), "cell '" + cell.table + "." + cell.row + "' has no horizons");
    for (const auto& h : cell.horizons)
      if (!(h.seconds > 0.0)) c.fail_key("horizons", "horizons must be positive");
    validated(c, [&] { cell.params.validate(); });
    a.cells.push_back(std::move(cell));
  }
  for (auto& c : s.list("curves")) {
    tables::CurveSpec curve;
    curve.config_id = c.require<std::string>("id");
    curve.method = parse_enum(c, "method", "markov", tables::method_from_string);
    curve.params = parse_params(c, base);
    if (c.has("times")) {
      curve.times = c.get<std::vector<double>>("times", {});
    } else {
      Section g = c.child("grid");
      const auto t_min = g.get("t_min", 60.0);
      const auto t_max = g.get("t_max", 31'536'000.0);
      const auto points = g.get("points", 41u);
      g.finish();
      validated(g, [&] { curve.times = analysis::log_time_grid(t_min, t_max, points); });
    }
    c.finish();
    if (curve.times.empty()) c.fail(c.node().Mark(), "curve '" + curve.config_id + "' has no times");
    validated(c, [&] { curve.params.validate(); });
    a.curves.push_back(std::move(curve));
  }
  s.finish();
  if (a.cells.empty() && a.curves.empty()) s.fail(s.node().Mark(), "analysis needs at least one cell or curve");
  return a;
}

SimulationSection parse_simulation(Section s, const Scenario& sc) {
  SimulationSection out;
  sim::SimScenario& x = out.scenario;
  if (!sc.rank) s.fail(s.node().Mark(), "simulation needs a rank section");
  x.rank = *sc.rank;
  x.ecc = sc.ecc;
  x.mitigation = sc.mitigation;
  x.attack = sc.attack;
  x.timing = sc.timing;
  x.scrub = sc.scrub;
  x.hc = s.get("hc", x.hc);
  x.hc_multipliers = s.get("hc_multipliers", x.hc_multipliers);
  x.bits_per_flip = s.get("bits_per_flip", x.bits_per_flip);
  x.activates_per_interval = s.count("activates_per_interval", x.activates_per_interval);
  const std::uint64_t per = x.ticks_per_interval();
  const auto intervals = s.optional<double>("horizon_intervals");
  const auto seconds = s.optional<double>("horizon_s");
  x.horizon_ticks = s.count("horizon_ticks", 0);
  if (x.horizon_ticks == 0) {
    if (intervals)
      x.horizon_ticks = static_cast<std::uint64_t>(std::llround(*intervals * static_cast<double>(per)));
    else if (seconds)
      x.horizon_ticks = x.seconds_to_ticks(*seconds);
    else
      x.horizon_ticks = per;
  }
  x.criterion = parse_enum(s, "criterion", "any_flip", sim::success_criterion_from_string);
  x.tracked_level = s.get("tracked_level", x.tracked_level);
  x.stop_on_success = s.get("stop_on_success", x.stop_on_success);
  for (auto& f : s.list("forced")) {
    sim::ForcedSuccess fs;
    fs.tick = f.count("tick", 0);
    fs.bank = f.get("bank", 0u);
    fs.aggressor = f.require<std::uint32_t>("aggressor");
    f.finish();
    x.forced.push_back(fs);
  }
  out.trials = s.count("trials", 1);
  out.workers = s.get("workers", 1u);
  out.run.log_events = s.get("log_events", true);
  out.run.log_activates = s.get("log_activates", false);
  s.finish();
  if (out.trials < 1) s.fail_key("trials", "trials must be >= 1");
  validated(s, [&] { x.validate(); });
  return out;
}

BandwidthSection parse_bandwidth(Section s, const TimingParams& timing) {
  BandwidthSection b;
  timing::BandwidthConfig& c = b.config;
  c.timing = timing;
  for (const auto& w : s.get<std::vector<std::string>>("workloads", {"rand", "hamR"})) try {
      b.workloads.push_back(timing::workload_from_string(w));
    } catch (const ConfigError& e) {
      s.fail_key("workloads", e.what());
    }
  for (const auto& x : s.get<std::vector<std::string>>("schemes", {"none", "brc", "brc_vl"})) try {
      b.schemes.push_back(mitigation::scheme_from_string(x));
    } catch (const ConfigError& e) {
      s.fail_key("schemes", e.what());
    }
  b.raaimt = s.get<std::vector<unsigned>>("raaimt", {16, 24, 32, 48, 64, 80, 100});
  c.ranks = s.get("ranks", c.ranks);
  c.bank_groups = s.get("bank_groups", c.bank_groups);
  c.banks_per_group = s.get("banks_per_group", c.banks_per_group);
  c.queue_depth = s.get("queue_depth", c.queue_depth);
  c.rows_per_bank = s.get("rows_per_bank", c.rows_per_bank);
  c.write_fraction = s.get("write_fraction", c.write_fraction);
  c.hot_fraction = s.get("hot_fraction", c.hot_fraction);
  c.warmup_ns = s.get("warmup_ns", c.warmup_ns);
  c.duration_ns = s.get("duration_ns", c.duration_ns);
  b.workers = s.get("workers", 1u);
  s.finish();
  if (b.workloads.empty() || b.schemes.empty() || b.raaimt.empty())
    s.fail(s.node().Mark(), "bandwidth needs workloads, schemes and raaimt values");
  for (unsigned n : b.raaimt)
    if (n < 1 || n > mitigation::kMaxRaaimt) s.fail_key("raaimt", "raaimt values must lie in [1, 256]");
  validated(s, [&] { c.validate(); });
  return b;
}

}  // namespace

void Scenario::set_seed(std::uint64_t s) {
  seed = s;
  resolved["seeds"]["base"] = s;
  if (bandwidth) bandwidth->config.seed = s;
}

Scenario parse_scenario(const std::string& text, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ScenarioError(where(source, e.mark) + e.msg);
  }
  if (!root || root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  if (!root.IsMap()) throw ScenarioError(where(source, root.Mark()) + "scenario must be a mapping of sections");

  Scenario sc;
  sc.source = source;
  sc.resolved = ordered_json::object();
  Section top(root, "scenario", sc.source, sc.resolved);

  parse_timing(top.child("timing"), sc.timing);
  if (top.has("rank")) sc.rank = parse_rank(top.child("rank"));
  {
    Section v = top.child("verify");
    sc.verify.radius = v.get("radius", sc.rank ? sc.rank->blast_radius : 1u);
    sc.verify.options.exhaustive_width_cap = v.get("exhaustive_width_cap", sc.verify.options.exhaustive_width_cap);
    sc.verify.options.sample_addresses = v.count("sample_addresses", sc.verify.options.sample_addresses);
    sc.verify.options.workers = v.get("workers", sc.verify.options.workers);
    sc.verify.max_listed = v.get<std::size_t>("max_listed", sc.verify.max_listed);
    v.finish();
  }
  sc.ecc = parse_ecc(top.child("ecc"));
  sc.mitigation = parse_mitigation(top.child("mitigation"), sc.timing);
  if (top.has("attack")) sc.attack = parse_attack(top.child("attack"));
  sc.scrub = parse_scrub(top.child("scrub"));
  {
    Section seeds = top.child("seeds");
    sc.seed = seeds.get<std::uint64_t>("base", 1);
    seeds.finish();
  }
  sc.verify.options.sample_seed = sc.seed;
  {
    Section out = top.child("output");
    sc.out_dir = out.get<std::string>("dir", "out");
    sc.format = out.get<std::string>("format", "csv");
    out.finish();
    if (sc.format != "csv" && sc.format != "json") out.fail_key("format", "format must be csv or json");
  }
  if (top.has("analysis")) sc.analysis = parse_analysis(top.child("analysis"), sc.timing);
  if (top.has("simulation")) sc.simulation = parse_simulation(top.child("simulation"), sc);
  if (top.has("bandwidth")) {
    sc.bandwidth = parse_bandwidth(top.child("bandwidth"), sc.timing);
    sc.bandwidth->config.seed = sc.seed;
  }
  top.finish();
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(path + ": cannot open scenario file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path);
}

}  // namespace rampart::cli

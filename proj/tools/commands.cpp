#include "commands.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include "rampart/error.hpp"
#include "rampart/markov_chain.hpp"
#include "rampart/reliability_analysis.hpp"

namespace rampart::cli {

using nlohmann::ordered_json;

namespace {

struct Output {
  std::filesystem::path dir;
  std::string format;
  std::string command;
  std::uint64_t seed = 0;
  const ordered_json* scenario = nullptr;

  void write(const std::string& name, const std::string& body) const {
    std::filesystem::create_directories(dir);
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
    f << body;
  }

  std::string csv_header() const {
    return "# rampart " + command + " seed=" + std::to_string(seed) + "\n# scenario: " + scenario->dump() + "\n";
  }

  ordered_json envelope() const {
    ordered_json j;
    j["command"] = command;
    j["seed"] = seed;
    j["scenario"] = *scenario;
    return j;
  }
};

Output prepare(Scenario& sc, const CommandOptions& opt, const std::string& command) {
  if (opt.seed) sc.set_seed(*opt.seed);
  sc.verify.options.sample_seed = sc.seed;
  Output o;
  o.dir = opt.out_dir.empty() ? sc.out_dir : opt.out_dir;
  o.format = opt.format.empty() ? sc.format : opt.format;
  if (o.format != "csv" && o.format != "json") throw ConfigError("--format must be csv or json");
  sc.resolved["output"]["dir"] = o.dir.string();
  sc.resolved["output"]["format"] = o.format;
  o.command = command;
  o.seed = sc.seed;
  o.scenario = &sc.resolved;
  return o;
}

std::string sci(long double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3Le", v);
  return buf;
}

std::string fmt_logprob(LogProb p) {
  if (p.is_zero()) return "0";
  const long double l = p.log10();
  if (l > -4900.0L) return sci(p.prob());
  return "10^" + std::to_string(static_cast<double>(l));
}

analysis::AttackType attack_type_of(const sim::SimScenario& s) {
  return s.attack && s.attack->pattern == attack::Pattern::high_freq ? analysis::AttackType::victim_focused
                                                                      : analysis::AttackType::traditional;
}

// Absorption of the analytical chain over the simulated horizon, with the
// interval length taken from the simulation's own tick budget.
long double chain_reference(const sim::SimScenario& s) {
  analysis::AnalysisParams p;
  p.hc = s.hc;
  p.raaimt = s.mitigation.raaimt;
  p.scheme = s.mitigation.scheme;
  p.victim_levels = s.mitigation.victim_levels;
  p.attack = attack_type_of(s);
  p.brc_ratio = s.mitigation.brc_ratio;
  const std::uint64_t windows = s.ticks_per_interval() / s.mitigation.raaimt;
  const analysis::IntervalChain chain(s.hc, analysis::make_kernel(p), windows);
  const std::uint64_t total = s.horizon_ticks / s.mitigation.raaimt;
  const std::uint64_t full = windows ? total / windows : 0;
  const LogProb whole = at_least_once(LogProb::from_prob(chain.interval_absorption()), static_cast<long double>(full));
  const LogProb rest = LogProb::from_prob(chain.absorbed_within(windows ? total % windows : 0));
  return union_independent(whole, rest).prob();
}

}  // namespace

int cmd_verify_remap(Scenario sc, const CommandOptions& opt, std::ostream& out) {
  if (!sc.rank) throw ScenarioError(sc.source + ": verify-remap needs a rank section");
  const Output o = prepare(sc, opt, "verify-remap");
  const remap::UniquenessReport report = remap::verify_unique_neighbors(*sc.rank, sc.verify.radius, sc.verify.options);

  ordered_json shielding = ordered_json::array();
  bool shielded = true;
  for (const auto& dev : sc.rank->device_maps) {
    if (dev.repair_table().empty()) continue;
    std::vector<remap::DeviceMap> others;
    for (const auto& d : sc.rank->device_maps)
      if (d.device_id() != dev.device_id()) others.push_back(d);
    const remap::ShieldingReport s = remap::check_repair_shielding(dev, sc.verify.radius, others);
    shielded = shielded && s.passes_binning();
    shielding.push_back({{"device", dev.device_id()},
                         {"shielded", s.shielded},
                         {"crowded_spares", s.crowded_spares.size()},
                         {"duplicated_pairs", s.duplicated_pairs.size()}});
  }

  if (o.format == "json") {
    ordered_json j = o.envelope();
    j["report"] = ordered_json::parse(report.to_json());
    j["shielding"] = shielding;
    o.write("uniqueness.json", j.dump(2) + "\n");
  } else {
    std::string body = o.csv_header() + "a,b,devices\n";
    for (const auto& v : report.violations) {
      std::string devs;
      for (unsigned d : v.devices) devs += (devs.empty() ? "" : ";") + std::to_string(d);
      body += std::to_string(v.a) + "," + std::to_string(v.b) + "," + devs + "\n";
    }
    o.write("uniqueness.csv", body);
    ordered_json j = o.envelope();
    j["report"] = ordered_json::parse(report.to_json(0));
    j["shielding"] = shielding;
    o.write("uniqueness.json", j.dump(2) + "\n");
  }

  out << "status=" << remap::to_string(report.status) << " width=" << report.width << " radius=" << report.radius
      << " checked_pairs=" << report.checked_pairs << " violations=" << report.violations.size()
      << " shielded=" << (shielded ? "yes" : "no") << "\n";
  for (std::size_t i = 0; i < report.violations.size() && i < sc.verify.max_listed; ++i) {
    const auto& v = report.violations[i];
    out << "  pair " << v.a << "," << v.b << " devices";
    for (unsigned d : v.devices) out << ' ' << d;
    out << "\n";
  }
  if (report.violations.size() > sc.verify.max_listed)
    out << "  ... " << report.violations.size() - sc.verify.max_listed << " more\n";
  return report.clean() && shielded ? kExitOk : kExitViolation;
}

int cmd_analyze(Scenario sc, const CommandOptions& opt, std::ostream& out) {
  if (!sc.analysis) throw ScenarioError(sc.source + ": analyze needs an analysis section");
  const Output o = prepare(sc, opt, "analyze");
  tables::Evaluator ev;
  const auto cells = ev.cells(sc.analysis->cells);
  const auto curves = ev.curves(sc.analysis->curves);

  ordered_json j = o.envelope();
  j["tables"] = ordered_json::parse(tables::tables_json(cells));
  o.write("tables.json", j.dump(2) + "\n");
  if (!curves.empty()) {
    if (o.format == "csv") {
      o.write("curves.csv", o.csv_header() + tables::curves_csv(curves));
    } else {
      ordered_json c = o.envelope();
      c["curves"] = ordered_json::array();
      for (const auto& curve : curves) {
        ordered_json pts = ordered_json::array();
        for (std::size_t i = 0; i < curve.size(); ++i)
          pts.push_back({curve.t_seconds[i], curve.values[i].is_zero()
                                                 ? ordered_json(nullptr)
                                                 : ordered_json(static_cast<double>(curve.values[i].log10()))});
        c["curves"].push_back({{"config_id", curve.config_id}, {"t_seconds_log10_p", pts}});
      }
      o.write("curves.json", c.dump(2) + "\n");
    }
  }

  for (const auto& c : cells) {
    out << c.spec.table << "." << c.spec.row << " [" << tables::to_string(c.spec.method) << "]";
    for (std::size_t i = 0; i < c.values.size(); ++i)
      out << " " << c.spec.horizons[i].label << "=" << fmt_logprob(c.values[i]);
    out << "\n";
  }
  if (!curves.empty()) out << curves.size() << " curves written\n";
  return kExitOk;
}

int cmd_simulate(Scenario sc, const CommandOptions& opt, std::ostream& out) {
  if (!sc.simulation) throw ScenarioError(sc.source + ": simulate needs a simulation section");
  if (opt.trials) {
    if (*opt.trials < 1) throw ConfigError("--trials must be >= 1");
    sc.simulation->trials = *opt.trials;
    sc.resolved["simulation"]["trials"] = *opt.trials;
  }
  const Output o = prepare(sc, opt, "simulate");
  const SimulationSection& s = *sc.simulation;
  ordered_json j = o.envelope();

  if (s.trials == 1) {
    sim::RankSimulator simulator(s.scenario);
    const sim::SimOutcome r = simulator.run(sc.seed, s.run);
    j["outcome"] = ordered_json::parse(r.summary_json());
    o.write("summary.json", j.dump(2) + "\n");
    if (s.run.log_events) {
      ordered_json head;
      head["seed"] = sc.seed;
      head["scenario"] = sc.resolved;
      o.write("events.jsonl", head.dump() + "\n" + sim::to_jsonl(r.events));
    }
    out << "success=" << (r.success ? "yes" : "no") << " ticks=" << r.ticks << " activates=" << r.activates
        << " rfms=" << r.rfms << " flips=" << r.flips << " corrected=" << r.corrected
        << " detected_ue=" << r.detected_ue << " sdc=" << r.sdc << "\n";
    return kExitOk;
  }

  const sim::SuccessRate rate = sim::empirical_success_rate(s.scenario, s.trials, sc.seed, s.workers);
  ordered_json r;
  r["trials"] = rate.trials;
  r["successes"] = rate.successes;
  r["rate"] = rate.rate;
  r["sigma"] = rate.sigma;
  r["ci_lo"] = rate.lo;
  r["ci_hi"] = rate.hi;
  const bool comparable = s.scenario.attack && s.scenario.mitigation.raaimt >= 2 &&
                          s.scenario.ticks_per_interval() >= s.scenario.mitigation.raaimt;
  if (comparable) {
    const long double ref = chain_reference(s.scenario);
    r["chain_reference"] = static_cast<double>(ref);
    r["within_3_sigma"] = std::fabs(static_cast<double>(ref) - rate.rate) <= 3.0 * rate.sigma;
  }
  j["rate"] = r;
  o.write("summary.json", j.dump(2) + "\n");
  out << "trials=" << rate.trials << " successes=" << rate.successes << " rate=" << sci(rate.rate)
      << " sigma=" << sci(rate.sigma) << " ci=[" << sci(rate.lo) << ", " << sci(rate.hi) << "]";
  if (comparable) out << " chain=" << sci(r["chain_reference"].get<double>());
  out << "\n";
  return kExitOk;
}

int cmd_bandwidth(Scenario sc, const CommandOptions& opt, std::ostream& out) {
  if (!sc.bandwidth) throw ScenarioError(sc.source + ": bandwidth needs a bandwidth section");
  const Output o = prepare(sc, opt, "bandwidth");
  const BandwidthSection& b = *sc.bandwidth;
  const auto rows = timing::sweep(b.config, b.workloads, b.schemes, b.raaimt, b.workers);

  if (o.format == "csv") {
    o.write("bandwidth.csv", o.csv_header() + timing::to_csv(rows));
  } else {
    ordered_json j = o.envelope();
    j["rows"] = ordered_json::array();
    for (const auto& r : rows)
      j["rows"].push_back({{"workload", timing::to_string(r.workload)},
                           {"scheme", mitigation::to_string(r.scheme)},
                           {"N", r.raaimt},
                           {"efficiency", r.efficiency},
                           {"relative", r.relative},
                           {"rfm_count", r.rfm_count},
                           {"refresh_count", r.refresh_count},
                           {"activates", r.activates},
                           {"transactions", r.transactions}});
    o.write("bandwidth.json", j.dump(2) + "\n");
  }

  std::map<std::tuple<timing::Workload, unsigned>, std::map<mitigation::Scheme, double>> eff;
  for (const auto& r : rows) eff[{r.workload, r.raaimt}][r.scheme] = r.efficiency;
  for (const auto& [key, by] : eff) {
    out << timing::to_string(std::get<0>(key)) << " N=" << std::get<1>(key);
    for (const auto& [scheme, e] : by) out << " " << mitigation::to_string(scheme) << "=" << e;
    if (by.count(mitigation::Scheme::brc) && by.count(mitigation::Scheme::brc_vl))
      out << " gap=" << by.at(mitigation::Scheme::brc_vl) - by.at(mitigation::Scheme::brc);
    out << "\n";
  }
  return kExitOk;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"rampart: row-remapping and refresh-management analysis"};
  app.require_subcommand(1);
  std::string scenario_path;
  CommandOptions opt;
  std::uint64_t seed = 0;
  double trials = 0;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--scenario", scenario_path, "Scenario YAML file")->required();
    sub->add_option("--out", opt.out_dir, "Output directory (default: scenario output.dir)");
    sub->add_option("--seed", seed, "Base seed (default: scenario seeds.base)");
    sub->add_option("--format", opt.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  };
  CLI::App* verify = app.add_subcommand("verify-remap", "Check neighbor uniqueness of the rank remap");
  CLI::App* analyze = app.add_subcommand("analyze", "Evaluate corruption probability tables and curves");
  CLI::App* simulate = app.add_subcommand("simulate", "Run the rank Monte Carlo simulator");
  CLI::App* bandwidth = app.add_subcommand("bandwidth", "Sweep the bank timing model");
  for (CLI::App* sub : {verify, analyze, simulate, bandwidth}) common(sub);
  simulate->add_option("--trials", trials, "Independent trials (overrides simulation.trials)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    if (sub->count("--seed")) opt.seed = seed;
    if (sub == simulate && simulate->count("--trials")) {
      if (!(trials >= 1.0) || trials != std::floor(trials)) throw ConfigError("--trials must be a positive integer");
      opt.trials = static_cast<std::uint64_t>(trials);
    }
    Scenario sc = load_scenario(scenario_path);
    if (sub == verify) return cmd_verify_remap(std::move(sc), opt, out);
    if (sub == analyze) return cmd_analyze(std::move(sc), opt, out);
    if (sub == simulate) return cmd_simulate(std::move(sc), opt, out);
    return cmd_bandwidth(std::move(sc), opt, out);
  } catch (const ScenarioError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const std::invalid_argument& e) {  // ConfigError
    err << "error: " << e.what() << "\n";
  } catch (const std::out_of_range& e) {  // RemapError
    err << "error: " << e.what() << "\n";
  } catch (const InfeasibleError& e) {
    err << "error: " << e.what() << "\n";
  }
  return kExitUsage;
}

}  // namespace rampart::cli

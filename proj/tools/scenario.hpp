#pragma once

// Scenario files: one YAML document of named sections. Every key read is
// echoed into `resolved` with its effective value, defaults included; keys
// nobody reads are rejected with their line and column.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rampart/address_remap.hpp"
#include "rampart/attack_models.hpp"
#include "rampart/ecc_model.hpp"
#include "rampart/mitigation_engine.hpp"
#include "rampart/rank_simulator.hpp"
#include "rampart/tables.hpp"
#include "rampart/timing_model.hpp"
#include "rampart/timing_params.hpp"

namespace rampart::cli {

/// Malformed scenario; the message starts with "<file>:<line>:<column>:" when
/// a location is known.
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct VerifySection {
  remap::VerifyOptions options;
  unsigned radius = 1;
  std::size_t max_listed = 32;
};

struct AnalysisSection {
  std::vector<tables::CellSpec> cells;
  std::vector<tables::CurveSpec> curves;
};

struct SimulationSection {
  sim::SimScenario scenario;
  std::uint64_t trials = 1;
  unsigned workers = 1;
  sim::RunOptions run;
};

struct BandwidthSection {
  timing::BandwidthConfig config;
  std::vector<timing::Workload> workloads;
  std::vector<mitigation::Scheme> schemes;
  std::vector<unsigned> raaimt;
  unsigned workers = 1;
};

struct Scenario {
  std::string source;  // file name used in diagnostics

  std::optional<remap::RankGeometry> rank;
  VerifySection verify;
  ecc::EccConfig ecc;
  mitigation::MitigationConfig mitigation;
  TimingParams timing;
  std::optional<attack::AttackSpec> attack;
  sim::ScrubConfig scrub;
  std::optional<AnalysisSection> analysis;
  std::optional<SimulationSection> simulation;
  std::optional<BandwidthSection> bandwidth;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  std::string format = "csv";

  nlohmann::ordered_json resolved;

  /// Replace the base seed everywhere it was materialized.
  void set_seed(std::uint64_t s);
};

Scenario parse_scenario(const std::string& text, const std::string& source = "<scenario>");
Scenario load_scenario(const std::string& path);

}  // namespace rampart::cli

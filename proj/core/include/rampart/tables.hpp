#pragma once

// Labeled evaluation of analysis cells and curves.
//
// A cell names a table and row, picks an evaluator and lists horizons. Cells
// sharing hc, N, scheme, victim levels, attack, ratio and timing reuse one
// Markov chain.

#include <deque>
#include <string>
#include <vector>

#include "rampart/log_prob.hpp"
#include "rampart/reliability_analysis.hpp"

namespace rampart::tables {

enum class Method {
  closed_form,  ///< para_success_probability (k, scrub and aggregation ignored)
  markov,       ///< MarkovModel::evaluate
  bound,        ///< analytical_bound
};

std::string to_string(Method m);
Method method_from_string(const std::string& name);

struct Horizon {
  std::string label;  // column key, e.g. "1_day"
  double seconds = 0.0;
};

struct CellSpec {
  std::string table;
  std::string row;
  Method method = Method::markov;
  analysis::AnalysisParams params;
  std::vector<Horizon> horizons;
};

struct CellResult {
  CellSpec spec;
  std::vector<LogProb> values;  // parallel to spec.horizons
};

struct CurveSpec {
  std::string config_id;
  Method method = Method::markov;
  analysis::AnalysisParams params;
  std::vector<double> times;
};

class Evaluator {
 public:
  LogProb evaluate(Method method, const analysis::AnalysisParams& p, double t_seconds);

  std::vector<CellResult> cells(const std::vector<CellSpec>& specs);
  std::vector<analysis::ProbabilityCurve> curves(const std::vector<CurveSpec>& specs);

  std::size_t chains_built() const { return models_.size(); }

 private:
  const analysis::MarkovModel& model(const analysis::AnalysisParams& p);

  std::deque<analysis::MarkovModel> models_;
};

/// {table: {row: {horizon: {"p": double, "log10": double}}}} with keys in
/// input order.
std::string tables_json(const std::vector<CellResult>& results);

/// CSV with header config_id,t_seconds,log10_p. Zero probabilities print -inf.
std::string curves_csv(const std::vector<analysis::ProbabilityCurve>& curves);

}  // namespace rampart::tables

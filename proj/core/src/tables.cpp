#include "rampart/tables.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <nlohmann/json.hpp>
#include <sstream>

#include "rampart/error.hpp"

namespace rampart::tables {

std::string to_string(Method m) {
  switch (m) {
    case Method::closed_form: return "closed_form";
    case Method::markov: return "markov";
    case Method::bound: return "bound";
  }
  return "?";
}

Method method_from_string(const std::string& name) {
  if (name == "closed_form") return Method::closed_form;
  if (name == "markov") return Method::markov;
  if (name == "bound") return Method::bound;
  throw ConfigError("unknown method '" + name + "' (expected closed_form, markov or bound)");
}

namespace {

bool same_chain(const analysis::AnalysisParams& a, const analysis::AnalysisParams& b) {
  return a.hc == b.hc && a.raaimt == b.raaimt && a.scheme == b.scheme &&
         a.victim_levels == b.victim_levels && a.attack == b.attack && a.brc_ratio == b.brc_ratio &&
         a.timing.trc_ns == b.timing.trc_ns && a.timing.tref_s == b.timing.tref_s;
}

}  // namespace

const analysis::MarkovModel& Evaluator::model(const analysis::AnalysisParams& p) {
  for (const auto& m : models_)
    if (same_chain(m.params(), p)) return m;
  return models_.emplace_back(p);
}

LogProb Evaluator::evaluate(Method method, const analysis::AnalysisParams& p, double t_seconds) {
  switch (method) {
    case Method::closed_form:
      return analysis::para_success_probability(p.hc, p.raaimt, t_seconds, p.requires_two_successes,
                                                p.timing);
    case Method::bound: return analysis::analytical_bound(p, t_seconds);
    case Method::markov: {
      p.validate();
      return model(p).evaluate(t_seconds, p);
    }
  }
  return LogProb::zero();
}

std::vector<CellResult> Evaluator::cells(const std::vector<CellSpec>& specs) {
  std::vector<CellResult> out;
  for (const auto& s : specs) {
    CellResult r{s, {}};
    for (const auto& h : s.horizons) r.values.push_back(evaluate(s.method, s.params, h.seconds));
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<analysis::ProbabilityCurve> Evaluator::curves(const std::vector<CurveSpec>& specs) {
  std::vector<analysis::ProbabilityCurve> out;
  for (const auto& s : specs)
    out.push_back(analysis::make_curve(s.config_id, s.times,
                                       [&](double t) { return evaluate(s.method, s.params, t); }));
  return out;
}

std::string tables_json(const std::vector<CellResult>& results) {
  nlohmann::ordered_json root = nlohmann::ordered_json::object();
  for (const auto& r : results) {
    auto& row = root[r.spec.table][r.spec.row];
    row["method"] = to_string(r.spec.method);
    for (std::size_t i = 0; i < r.values.size(); ++i) {
      const LogProb v = r.values[i];
      nlohmann::ordered_json cell;
      cell["p"] = static_cast<double>(v.prob());
      if (v.is_zero())
        cell["log10"] = nullptr;
      else
        cell["log10"] = static_cast<double>(v.log10());
      row[r.spec.horizons[i].label] = cell;
    }
  }
  return root.dump(2);
}

std::string curves_csv(const std::vector<analysis::ProbabilityCurve>& curves) {
  std::ostringstream os;
  os << "config_id,t_seconds,log10_p\n";
  for (const auto& c : curves)
    for (std::size_t i = 0; i < c.size(); ++i) {
      os << c.config_id << ',' << std::setprecision(9) << c.t_seconds[i] << ',';
      if (c.values[i].is_zero())
        os << "-inf";
      else
        os << std::setprecision(9) << static_cast<double>(c.values[i].log10());
      os << '\n';
    }
  return os.str();
}

}  // namespace rampart::tables

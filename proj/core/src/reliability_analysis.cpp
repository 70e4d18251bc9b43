#include "rampart/reliability_analysis.hpp"

#include <algorithm>
#include <cmath>

#include "rampart/error.hpp"

namespace rampart::analysis {

std::string to_string(AttackType a) {
  return a == AttackType::traditional ? "traditional" : "victim_focused";
}

AttackType attack_type_from_string(const std::string& name) {
  if (name == "traditional" || name == "traditional_low_freq") return AttackType::traditional;
  if (name == "victim_focused" || name == "victim_focused_high_freq") return AttackType::victim_focused;
  throw ConfigError("unknown attack type '" + name + "' (expected traditional or victim_focused)");
}

long double AnalysisParams::windows_in(double t_seconds) const {
  return static_cast<long double>(t_seconds) / timing.tref_s *
         static_cast<long double>(windows_per_interval());
}

void AnalysisParams::validate() const {
  if (hc < 1) throw ConfigError("HC must be >= 1");
  if (raaimt < 2 || raaimt > mitigation::kMaxRaaimt)
    throw ConfigError("RAAIMT must lie in [2, 256] for analysis");
  if (victim_levels < 1) throw ConfigError("victim_levels must be >= 1");
  if (!(horizon_s > 0.0)) throw ConfigError("horizon must be positive");
  if (scrub_period_s && !(*scrub_period_s > 0.0)) throw ConfigError("scrub period must be positive");
  if (k < 1) throw ConfigError("k must be >= 1");
  if (banks_attacked < 1 || channels < 1) throw ConfigError("banks and channels must be >= 1");
  if (brc_ratio && (*brc_ratio < 0.0 || *brc_ratio > 1.0)) throw ConfigError("brc_ratio outside [0, 1]");
  if (windows_per_interval() == 0) throw ConfigError("RAAIMT exceeds activates per refresh interval");
}

bool ProbabilityCurve::non_decreasing() const {
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i].ln() < values[i - 1].ln()) return false;
  return true;
}

unsigned effective_hc(unsigned hc, unsigned raaimt) {
  if (raaimt < 2) throw ConfigError("effective_hc needs N >= 2");
  const long double n = raaimt;
  return static_cast<unsigned>(std::llround(hc * (1.0L - 1.0L / (n * n))));
}

LogProb para_interval_probability(unsigned hc, unsigned raaimt) {
  const long double n = raaimt;
  const long double hce = effective_hc(hc, raaimt);
  return LogProb::from_ln(hce * std::log1p(-(n - 1.0L) / (n * n)));
}

LogProb para_success_probability(unsigned hc, unsigned raaimt, double horizon_s,
                                 bool two_successes, const TimingParams& timing) {
  if (!(horizon_s > 0.0)) return LogProb::zero();
  const LogProb q = para_interval_probability(hc, raaimt);
  const long double intervals = static_cast<long double>(horizon_s) / timing.tref_s;
  if (!two_successes) return at_least_once(q, intervals);
  const long double pairs = std::floor(intervals / 2.0L);
  return at_least_once(q * q, pairs);
}

ChainKernel make_kernel(const AnalysisParams& p) {
  const long double n = p.raaimt;
  ChainKernel k;
  if (p.scheme == Scheme::none) {
    // Nothing is ever refreshed; the tracked level-1 victim takes every hammer.
    k.outcomes.push_back({1.0L, p.attack == AttackType::traditional ? 1u : p.raaimt, false, 0});
    return k;
  }
  if (p.attack == AttackType::traditional) {
    // Tracked: level-1 victims of the aggressor, hammered once per window.
    if (p.scheme == Scheme::brc) {
      k.outcomes.push_back({1.0L / n, 1, true, 0});
      k.outcomes.push_back({(n - 1.0L) / n, 1, false, 0});
    } else if (p.victim_levels < 2) {
      k.outcomes.push_back({1.0L / n, 1, true, 0});
      k.outcomes.push_back({(n - 1.0L) / n, 1, false, 0});
    } else {
      k.outcomes.push_back({(n - 1.0L) / (n * n), 1, true, 0});
      k.outcomes.push_back({1.0L / (n * n), 1, false, 1});  // level-2 refresh double-hammers
      k.outcomes.push_back({(n - 1.0L) / n, 1, false, 0});
    }
    return k;
  }
  // Victim-focused: tracked level-2 victim, hammered by each level-1 refresh.
  const long double stop = p.scheme == Scheme::brc ? p.effective_brc_ratio()
                           : p.victim_levels < 2   ? 0.0L
                                                   : 1.0L / n;
  if (stop > 0.0L) k.outcomes.push_back({stop, 0, true, 0});
  k.outcomes.push_back({1.0L - stop, 0, false, 1});
  return k;
}

MarkovModel::MarkovModel(const AnalysisParams& p)
    : params_((p.validate(), p)), chain_(p.hc, make_kernel(p), p.windows_per_interval()) {}

LogProb MarkovModel::interval_probability() const {
  return LogProb::from_prob(chain_.interval_absorption());
}

LogProb MarkovModel::single(double t_seconds) const {
  if (!(t_seconds > 0.0)) return LogProb::zero();
  const long double s = params_.windows_in(t_seconds);
  const auto n = static_cast<std::uint64_t>(std::floor(s + 1e-9L));
  const std::uint64_t w = chain_.windows();
  const std::uint64_t m = n / w;
  const std::uint64_t r = n % w;
  const LogProb full = at_least_once(interval_probability(), static_cast<long double>(m));
  return union_independent(full, LogProb::from_prob(chain_.absorbed_within(r)));
}

namespace {
template <typename SingleFn>
LogProb compose(const AnalysisParams& p, double t, SingleFn&& single) {
  if (!(t > 0.0)) return LogProb::zero();
  LogProb unit;
  if (!p.requires_two_successes) {
    unit = simultaneous_attack_probability(single(t), p.k, p.raaimt, false);
  } else {
    auto pair = [&](double tau) {
      return simultaneous_attack_probability(single(tau), p.k, p.raaimt, true);
    };
    unit = p.scrub_period_s ? scrub_composition(pair, *p.scrub_period_s, t) : pair(t);
  }
  return aggregate_system(unit, p.banks_attacked, p.channels);
}
}  // namespace

LogProb MarkovModel::evaluate(double t_seconds) const {
  return compose(params_, t_seconds, [this](double tau) { return single(tau); });
}

LogProb MarkovModel::evaluate(double t_seconds, const AnalysisParams& composition) const {
  return compose(composition, t_seconds, [this](double tau) { return single(tau); });
}

BoundRates bound_rates(const AnalysisParams& p) {
  const long double n = p.raaimt;
  switch (p.scheme) {
    case Scheme::none: return {0.0L, 0.0L};
    case Scheme::brc: {
      const long double stop = p.attack == AttackType::traditional ? 1.0L / n : p.effective_brc_ratio();
      return {stop, stop};
    }
    case Scheme::brc_vl: {
      const long double x = (n - 1.0L) / (n * n + 1.0L);
      if (p.attack == AttackType::traditional) {
        if (p.victim_levels < 2) return {1.0L / n, 1.0L / n};
        return {(n - 1.0L) / (n * n), x};
      }
      if (p.victim_levels < 2) return {0.0L, 0.0L};
      return {1.0L / n, x};
    }
  }
  return {0.0L, 0.0L};
}

LogProb analytical_bound(const AnalysisParams& p, double t_seconds) {
  p.validate();
  const BoundRates r = bound_rates(p);
  auto single = [&](double tau) -> LogProb {
    if (!(tau > 0.0)) return LogProb::zero();
    if (r.p <= 0.0L) return LogProb::one();
    const long double ln_s = std::log(p.windows_in(tau));
    const long double ln_cap = ln_s - r.x * p.hc;  // s * e^(-x HC)
    const long double ln_one = ln_cap + std::log(r.p);
    const long double ln_k = std::min(ln_one + std::log(static_cast<long double>(p.k)), ln_cap);
    return LogProb::from_ln(ln_k);
  };
  if (!(t_seconds > 0.0)) return LogProb::zero();
  LogProb unit;
  if (!p.requires_two_successes) {
    unit = single(t_seconds);
  } else {
    auto pair = [&](double tau) { return single(tau) * single(tau); };
    unit = p.scrub_period_s ? scrub_composition(pair, *p.scrub_period_s, t_seconds) : pair(t_seconds);
  }
  return aggregate_system(unit, p.banks_attacked, p.channels);
}

LogProb aggregate_system(LogProb p_unit, unsigned banks_attacked, unsigned channels) {
  return at_least_once(p_unit, static_cast<long double>(banks_attacked) * channels);
}

LogProb simultaneous_attack_probability(LogProb q, unsigned k, unsigned raaimt, bool two_successes) {
  if (k < 1) throw ConfigError("k must be >= 1");
  if (!two_successes) return q.scaled(std::min(k, raaimt));
  if (k == 1) return q * q;
  return at_least_two_of(q, k);
}

ProbabilityCurve markov_curve(const AnalysisParams& p, const std::vector<double>& times,
                              std::string config_id) {
  const MarkovModel model(p);
  return make_curve(std::move(config_id), times, [&](double t) { return model.evaluate(t); });
}

std::vector<double> log_time_grid(double t_min, double t_max, unsigned points) {
  if (!(t_min > 0.0) || t_max < t_min || points < 1)
    throw ConfigError("log_time_grid needs 0 < t_min <= t_max and points >= 1");
  std::vector<double> out;
  if (points == 1) return {t_max};
  const double a = std::log(t_min), b = std::log(t_max);
  for (unsigned i = 0; i < points; ++i) out.push_back(std::exp(a + (b - a) * i / (points - 1)));
  out.back() = t_max;
  return out;
}

}  // namespace rampart::analysis

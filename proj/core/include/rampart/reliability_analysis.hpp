#pragma once

// Closed-form, Markov-chain and upper-bound corruption probabilities.
//
// Window arithmetic: one refresh interval holds W = floor(APR / N) RAAIMT
// windows with APR = floor(tREF / tRC). A horizon of t seconds holds
// s = (t / tREF) * W windows; refresh command time is not deducted.
//
// Victim levels above 2 are lumped with level 2: a non-level-1 selection is
// treated as a level-2 refresh with probability 1/N.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rampart/log_prob.hpp"
#include "rampart/markov_chain.hpp"
#include "rampart/mitigation_engine.hpp"
#include "rampart/timing_params.hpp"

namespace rampart::analysis {

using mitigation::Scheme;

enum class AttackType { traditional, victim_focused };

std::string to_string(AttackType a);
AttackType attack_type_from_string(const std::string& name);

struct AnalysisParams {
  unsigned hc = 1000;
  unsigned raaimt = 24;
  Scheme scheme = Scheme::brc_vl;
  unsigned victim_levels = 2;
  AttackType attack = AttackType::traditional;
  TimingParams timing;
  double horizon_s = 86400.0;
  std::optional<double> scrub_period_s;
  bool requires_two_successes = false;
  unsigned k = 1;
  unsigned banks_attacked = 1;
  unsigned channels = 1;
  std::optional<double> brc_ratio;

  long double effective_brc_ratio() const { return brc_ratio ? *brc_ratio : 1.0L / raaimt; }
  std::uint64_t windows_per_interval() const { return timing.windows_per_refresh(raaimt); }
  /// s = (t / tREF) * W as a real count.
  long double windows_in(double t_seconds) const;

  /// Throws ConfigError.
  void validate() const;
};

struct ProbabilityCurve {
  std::string config_id;
  std::vector<double> t_seconds;
  std::vector<LogProb> values;

  std::size_t size() const { return t_seconds.size(); }
  bool non_decreasing() const;
};

/// round(HC * (1 - 1/N^2)).
unsigned effective_hc(unsigned hc, unsigned raaimt);

/// Per-interval closed form q = (1 - (N-1)/N^2)^HCe.
LogProb para_interval_probability(unsigned hc, unsigned raaimt);

/// 1 - (1 - q)^T with T = horizon / tREF intervals. With two successes the
/// per-pair value q^2 is combined over floor(T / 2) interval pairs.
LogProb para_success_probability(unsigned hc, unsigned raaimt, double horizon_s,
                                 bool two_successes = false, const TimingParams& timing = {});

/// Window kernel for the configured scheme and attack.
ChainKernel make_kernel(const AnalysisParams& p);

/// Markov model of one bank under one attack, evaluated at arbitrary times in
/// O(1) after one refresh interval has been iterated.
class MarkovModel {
 public:
  explicit MarkovModel(const AnalysisParams& p);

  const AnalysisParams& params() const { return params_; }
  const IntervalChain& chain() const { return chain_; }

  /// Single-success absorption probability within one refresh interval.
  LogProb interval_probability() const;

  /// Single-success probability by time t (one attack, one bank).
  LogProb single(double t_seconds) const;

  /// Full model: k attacks, two-success/scrub composition, system
  /// aggregation, as configured in the params.
  LogProb evaluate(double t_seconds) const;
  /// Same chain, composed with the k, scrub, two-success and aggregation
  /// settings of `composition`.
  LogProb evaluate(double t_seconds, const AnalysisParams& composition) const;

 private:
  AnalysisParams params_;
  IntervalChain chain_;
};

/// Per-window stop probability p and exponent rate x of the bound
/// s * p * exp(-x * HC).
struct BoundRates {
  long double p = 0.0L;
  long double x = 0.0L;
};
BoundRates bound_rates(const AnalysisParams& p);

/// Upper bound on the corresponding MarkovModel::evaluate value.
LogProb analytical_bound(const AnalysisParams& p, double t_seconds);

/// Two-success composition with patrol scrub: damage from one success is
/// repaired at the next scrub, so corruption needs two successes inside one
/// scrub period. `pair_probability(t)` gives the two-success probability for
/// an attack window of length t.
template <typename PairFn>
LogProb scrub_composition(PairFn&& pair_probability, double scrub_period_s, double horizon_s) {
  if (scrub_period_s >= horizon_s) return pair_probability(horizon_s);
  const double periods = std::floor(horizon_s / scrub_period_s);
  const double rest = horizon_s - periods * scrub_period_s;
  const LogProb full = at_least_once(pair_probability(scrub_period_s), periods);
  if (rest <= 0.0) return full;
  return union_independent(full, pair_probability(rest));
}

/// 1 - (1 - p)^(banks * channels).
LogProb aggregate_system(LogProb p_unit, unsigned banks_attacked, unsigned channels);

/// k simultaneous attacks on one bank from per-attack success q. One success
/// needed: min(k, N) * q capped at 1. Two successes: P(X >= 2) for
/// X ~ Bin(k, q); with k = 1 the oracle attacker needs two sequential
/// successes and the value is q^2.
LogProb simultaneous_attack_probability(LogProb q, unsigned k, unsigned raaimt,
                                        bool two_successes);

/// Curve at the given times from any evaluator.
template <typename Fn>
ProbabilityCurve make_curve(std::string config_id, const std::vector<double>& times, Fn&& fn) {
  ProbabilityCurve c;
  c.config_id = std::move(config_id);
  for (double t : times) {
    c.t_seconds.push_back(t);
    c.values.push_back(fn(t));
  }
  return c;
}

ProbabilityCurve markov_curve(const AnalysisParams& p, const std::vector<double>& times,
                              std::string config_id = "markov");

/// `points` times log-spaced from `t_min` to `t_max`, inclusive.
std::vector<double> log_time_grid(double t_min, double t_max, unsigned points);

}  // namespace rampart::analysis

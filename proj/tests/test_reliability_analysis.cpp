#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "rampart/error.hpp"
#include "rampart/markov_chain.hpp"
#include "rampart/reliability_analysis.hpp"
#include "rampart/tables.hpp"

namespace rampart::analysis {
namespace {

constexpr double kDay = 86400.0;
constexpr double kYear = 365.0 * kDay;

TEST(LogProb, SmallAndLargeRegimes) {
  const LogProb q = LogProb::from_prob(1e-30L);
  EXPECT_NEAR(static_cast<double>(at_least_once(q, 1e6L).log10()), -24.0, 1e-12);
  const LogProb h = LogProb::from_prob(0.5L);
  EXPECT_NEAR(static_cast<double>(at_least_once(h, 3).prob()), 0.875, 1e-15);
  EXPECT_TRUE(at_least_once(LogProb::zero(), 10).is_zero());
  EXPECT_NEAR(static_cast<double>(union_independent(h, h).prob()), 0.75, 1e-15);
  const LogProb tiny = LogProb::from_ln(-4000.0L);
  EXPECT_NEAR(static_cast<double>((tiny * tiny).ln()), -8000.0, 1e-9);
}

TEST(LogProb, AtLeastTwoMatchesDirectSum) {
  for (double q : {0.3, 0.01, 1e-5}) {
    for (unsigned k : {1u, 2u, 5u, 10u}) {
      const double direct = 1.0 - std::pow(1.0 - q, k) - k * q * std::pow(1.0 - q, k - 1);
      const double got = static_cast<double>(at_least_two_of(LogProb::from_prob(q), k).prob());
      EXPECT_NEAR(got, direct, 1e-12 + 1e-9 * direct) << q << " " << k;
    }
  }
}

TEST(ClosedForm, EffectiveHammerCounts) {
  EXPECT_EQ(effective_hc(1000, 16), 996u);
  EXPECT_EQ(effective_hc(3000, 16), 2988u);
}

TEST(ClosedForm, MatchesIndependentFormula) {
  for (unsigned hc : {500u, 1000u, 3000u}) {
    for (unsigned n : {8u, 16u, 24u}) {
      const double hce = std::round(hc * (1.0 - 1.0 / (n * n)));
      const double log10_q = hce * std::log10(1.0 - (n - 1.0) / (n * n));
      EXPECT_NEAR(static_cast<double>(para_interval_probability(hc, n).log10()), log10_q, 1e-9);
      EXPECT_NEAR(static_cast<double>(para_success_probability(hc, n, kYear).log10()),
                  oracle::log10_at_least_once(log10_q, kYear / 0.032), 1e-9);
    }
  }
}

TEST(ClosedForm, TwoSuccessIsSquare) {
  for (unsigned hc : {1000u, 3000u}) {
    const LogProb one = para_success_probability(hc, 16, 0.032);
    const LogProb two = para_success_probability(hc, 16, 0.064, true);
    EXPECT_EQ(two.ln(), 2.0L * one.ln());
  }
}

TEST(Chain, MatchesEnumerationOracle) {
  for (unsigned hc : {1u, 3u, 5u, 8u}) {
    for (unsigned n : {2u, 4u, 7u}) {
      ChainKernel k{{{1.0L / n, 1, true, 0}, {(n - 1.0L) / n, 1, false, 0}}};
      const IntervalChain chain(hc, k, 16);
      for (unsigned w = 0; w <= 16; w += 4)
        EXPECT_NEAR(static_cast<double>(chain.absorbed_within(w)),
                    oracle::run_absorption(hc, 1.0 / n, w), 1e-11)
            << hc << " " << n << " " << w;
    }
  }
}

TEST(Chain, NoRefreshAbsorbsExactlyAtHc) {
  const IntervalChain chain(10, ChainKernel{{{1.0L, 1, false, 0}}}, 20);
  for (unsigned w = 0; w <= 20; ++w) EXPECT_EQ(chain.absorbed_within(w), w >= 10 ? 1.0L : 0.0L);
  const IntervalChain batched(10, ChainKernel{{{1.0L, 0, false, 4}}}, 5);
  EXPECT_EQ(batched.absorbed_within(2), 0.0L);
  EXPECT_EQ(batched.absorbed_within(3), 1.0L);
}

TEST(Chain, RejectsBadKernel) {
  EXPECT_THROW(IntervalChain(5, ChainKernel{{{0.5L, 1, false, 0}}}, 3), ConfigError);
  EXPECT_THROW(IntervalChain(0, ChainKernel{{{1.0L, 1, false, 0}}}, 3), ConfigError);
}

TEST(Kernel, StopProbabilities) {
  AnalysisParams p;
  p.raaimt = 24;
  p.scheme = Scheme::brc_vl;
  long double stop = 0.0L;
  for (const auto& o : make_kernel(p).outcomes)
    if (o.reset) stop += o.prob;
  EXPECT_NEAR(static_cast<double>(stop), 23.0 / 576.0, 1e-15);
  p.scheme = Scheme::brc;
  stop = 0.0L;
  for (const auto& o : make_kernel(p).outcomes)
    if (o.reset) stop += o.prob;
  EXPECT_NEAR(static_cast<double>(stop), 1.0 / 24.0, 1e-15);
}

AnalysisParams small(Scheme scheme, AttackType attack, unsigned hc, unsigned n) {
  AnalysisParams p;
  p.hc = hc;
  p.raaimt = n;
  p.scheme = scheme;
  p.attack = attack;
  return p;
}

// Property: curves never decrease and the analytical bound dominates the chain.
TEST(Markov, BoundDominatesAndCurvesRise) {
  for (Scheme s : {Scheme::brc, Scheme::brc_vl}) {
    for (AttackType a : {AttackType::traditional, AttackType::victim_focused}) {
      for (unsigned n : {8u, 16u}) {
        AnalysisParams p = small(s, a, 150, n);
        const MarkovModel m(p);
        const auto curve = markov_curve(p, log_time_grid(1e-3, kYear, 25));
        EXPECT_TRUE(curve.non_decreasing());
        for (double t : {0.032, 60.0, kDay, kYear}) EXPECT_LE(m.evaluate(t), analytical_bound(p, t)) << t;
        p.requires_two_successes = true;
        p.scrub_period_s = kDay;
        const MarkovModel m2(p);
        for (double t : {kDay, kYear}) EXPECT_LE(m2.evaluate(t), analytical_bound(p, t)) << t;
      }
    }
  }
}

TEST(Markov, YearOverDayIsNearDays) {
  const MarkovModel m(small(Scheme::brc, AttackType::traditional, 1000, 24));
  const double ratio = static_cast<double>(m.evaluate(kYear).prob() / m.evaluate(kDay).prob());
  EXPECT_GE(ratio, 357.0);
  EXPECT_LE(ratio, 372.0);
}

TEST(Composition, ScrubLongerThanHorizonIsOnePair) {
  auto pair = [](double t) { return LogProb::from_prob(1e-6L * t); };
  EXPECT_EQ(scrub_composition(pair, 10.0, 5.0).ln(), pair(5.0).ln());
  const LogProb v = scrub_composition(pair, 2.0, 5.0);
  const long double expect = 1.0L - (1.0L - 2e-6L) * (1.0L - 2e-6L) * (1.0L - 1e-6L);
  EXPECT_NEAR(static_cast<double>(v.prob()), static_cast<double>(expect), 1e-18);
}

TEST(Composition, SimultaneousAndSystem) {
  const LogProb q = LogProb::from_prob(1e-9L);
  EXPECT_NEAR(static_cast<double>(simultaneous_attack_probability(q, 10, 24, false).ln() - q.ln()),
              std::log(10.0), 1e-12);
  EXPECT_NEAR(static_cast<double>(simultaneous_attack_probability(q, 1, 24, true).ln()),
              static_cast<double>(2.0L * q.ln()), 1e-12);
  const LogProb sys = aggregate_system(LogProb::from_prob(7.8e-10L), 16, 32);
  EXPECT_NEAR(static_cast<double>(sys.prob()), -std::expm1(512.0 * std::log1p(-7.8e-10)), 1e-20);
}

TEST(TimeGrid, LogSpacedInclusive) {
  const auto g = log_time_grid(1.0, 1000.0, 4);
  ASSERT_EQ(g.size(), 4u);
  EXPECT_DOUBLE_EQ(g.front(), 1.0);
  EXPECT_NEAR(g[1], 10.0, 1e-9);
  EXPECT_DOUBLE_EQ(g.back(), 1000.0);
}

TEST(Params, Validates) {
  AnalysisParams p;
  p.raaimt = 0;
  EXPECT_THROW(p.validate(), ConfigError);
  p = AnalysisParams{};
  p.hc = 0;
  EXPECT_THROW(p.validate(), ConfigError);
}

TEST(Tables, ReusesChainsAndFormats) {
  tables::Evaluator ev;
  AnalysisParams a = small(Scheme::brc, AttackType::traditional, 100, 16);
  AnalysisParams b = a;
  b.k = 10;
  b.banks_attacked = 16;
  std::vector<tables::CellSpec> specs = {
      {"t", "one", tables::Method::markov, a, {{"1_day", kDay}}},
      {"t", "ten", tables::Method::markov, b, {{"1_day", kDay}, {"1_year", kYear}}},
      {"u", "cf", tables::Method::closed_form, a, {{"32ms", 0.032}}},
  };
  const auto res = ev.cells(specs);
  EXPECT_EQ(ev.chains_built(), 1u);
  ASSERT_EQ(res.size(), 3u);
  EXPECT_EQ(res[1].values.size(), 2u);
  const std::string j = tables::tables_json(res);
  EXPECT_LT(j.find("\"one\""), j.find("\"ten\""));
  EXPECT_NE(j.find("\"log10\""), std::string::npos);

  analysis::ProbabilityCurve c;
  c.config_id = "z";
  c.t_seconds = {1.0};
  c.values = {LogProb::zero()};
  EXPECT_EQ(tables::curves_csv({c}), "config_id,t_seconds,log10_p\nz,1,-inf\n");
}

}  // namespace
}  // namespace rampart::analysis

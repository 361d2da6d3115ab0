#include <gtest/gtest.h>

#include "ergolab/errors.hpp"
#include "ergolab/generators.hpp"
#include "ergolab/metrics.hpp"
#include "support.hpp"

using namespace ergolab;

TEST(Iid, ExactLaws) {
  const auto fair = iid_bernoulli(0.5)->dims(1);
  EXPECT_DOUBLE_EQ(fair[0], 0.5);
  EXPECT_DOUBLE_EQ(fair[1], 0.5);
  EXPECT_NEAR(iid_bernoulli(0.3)->dims(2)[3], 0.09, 1e-15);
  EXPECT_EQ(iid_bernoulli(0.3)->tag(), ProcessTag::markov(0));
  const Word zeros = iid_bernoulli(0.0)->sample(500, 3);
  for (std::size_t i = 0; i < zeros.size(); ++i) ASSERT_EQ(zeros[i], 0);
  EXPECT_THROW(iid_bernoulli(1.1), RangeError);
}

TEST(MarkovTable, PeriodTwoSupport) {
  const auto d = markov_from_table(1, {1.0, 0.0})->dims(4);
  EXPECT_NEAR(d[0b0101], 0.5, 1e-15);
  EXPECT_NEAR(d[0b1010], 0.5, 1e-15);
  EXPECT_NEAR(d[0b0101] + d[0b1010], 1.0, 1e-15);
}

TEST(Walk, StationaryMassesArePushForwardInvariant) {
  // One step of the walk applied to P(0)=P(1)=1/4, P(j)=2^-j.
  const int top = 60;
  std::vector<double> pushed(top + 2, 0.0);
  for (int s = 0; s <= top; ++s) {
    const double m = WalkChainProcess::stationary_mass(s);
    if (s <= 1) {
      pushed[s + 1] += m;
    } else {
      pushed[0] += 0.5 * m;
      pushed[s + 1] += 0.5 * m;
    }
  }
  double residual = 0.0;
  for (int s = 0; s <= top; ++s) residual = std::max(residual, std::abs(pushed[s] - WalkChainProcess::stationary_mass(s)));
  // State 0 misses the halves of the states beyond the truncation: 2^-61 in total.
  EXPECT_LT(residual, 1e-10);
  EXPECT_DOUBLE_EQ(WalkChainProcess::stationary_mass(0), 0.25);
  EXPECT_DOUBLE_EQ(WalkChainProcess::stationary_mass(1), 0.25);
  EXPECT_DOUBLE_EQ(WalkChainProcess::stationary_mass(5), 1.0 / 32);
}

TEST(Walk, StationaryDrawFrequencies) {
  Rng rng(2024);
  std::size_t zero = 0, one = 0;
  const std::size_t runs = 1000000;
  for (std::size_t i = 0; i < runs; ++i) {
    const auto s = WalkChainProcess::draw_stationary(rng);
    zero += s == 0;
    one += s == 1;
  }
  EXPECT_NEAR(static_cast<double>(zero) / runs, 0.25, 0.005);
  EXPECT_NEAR(static_cast<double>(one) / runs, 0.25, 0.005);
}

TEST(Walk, OneThirdOnes) {
  const auto h = walk_chain_process({});
  EXPECT_NEAR(h->dims(1)[1], 1.0 / 3.0, 1e-12);
  const Word x = h->sample(1000000, 17);
  EXPECT_NEAR(block_empirics(x, 1).rates[1], 1.0 / 3.0, 0.01);
}

TEST(Walk, PatternZeroZeroOneMarksStateZero) {
  WalkChainLabeling pow2;
  pow2.predicate = "pow2plus1";
  WalkChainLabeling table;
  table.odd_table = {{3, 1}, {5, 0}, {7, 1}};
  table.default_odd = 1;
  for (const auto& labeling : {WalkChainLabeling{}, pow2, table}) {
    const WalkChainProcess h(labeling);
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const TracedPath p = h.sample_traced(100000, seed);
      for (std::size_t n = 0; n + 2 < p.symbols.size(); ++n) {
        const bool pattern = p.symbols[n] == 0 && p.symbols[n + 1] == 0 && p.symbols[n + 2] == 1;
        ASSERT_EQ(pattern, p.states[n] == 0) << "position " << n;
      }
    }
  }
}

TEST(Walk, LabelingRules) {
  WalkChainLabeling l;
  l.predicate = "pow2plus1";
  EXPECT_EQ(l(0), 0);
  EXPECT_EQ(l(1), 0);
  EXPECT_EQ(l(4), 1);
  EXPECT_EQ(l(3), 0);
  EXPECT_EQ(l(5), 0);
  EXPECT_EQ(l(7), 1);
  EXPECT_EQ(l(9), 0);
  WalkChainLabeling bad;
  bad.odd_table = {{4, 0}};
  EXPECT_THROW(bad.validate(), ConfigError);
  const auto back = WalkChainLabeling::from_json(l.to_json());
  EXPECT_EQ(back.predicate, "pow2plus1");
}

TEST(Walk, DimsConsistentAndBounded) {
  WalkChainLabeling l;
  l.predicate = "pow2plus1";
  const auto h = walk_chain_process(l);
  testing_support::expect_consistent(h, 8);
  EXPECT_LE(h->dims(6).error_bound(), 6 * std::ldexp(1.0, -60));
  const Word x = h->sample(1000000, 3);
  for (int k = 1; k <= 4; ++k) {
    EXPECT_LE(testing_support::l1(testing_support::naive_rates(x, k), h->dims(k).probs()),
              5.0 * std::sqrt(std::ldexp(1.0, k) / 1e6));
  }
}

TEST(Indicator, ParityChainLaws) {
  const auto h = parity_indicator();
  EXPECT_NEAR(h->dims(1)[1], 0.2, 1e-12);
  const auto P = parity_chain();
  const auto pi = testing_support::dense_stationary(P);
  for (int n = 1; n <= 6; ++n) {
    const auto oracle = testing_support::brute_force_labels(P, pi, {1, 0, 0}, n);
    EXPECT_LT(testing_support::l1(oracle, h->dims(n).probs()), 1e-12) << n;
  }
  testing_support::expect_consistent(h, 8);
}

TEST(Indicator, NotMarkovUpToOrderSix) {
  const auto h = parity_indicator();
  for (int k = 0; k <= 6; ++k) {
    const MarkovWitness w = markov_violation(h, k, 2);
    EXPECT_GT(w.gap, 0.1) << "order " << k;
  }
  const MarkovWitness w4 = markov_violation(h, 4, 2);
  EXPECT_EQ(w4.long_context.substr(w4.long_context.size() - 4), w4.short_context);
}

TEST(Indicator, DegenerateAndUnreachable) {
  const auto ones = state_indicator_process({{1.0}}, 0);
  const Word x = ones->sample(100, 1);
  for (std::size_t i = 0; i < x.size(); ++i) ASSERT_EQ(x[i], 1);
  EXPECT_THROW(state_indicator_process({{1.0, 0.0}, {1.0, 0.0}}, 1), RangeError);
}

TEST(Renewal, DegenerateInterArrivals) {
  RenewalSpec one;
  one.table = {1.0};
  const Word x = renewal_process(one)->sample(100, 4);
  for (std::size_t i = 0; i < x.size(); ++i) ASSERT_EQ(x[i], 1);
  RenewalSpec two;
  two.table = {0.0, 1.0};
  const auto h = renewal_process(two);
  EXPECT_NEAR(h->dims(1)[1], 0.5, 1e-15);
  EXPECT_NEAR(h->dims(2)[0b01] + h->dims(2)[0b10], 1.0, 1e-15);
}

TEST(Renewal, GeometricInterArrivalsAreIid) {
  RenewalSpec geo;
  geo.tail_mass = 1.0;
  geo.tail_ratio = 0.5;
  const auto h = renewal_process(geo);
  EXPECT_NEAR(h->dims(1)[1], 0.5, 1e-12);
  EXPECT_LT(tv_block_distance(h->dims(3), FiniteDistribution::uniform(3)), 1e-12);
  const Word x = h->sample(1000000, 8);
  EXPECT_LT(testing_support::l1(testing_support::naive_rates(x, 2), FiniteDistribution::uniform(2).probs()), 0.01);
}

TEST(Renewal, OnesFrequencyIsInverseMean) {
  RenewalSpec s;
  s.table = {0.2, 0.3, 0.1};
  s.tail_mass = 0.4;
  s.tail_ratio = 0.6;
  const auto h = renewal_process(s);
  const double p = 1.0 / s.mean();
  EXPECT_NEAR(h->dims(1)[1], p, 1e-12);
  const std::size_t len = 1000000;
  const Word x = h->sample(len, 12);
  // Renewal CLT: the arrival count over L steps has variance ~ L var(T) / mean^3.
  double m2 = 0.0;
  for (std::uint64_t t = 1; t < 2000; ++t) m2 += static_cast<double>(t * t) * s.prob(t);
  const double var_t = m2 - s.mean() * s.mean();
  const double sigma = std::sqrt(var_t / std::pow(s.mean(), 3) / static_cast<double>(len));
  EXPECT_NEAR(block_empirics(x, 1).rates[1], p, 3.0 * sigma);
  testing_support::expect_consistent(h, 8);
  for (int k = 1; k <= 4; ++k) {
    EXPECT_LE(testing_support::l1(testing_support::naive_rates(x, k), h->dims(k).probs()),
              5.0 * std::sqrt(std::ldexp(1.0, k) / 1e6));
  }
}

TEST(Renewal, RejectsBadLaws) {
  RenewalSpec infinite;
  infinite.tail_mass = 1.0;
  infinite.tail_ratio = 1.0;
  EXPECT_THROW(renewal_process(infinite), ConfigError);
  RenewalSpec short_mass;
  short_mass.table = {0.5, 0.3};
  EXPECT_THROW(renewal_process(short_mass), ConfigError);
}

TEST(Tags, Families) {
  EXPECT_EQ(walk_chain_process({})->tag(), ProcessTag::finitarily_markovian());
  EXPECT_EQ(parity_indicator()->tag(), ProcessTag::finitarily_markovian());
  RenewalSpec s;
  s.table = {0.5, 0.5};
  EXPECT_EQ(renewal_process(s)->tag(), ProcessTag::finitarily_markovian());
}

#include <gtest/gtest.h>

#include "ergolab/errors.hpp"
#include "ergolab/generators.hpp"
#include "ergolab/markov.hpp"
#include "ergolab/metrics.hpp"
#include "support.hpp"

using namespace ergolab;
using testing_support::dense_stationary;

TEST(Word, RejectsNonBinarySymbols) {
  EXPECT_THROW(Word::from_string("0120"), RangeError);
  EXPECT_THROW(Word(std::vector<Bit>{0, 2}), RangeError);
  EXPECT_EQ(Word::from_string("0110").to_string(), "0110");
  EXPECT_EQ(Word::from_string("0110").size(), 4u);
}

TEST(Word, BlockIndexIsLexicographic) {
  EXPECT_EQ(block_index(Word::from_string("01").bits()), 1u);
  EXPECT_EQ(block_index(Word::from_string("10").bits()), 2u);
  EXPECT_EQ(block_string(5, 4), "0101");
  EXPECT_EQ(block_word(3, 3), Word::from_string("011"));
}

TEST(Distribution, ValidatesMassAndRange) {
  EXPECT_THROW(FiniteDistribution(1, {0.5, 0.6}), RangeError);
  EXPECT_THROW(FiniteDistribution(1, {1.2, -0.2}), RangeError);
  EXPECT_THROW(FiniteDistribution(2, {0.5, 0.5}), ShapeError);
  EXPECT_NO_THROW(FiniteDistribution(1, {0.5, 0.55}, 0.05));
}

TEST(Distribution, Marginalize) {
  const auto u = marginalize(FiniteDistribution::uniform(2), 1);
  EXPECT_DOUBLE_EQ(u[0], 0.5);
  EXPECT_DOUBLE_EQ(u[1], 0.5);
  const auto pm = marginalize(FiniteDistribution::point_mass(Word::from_string("01")), 1, Side::Prefix);
  EXPECT_DOUBLE_EQ(pm[0], 1.0);
  const auto sm = marginalize(FiniteDistribution::point_mass(Word::from_string("01")), 1, Side::Suffix);
  EXPECT_DOUBLE_EQ(sm[1], 1.0);
  EXPECT_THROW(marginalize(FiniteDistribution::uniform(2), 3), RangeError);
  EXPECT_THROW(marginalize(FiniteDistribution::uniform(2), 0), RangeError);
  const FiniteDistribution approx(2, {0.25, 0.25, 0.25, 0.25}, 0.01);
  EXPECT_DOUBLE_EQ(marginalize(approx, 1).error_bound(), 0.01);
}

TEST(Distribution, BlockDistance) {
  const auto u = FiniteDistribution::uniform(2);
  EXPECT_DOUBLE_EQ(tv_block_distance(u, u), 0.0);
  EXPECT_DOUBLE_EQ(tv_block_distance(FiniteDistribution::point_mass(Word::from_string("00")),
                                     FiniteDistribution::point_mass(Word::from_string("11"))),
                   2.0);
  EXPECT_DOUBLE_EQ(tv_block_distance(FiniteDistribution::uniform(1), FiniteDistribution(1, {0.25, 0.75})), 0.5);
  EXPECT_THROW(tv_block_distance(FiniteDistribution::uniform(1), u), ShapeError);
}

TEST(Distribution, JsonRoundTrip) {
  const FiniteDistribution d(2, {0.1, 0.2, 0.3, 0.4}, 1e-6);
  const auto back = distribution_from_json(to_json(d));
  EXPECT_EQ(back.block_length(), 2);
  EXPECT_DOUBLE_EQ(back[3], 0.4);
  EXPECT_DOUBLE_EQ(back.error_bound(), 1e-6);
}

TEST(Rng, DeterministicAndSplittable) {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next(), b.next());
  EXPECT_NE(derive_seed(42, 0), derive_seed(42, 1));
  EXPECT_NE(derive_seed(42, 0), derive_seed(43, 0));
  Rng c(7);
  for (int i = 0; i < 1000; ++i) {
    const double u = c.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    EXPECT_LT(c.below(3), 3u);
  }
}

TEST(Stationary, FairCoinAsOrderOne) {
  const auto st = markov_stationary(1, std::vector<double>{0.5, 0.5});
  EXPECT_NEAR(st[0], 0.5, 1e-12);
  EXPECT_NEAR(st[1], 0.5, 1e-12);
}

TEST(Stationary, ParityChainMatchesLinearSolve) {
  const auto P = parity_chain();
  const auto oracle = dense_stationary(P);
  const auto pi = solve_stationary(dense_chain(P));
  ASSERT_EQ(pi.size(), 3u);
  for (int s = 0; s < 3; ++s) EXPECT_NEAR(pi[s], oracle[s], 1e-12);
  EXPECT_NEAR(pi[0], 0.2, 1e-12);
  EXPECT_NEAR(pi[1], 0.4, 1e-12);
  EXPECT_NEAR(pi[2], 0.4, 1e-12);
}

TEST(Stationary, ReducibleChainListsClasses) {
  const std::vector<std::vector<double>> P{{1, 0, 0}, {0, 0.5, 0.5}, {0, 0.5, 0.5}};
  try {
    solve_stationary(dense_chain(P));
    FAIL() << "expected IrreducibilityError";
  } catch (const IrreducibilityError& e) {
    EXPECT_EQ(e.classes.size(), 2u);
  }
}

TEST(Stationary, TransientStatesGetNoMass) {
  const std::vector<std::vector<double>> P{{0, 1, 0}, {0, 0.5, 0.5}, {0, 0.5, 0.5}};
  const auto pi = solve_stationary(dense_chain(P));
  EXPECT_EQ(pi[0], 0.0);
  EXPECT_NEAR(pi[1], 0.5, 1e-12);
}

TEST(MarkovDims, ProductAndAlternation) {
  const auto iid = make_markov_chain(0, {0.5});
  const auto d = markov_exact_dims(iid, 3);
  for (std::size_t i = 0; i < 8; ++i) EXPECT_NEAR(d[i], 0.125, 1e-15);
  const auto alt = markov_exact_dims(make_markov_chain(1, {1.0, 0.0}), 2);
  EXPECT_NEAR(alt[1], 0.5, 1e-15);
  EXPECT_NEAR(alt[2], 0.5, 1e-15);
  EXPECT_EQ(alt[0], 0.0);
  EXPECT_EQ(alt[3], 0.0);
  EXPECT_THROW(markov_exact_dims(iid, 25), RangeError);
}

// Word probabilities recomputed one word at a time from the product formula.
TEST(MarkovDims, AgreesWithPerWordProduct) {
  for (int k = 0; k <= 2; ++k) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto chain = make_markov_chain(k, testing_support::random_table(k, seed * 10 + k));
      for (int n = std::max(1, k); n <= 6; ++n) {
        const auto d = markov_exact_dims(chain, n);
        for (std::uint64_t w = 0; w < (std::uint64_t{1} << n); ++w) {
          const Word x = block_word(w, n);
          const std::uint64_t head = k == 0 ? 0 : block_index(x.bits().subspan(0, k));
          double p = k == 0 ? 1.0 : chain.stationary[head];
          for (int t = k; t < n; ++t) {
            const std::uint64_t ctx = k == 0 ? 0 : block_index(x.bits().subspan(t - k, k));
            p *= x[t] ? chain.p_one[ctx] : 1.0 - chain.p_one[ctx];
          }
          EXPECT_NEAR(d[w], p, 1e-12);
        }
      }
    }
  }
}

TEST(MarkovProcess, SamplerIsDeterministic) {
  const auto h = markov_from_table(2, testing_support::random_table(2, 3));
  EXPECT_EQ(h->sample(1000, 11), h->sample(1000, 11));
  EXPECT_NE(h->sample(1000, 11), h->sample(1000, 12));
  EXPECT_THROW(sample_path(h, 0, 1), RangeError);
}

TEST(MarkovProcess, FairCoinFrequency) {
  const Word x = sample_path(iid_bernoulli(0.5), 100000, 5);
  EXPECT_NEAR(block_empirics(x, 1).rates[1], 0.5, 0.01);
}

TEST(MarkovProcess, PeriodTwoNeverRepeats) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto r = block_empirics(sample_path(period_two(), 1000, seed), 2).rates;
    EXPECT_EQ(r[0], 0.0);
    EXPECT_EQ(r[3], 0.0);
  }
}

TEST(MarkovProcess, SamplerMatchesDims) {
  for (int k = 0; k <= 3; ++k) {
    const auto h = markov_from_table(k, testing_support::random_table(k, 100 + k));
    const Word x = h->sample(1000000, 9 + k);
    for (int b = 1; b <= 4; ++b) {
      const auto emp = testing_support::naive_rates(x, b);
      EXPECT_LE(testing_support::l1(emp, h->dims(b).probs()), 5.0 * std::sqrt(std::ldexp(1.0, b) / 1e6)) << k << " " << b;
    }
  }
}

TEST(MarkovProcess, TagMatchesContextDependence) {
  for (int k = 0; k <= 3; ++k) {
    const auto h = markov_from_table(k, testing_support::random_table(k, 200 + k));
    EXPECT_EQ(h->tag(), ProcessTag::markov(k));
    EXPECT_LT(markov_violation(h, k, 3).gap, 1e-9);
    testing_support::expect_consistent(h, 8);
  }
}

TEST(MarkovChain, JsonRoundTrip) {
  const auto chain = make_markov_chain(2, testing_support::random_table(2, 1));
  const auto back = markov_chain_from_json(to_json(chain));
  EXPECT_EQ(back.order, 2);
  for (std::uint64_t c = 0; c < 4; ++c) EXPECT_DOUBLE_EQ(back.p_one[c], chain.p_one[c]);
}

TEST(MarkovChain, ValidationCatchesBadRows) {
  EXPECT_THROW(make_markov_chain(1, {1.5, 0.5}), RangeError);
  EXPECT_THROW(make_markov_chain(1, {0.5}), ShapeError);
  // 0 -> 0 forever and 1 -> 1 forever: two closed classes.
  EXPECT_THROW(make_markov_chain(1, {0.0, 1.0}), IrreducibilityError);
}

TEST(Mixture, AveragesComponents) {
  const auto m = std::make_shared<MixtureProcess>(std::vector<ProcessHandle>{iid_bernoulli(0.0), iid_bernoulli(1.0)},
                                                  std::vector<double>{0.5, 0.5});
  const auto d = m->dims(2);
  EXPECT_DOUBLE_EQ(d[0], 0.5);
  EXPECT_DOUBLE_EQ(d[3], 0.5);
  testing_support::expect_consistent(m, 4);
}

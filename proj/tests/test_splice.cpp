#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "ergolab/errors.hpp"
#include "ergolab/generators.hpp"
#include "ergolab/rng.hpp"
#include "ergolab/rotation.hpp"
#include "ergolab/splice.hpp"
#include "support.hpp"

using namespace ergolab;
using testing_support::naive_border;
using testing_support::naive_find_all;
using testing_support::naive_overlap;

namespace {

Word random_word(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Word w;
  for (std::size_t i = 0; i < n; ++i) w.push_back(static_cast<Bit>(rng.next() & 1));
  return w;
}

void expect_sync_invariants(const Word& w, const SyncWord& s) {
  const std::string u = s.u.to_string(), ws = w.to_string();
  const double lim = 0.4 * s.m();
  EXPECT_LE(naive_border(u), lim);
  EXPECT_LE(naive_overlap(u, ws), lim);
  EXPECT_LE(naive_overlap(ws, u), lim);
  EXPECT_TRUE(naive_find_all(u, ws).empty());
  for (const char z : {'0', '1'}) {
    const auto at = naive_find_all(u, u + ws + z + u + ws);
    ASSERT_EQ(at.size(), 2u);
    EXPECT_EQ(at[1], u.size() + ws.size() + 1);
  }
}

}  // namespace

TEST(SyncWord, LengthFormulaAndCountingBound) {
  EXPECT_EQ(sync_length(100), 67);
  EXPECT_EQ(sync_length(1024), 100);
  EXPECT_TRUE(sync_counting_bound(100, 67));
  EXPECT_FALSE(sync_counting_bound(100, 10));
}

TEST(SyncWord, OverlapPrimitivesMatchNaiveScan) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const Word a = random_word(1 + seed % 13, seed), b = random_word(1 + seed % 7, seed + 1000);
    ASSERT_EQ(longest_border(a), naive_border(a.to_string()));
    ASSERT_EQ(longest_overlap(a, b), naive_overlap(a.to_string(), b.to_string()));
    ASSERT_EQ(occurs_in(b, a), !naive_find_all(b.to_string(), a.to_string()).empty());
  }
}

TEST(SyncWord, InvariantsHoldOnRandomAndStructuredWords) {
  std::vector<Word> ws{random_word(100, 1), random_word(257, 2), random_word(1000, 3)};
  Word alt, zeros;
  for (int i = 0; i < 200; ++i) alt.push_back(static_cast<Bit>(i & 1));
  for (int i = 0; i < 200; ++i) zeros.push_back(0);
  ws.push_back(alt);
  ws.push_back(zeros);
  for (const Word& w : ws) {
    const SyncWord s = find_sync_word(w);
    EXPECT_GE(s.m(), s.m_formula);
    EXPECT_EQ(s.m_formula, sync_length(w.size()));
    expect_sync_invariants(w, s);
  }
}

TEST(TypicalWord, OverheadCondition) {
  for (double delta : {0.5, 0.3, 0.1}) {
    for (int N = 1; N <= 3; ++N) {
      const std::size_t r = minimal_word_length(N, delta);
      auto overhead = [&](std::size_t rr) {
        const double m = sync_length(rr);
        return (m + N) / (m + rr + 1);
      };
      EXPECT_LT(overhead(r), delta / 4);
      EXPECT_GE(overhead(r / 2), delta / 4);
    }
  }
}

TEST(TypicalWord, IidAcceptancePredicate) {
  const auto t = find_typical_word(iid_bernoulli(0.5), 1, 0.5);
  const auto rates = testing_support::naive_rates(t.w, 1);
  EXPECT_GT(rates[1], 0.375);
  EXPECT_LT(rates[1], 0.625);
  EXPECT_LT(t.achieved_discrepancy, 0.5 / 4);
  EXPECT_DOUBLE_EQ(t.tolerance, 0.125);
}

TEST(TypicalWord, PeriodTwoAcceptancePredicate) {
  const auto t = find_typical_word(period_two(), 2, 0.2);
  const auto rates = testing_support::naive_rates(t.w, 2);
  EXPECT_NEAR(rates[0b01], 0.5, 0.025);
  EXPECT_NEAR(rates[0b10], 0.5, 0.025);
  EXPECT_EQ(rates[0b00] + rates[0b11], 0.0);
}

TEST(TypicalWord, IndicatorAgainstExactDims) {
  const auto h = parity_indicator();
  const auto t = find_typical_word(h, 3, 0.1);
  EXPECT_LT(t.achieved_discrepancy, 0.1 / 16);
  const auto rates = testing_support::naive_rates(t.w, 3);
  const auto exact = h->dims(3);
  for (std::uint64_t x = 0; x < 8; ++x) EXPECT_LT(std::abs(rates[x] - exact[x]), 0.1 / 16);
}

TEST(TypicalWord, BudgetErrorReportsBest) {
  TypicalSearch s;
  s.r_max = 64;
  try {
    find_typical_word(parity_indicator(), 3, 0.1, s);
    FAIL();
  } catch (const BudgetError& e) {
    EXPECT_NE(std::string(e.what()).find("discrepancy"), std::string::npos);
  }
}

TEST(Decode, HandBuiltPath) {
  const Word u = Word::from_string("0001"), w = Word::from_string("1101");
  Word y;
  for (Bit z : {0, 1, 0}) {
    y.push_back(z);
    y.append(u);
    y.append(w);
  }
  EXPECT_EQ(decode_z(y, u, w).to_string(), "010");
  EXPECT_THROW(decode_z(y.slice(0, 12), u, w), DecodeError);
  Word bad = y.slice(0, 3);
  bad.push_back(1);
  bad.append(y.slice(4, y.size() - 4));
  EXPECT_THROW(decode_z(bad, u, w), DecodeError);
}

class SplicedIid : public ::testing::Test {
 protected:
  static void SetUpTestSuite() { result_ = splice_source(rotation_process(), iid_bernoulli(0.5), 2, 0.3); }
  static inline SpliceResult result_;
};

TEST_F(SplicedIid, BlockLawWithinDelta) {
  EXPECT_LT(result_.tv, 0.3);
  const auto d = result_.handle->dims(2);
  double tv = 0.0;
  for (double p : d.probs()) tv += std::abs(p - 0.25);
  EXPECT_NEAR(tv, result_.tv, 1e-12);
  EXPECT_LT(result_.handle->overhead_fraction(2), 0.3 / 4);
}

TEST_F(SplicedIid, DimsAreConsistentAndShiftInvariant) {
  testing_support::expect_consistent(result_.handle, 6);
}

TEST_F(SplicedIid, ZSlotFractionIsOneOverPeriod) {
  const auto& h = *result_.handle;
  EXPECT_EQ(h.period(), h.u().size() + h.w().size() + 1);
  const std::size_t L = 3 * h.period();
  std::size_t slots = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) slots += h.sample_with_truth(L, seed).z.size();
  EXPECT_EQ(slots, 20u * 3u);
}

TEST_F(SplicedIid, DecodeRecoversZ) {
  const auto& h = *result_.handle;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto t = h.sample_with_truth(100000, seed);
    ASSERT_EQ(decode_z(t.y, h.u(), h.w()), t.z) << seed;
    const auto at = naive_find_all(h.u().to_string(), t.y.to_string());
    for (std::size_t i = 1; i < at.size(); ++i) ASSERT_EQ(at[i] - at[i - 1], h.period());
  }
}

TEST_F(SplicedIid, JsonRecordsTheConstruction) {
  const auto j = result_.to_json();
  EXPECT_EQ(j.at("schema"), "ergolab.spliced/1");
  EXPECT_EQ(j.at("period"), result_.handle->period());
}

TEST(Splice, RejectsTooLargeDelta) {
  const auto src = iid_bernoulli(0.5);
  const Word w = Word::from_string("0000000000");
  TypicalWord t;
  t.w = w;
  const SyncWord s = find_sync_word(w);
  EXPECT_THROW(splice(rotation_process(), src, t, s, 1, 0.1), ConstructionError);
}

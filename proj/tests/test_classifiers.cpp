#include <gtest/gtest.h>

#include <chrono>
#include <thread>

#include "ergolab/classifiers.hpp"
#include "ergolab/errors.hpp"
#include "ergolab/generators.hpp"
#include "ergolab/rng.hpp"
#include "support.hpp"

using namespace ergolab;
using namespace std::chrono_literals;

namespace {

std::vector<std::string> shell(const std::string& script) { return {"/bin/sh", "-c", script}; }

const char* kEchoYes = "read h; echo OK echo-yes; while read l; do echo YES; done";
const char* kEchoNo = "read h; echo OK echo-no; while read l; do echo NO; done";

}  // namespace

TEST(FreqTester, ReferenceVerdicts) {
  FreqMarkovTester t(4);
  EXPECT_EQ(t.classify(iid_bernoulli(0.5)->sample(100000, 1)), Verdict::Yes);
  EXPECT_EQ(t.classify(parity_indicator()->sample(100000, 1)), Verdict::No);
  EXPECT_EQ(t.classify(Word(std::vector<Bit>(1000, 0))), Verdict::Yes);
  EXPECT_EQ(t.classify(Word::from_string("01")), Verdict::Yes);
  EXPECT_EQ(t.decide(Word(std::vector<Bit>(1000, 0))).order, 0);
  EXPECT_EQ(t.decide(parity_indicator()->sample(100000, 1)).order, -1);
  EXPECT_EQ(t.name(), "freq:4:3");
}

TEST(FreqTester, StatisticMatchesDirectFormula) {
  const Word x = parity_indicator()->sample(5000, 3);
  for (int k = 0; k <= 3; ++k) {
    const auto q = testing_support::naive_rates(x, k + 2);
    std::vector<double> left(std::size_t{1} << (k + 1), 0.0), right(left.size(), 0.0), mid(std::size_t{1} << k, 0.0);
    for (std::uint64_t b = 0; b < q.size(); ++b) {
      left[b >> 1] += q[b];
      right[b & ((std::uint64_t{1} << (k + 1)) - 1)] += q[b];
      mid[(b >> 1) & ((std::uint64_t{1} << k) - 1)] += q[b];
    }
    double d = 0.0;
    for (std::uint64_t b = 0; b < q.size(); ++b) {
      const std::uint64_t ctx = (b >> 1) & ((std::uint64_t{1} << k) - 1);
      const double expect = mid[ctx] > 0 ? left[b >> 1] * right[b & ((std::uint64_t{1} << (k + 1)) - 1)] / mid[ctx] : 0.0;
      d += std::abs(q[b] - expect);
    }
    EXPECT_NEAR(FreqMarkovTester::statistic(x, k), d, 1e-12) << k;
  }
}

TEST(FreqTester, CalibratedOnLowOrderChains) {
  FreqMarkovTester t(4);
  int yes = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const int order = static_cast<int>(seed % 3);
    const auto h = markov_from_table(order, testing_support::random_table(order, 500 + seed));
    if (t.classify(h->sample(100000, seed)) == Verdict::Yes) ++yes;
  }
  RecordProperty("yes_rate", std::to_string(yes / 200.0));
  EXPECT_GT(yes / 200.0, 0.95);
}

TEST(FreqTester, Deterministic) {
  FreqMarkovTester t(3);
  const Word x = walk_chain_process({})->sample(20000, 8);
  EXPECT_EQ(t.decide(x).statistics, t.decide(x).statistics);
}

TEST(MakeClassifier, Specs) {
  EXPECT_EQ(make_classifier("yes")->classify(Word::from_string("0")), Verdict::Yes);
  EXPECT_EQ(make_classifier("no")->classify(Word::from_string("0")), Verdict::No);
  EXPECT_EQ(make_classifier("freq:2")->name(), "freq:2:3");
  EXPECT_EQ(make_classifier("freq:2:1.5")->name(), "freq:2:1.5");
  EXPECT_THROW(make_classifier("freq:0"), RangeError);
  EXPECT_THROW(make_classifier("maybe"), ConfigError);
}

TEST(External, EchoPrograms) {
  ExternalClassifier yes(shell(kEchoYes)), no(shell(kEchoNo));
  EXPECT_EQ(yes.name(), "echo-yes");
  for (int i = 0; i < 5; ++i) {
    EXPECT_EQ(yes.classify(Word::from_string("0101")), Verdict::Yes);
    EXPECT_EQ(no.classify(Word::from_string("0101")), Verdict::No);
  }
}

TEST(External, AgreesWithInProcessTester) {
  auto ext = make_classifier(std::string("ext:") + ERGOLAB_CLASSIFIER_BIN + " --classifier freq:3", 10s, 4);
  FreqMarkovTester local(3);
  Rng rng(12);
  std::vector<Word> words;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 50 + rng.next() % 2000;
    const int kind = i % 3;
    words.push_back(kind == 0 ? iid_bernoulli(0.4)->sample(n, i)
                              : kind == 1 ? parity_indicator()->sample(n, i) : period_two()->sample(n, i));
  }
  std::vector<Verdict> remote(words.size());
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] {
      for (std::size_t i = t; i < words.size(); i += 4) remote[i] = ext->classify(words[i]);
    });
  }
  for (auto& th : threads) th.join();
  for (std::size_t i = 0; i < words.size(); ++i) ASSERT_EQ(remote[i], local.classify(words[i])) << i;
}

TEST(External, ProtocolErrors) {
  EXPECT_THROW(ExternalClassifier(shell("read h; echo HI")), ClassifierError);
  EXPECT_THROW(ExternalClassifier(shell("exit 3")), ClassifierError);
  EXPECT_THROW(ExternalClassifier({"/nonexistent/classifier"}), ClassifierError);
  ExternalClassifier bad(shell("read h; echo OK bad; while read l; do echo MAYBE; done"));
  EXPECT_THROW(bad.classify(Word::from_string("01")), ClassifierError);
  ExternalClassifier dies(shell("read h; echo OK dies; read l; exit 4"));
  EXPECT_THROW(dies.classify(Word::from_string("01")), ClassifierError);
}

TEST(External, Timeout) {
  ExternalClassifier slow(shell("read h; echo OK slow; while read l; do sleep 5; echo YES; done"), 200ms);
  const auto t0 = std::chrono::steady_clock::now();
  EXPECT_THROW(slow.classify(Word::from_string("01")), ClassifierError);
  EXPECT_LT(std::chrono::steady_clock::now() - t0, 3s);
}

#pragma once

#include <chrono>
#include <condition_variable>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "ergolab/word.hpp"

namespace ergolab {

enum class Verdict { Yes, No };

std::string to_string(Verdict v);

/// g_n: {0,1}^n -> {YES, NO}. classify() may be called from several threads.
class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual Verdict classify(const Word& x) = 0;
  virtual std::string name() const = 0;
  virtual bool deterministic() const { return true; }
  virtual nlohmann::json describe() const { return {{"name", name()}}; }
};

using ClassifierHandle = std::shared_ptr<Classifier>;

class ConstantClassifier final : public Classifier {
 public:
  explicit ConstantClassifier(Verdict v) : verdict_(v) {}
  Verdict classify(const Word&) override { return verdict_; }
  std::string name() const override { return verdict_ == Verdict::Yes ? "yes" : "no"; }

 private:
  Verdict verdict_;
};

/// Block-frequency order test. For k = 0..max_order it measures
///   D_k = sum_{a,x,b} |p(a x b) - p(a x) p(b | x)|
/// over (k+2)-block sliding rates (x a k-context) and answers YES at the
/// first k with D_k <= c sqrt(ln n / n).
class FreqMarkovTester final : public Classifier {
 public:
  explicit FreqMarkovTester(int max_order, double c = 3.0);

  struct Decision {
    Verdict verdict = Verdict::Yes;
    int order = 0;  // accepted order, or -1 on NO
    std::vector<double> statistics;
    double threshold = 0.0;
  };

  Decision decide(const Word& x) const;
  Verdict classify(const Word& x) override { return decide(x).verdict; }
  std::string name() const override;
  nlohmann::json describe() const override;

  int max_order() const { return max_order_; }
  double c() const { return c_; }
  double threshold(std::size_t n) const;
  static double statistic(const Word& x, int k);

 private:
  int max_order_;
  double c_;
};

/// Speaks the line protocol to a pool of subprocesses:
///   -> HELLO ergolab-classifier-1     <- OK <name>
///   -> CLASSIFY <01 word>             <- YES | NO
class ExternalClassifier final : public Classifier {
 public:
  ExternalClassifier(std::vector<std::string> argv, std::chrono::milliseconds timeout = std::chrono::seconds(10),
                     std::size_t pool_size = 1);
  ~ExternalClassifier() override;
  ExternalClassifier(const ExternalClassifier&) = delete;
  ExternalClassifier& operator=(const ExternalClassifier&) = delete;

  Verdict classify(const Word& x) override;
  std::string name() const override { return remote_name_; }
  nlohmann::json describe() const override;

 private:
  struct Worker;
  std::unique_ptr<Worker> spawn();
  std::unique_ptr<Worker> acquire();
  void release(std::unique_ptr<Worker> w);

  std::vector<std::string> argv_;
  std::chrono::milliseconds timeout_;
  std::size_t pool_size_;
  std::string remote_name_;
  std::mutex mutex_;
  std::condition_variable available_;
  std::vector<std::unique_ptr<Worker>> idle_;
  std::size_t live_ = 0;
};

/// "yes", "no", "freq:K[:C]", or "ext:PROGRAM ARGS..." / "exec:..." (whitespace-split).
ClassifierHandle make_classifier(const std::string& spec, std::chrono::milliseconds timeout = std::chrono::seconds(10),
                                 std::size_t pool_size = 1);

}  // namespace ergolab

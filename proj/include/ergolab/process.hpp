#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "ergolab/distribution.hpp"
#include "ergolab/markov.hpp"
#include "ergolab/word.hpp"

namespace ergolab {

enum class ProcessKind { Markov, FinitarilyMarkovian, NonFinitarilyMarkovian, Unknown };

struct ProcessTag {
  ProcessKind kind = ProcessKind::Unknown;
  int markov_order = -1;  // meaningful for kind == Markov

  static ProcessTag markov(int k) { return {ProcessKind::Markov, k}; }
  static ProcessTag finitarily_markovian() { return {ProcessKind::FinitarilyMarkovian, -1}; }
  static ProcessTag non_finitarily_markovian() { return {ProcessKind::NonFinitarilyMarkovian, -1}; }
  static ProcessTag unknown() { return {}; }

  std::string to_string() const;
  bool operator==(const ProcessTag&) const = default;
};

/// A stationary binary process: finite-dimensional laws plus a seeded sampler.
/// Implementations are immutable; sample() is a pure function of its inputs.
class Process {
 public:
  virtual ~Process() = default;

  /// n-block law, with error_bound = 0 for exact handles.
  virtual FiniteDistribution dims(int n) const = 0;
  virtual Word sample(std::size_t length, std::uint64_t seed) const = 0;
  virtual ProcessTag tag() const = 0;
  virtual std::string name() const = 0;
  /// Serializable description from which the handle can be rebuilt.
  virtual nlohmann::json describe() const { return {{"name", name()}}; }
};

using ProcessHandle = std::shared_ptr<const Process>;

Word sample_path(const ProcessHandle& handle, std::size_t length, std::uint64_t seed);

/// Exact handle over a MarkovChainSpec; tagged markov(order).
class MarkovProcess final : public Process {
 public:
  explicit MarkovProcess(MarkovChainSpec chain, std::string label = "markov");

  FiniteDistribution dims(int n) const override;
  Word sample(std::size_t length, std::uint64_t seed) const override;
  ProcessTag tag() const override { return ProcessTag::markov(chain_.order); }
  std::string name() const override { return label_; }
  nlohmann::json describe() const override;

  const MarkovChainSpec& chain() const { return chain_; }

 private:
  MarkovChainSpec chain_;
  std::string label_;
  std::vector<double> stationary_cdf_;
};

/// Mixture of processes with fixed weights: stationary, and not ergodic
/// unless the components coincide.
class MixtureProcess final : public Process {
 public:
  MixtureProcess(std::vector<ProcessHandle> components, std::vector<double> weights);

  FiniteDistribution dims(int n) const override;
  Word sample(std::size_t length, std::uint64_t seed) const override;
  ProcessTag tag() const override { return ProcessTag::unknown(); }
  std::string name() const override { return "mixture"; }

 private:
  std::vector<ProcessHandle> components_;
  std::vector<double> weights_;
};

/// Hidden chain with deterministic labels; rows may be substochastic when
/// the state space is a truncation (lost mass counts against error_bound).
struct LabeledChain {
  std::vector<double> initial;
  std::vector<std::vector<std::pair<std::uint32_t, double>>> rows;
  std::vector<Bit> label;
};

/// n-block law of the labels by forward recursion over the prefix tree.
FiniteDistribution labeled_chain_dims(const LabeledChain& chain, int n, double error_bound,
                                      int cap = kDefaultBlockCap);

/// Index of the first CDF entry exceeding u (u in [0,1)).
std::size_t sample_cdf(const std::vector<double>& cdf, double u);

}  // namespace ergolab

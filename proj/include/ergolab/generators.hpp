#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "ergolab/process.hpp"
#include "ergolab/rng.hpp"

namespace ergolab {

// ---------------------------------------------------------------------------
// Finite-order Markov and iid handles.

ProcessHandle iid_bernoulli(double p);

/// p_one[c] = P(next = 1 | context c), contexts indexed MSB-first.
ProcessHandle markov_from_table(int order, std::vector<double> p_one);

/// Order-1 chain alternating 0 and 1.
ProcessHandle period_two();

// ---------------------------------------------------------------------------
// Labeled walk on the non-negative integers: 0 -> 1 -> 2, and from s >= 2 a
// fair coin moves to 0 or s+1. Stationary law P(0) = P(1) = 1/4,
// P(j) = 2^-j for j >= 2.

/// Labels f(0) = f(1) = 0 and f(even s >= 2) = 1 are fixed; odd states s >= 3
/// take a table entry, then the predicate, then the default.
struct WalkChainLabeling {
  std::map<std::uint64_t, Bit> odd_table;
  Bit default_odd = 0;
  /// "" or "pow2plus1" (f(2^i + 1) = 0 for i >= 1, other odd states 1).
  std::string predicate;

  Bit operator()(std::uint64_t state) const;
  void validate() const;

  nlohmann::json to_json() const;
  static WalkChainLabeling from_json(const nlohmann::json& j);
};

struct TracedPath {
  Word symbols;
  std::vector<std::uint64_t> states;
};

class WalkChainProcess final : public Process {
 public:
  explicit WalkChainProcess(WalkChainLabeling labeling, int truncation = 60);

  /// Hidden-path enumeration over states <= truncation; error_bound = n * 2^-truncation.
  FiniteDistribution dims(int n) const override;
  Word sample(std::size_t length, std::uint64_t seed) const override;
  ProcessTag tag() const override { return ProcessTag::finitarily_markovian(); }
  std::string name() const override { return "walk"; }
  nlohmann::json describe() const override;

  TracedPath sample_traced(std::size_t length, std::uint64_t seed) const;

  /// Exact draw from the stationary law of the hidden walk.
  static std::uint64_t draw_stationary(Rng& rng);
  static double stationary_mass(std::uint64_t state);

  const WalkChainLabeling& labeling() const { return labeling_; }

 private:
  WalkChainLabeling labeling_;
  int truncation_;
  LabeledChain truncated_;
};

ProcessHandle walk_chain_process(WalkChainLabeling labeling);

// ---------------------------------------------------------------------------
// Indicator of one state of a finite stationary ergodic chain.

class StateIndicatorProcess final : public Process {
 public:
  StateIndicatorProcess(std::vector<std::vector<double>> transitions, std::size_t state);

  FiniteDistribution dims(int n) const override;
  Word sample(std::size_t length, std::uint64_t seed) const override;
  ProcessTag tag() const override { return ProcessTag::finitarily_markovian(); }
  std::string name() const override { return "indicator"; }
  nlohmann::json describe() const override;

  const std::vector<double>& hidden_stationary() const { return stationary_; }

 private:
  std::vector<std::vector<double>> transitions_;
  std::size_t state_;
  std::vector<double> stationary_;
  std::vector<std::vector<double>> row_cdf_;
  std::vector<double> stationary_cdf_;
  LabeledChain chain_;
};

ProcessHandle state_indicator_process(std::vector<std::vector<double>> transitions, std::size_t state);

/// Three-state chain 0 -> 1 -> 2, 2 -> {0, 1} with probability 1/2 each.
std::vector<std::vector<double>> parity_chain();

/// Indicator of state 0 of parity_chain(): finitarily Markovian, not Markov.
ProcessHandle parity_indicator();

// ---------------------------------------------------------------------------
// Stationary binary renewal process.

/// Inter-arrival law on {1, 2, ...}: P(T = t) = table[t-1] for t <= L, and a
/// geometric tail P(T = L + j) = tail_mass (1 - tail_ratio) tail_ratio^(j-1).
struct RenewalSpec {
  std::vector<double> table;
  double tail_mass = 0.0;
  double tail_ratio = 0.0;

  double prob(std::uint64_t t) const;
  /// P(T > d).
  double survival(std::uint64_t d) const;
  double mean() const;
  void validate() const;

  nlohmann::json to_json() const;
  static RenewalSpec from_json(const nlohmann::json& j);
};

class RenewalProcess final : public Process {
 public:
  explicit RenewalProcess(RenewalSpec spec);

  FiniteDistribution dims(int n) const override;
  Word sample(std::size_t length, std::uint64_t seed) const override;
  ProcessTag tag() const override { return ProcessTag::finitarily_markovian(); }
  std::string name() const override { return "renewal"; }
  nlohmann::json describe() const override { return {{"name", "renewal"}, {"spec", spec_.to_json()}}; }

  const RenewalSpec& spec() const { return spec_; }

 private:
  std::uint64_t draw_inter_arrival(Rng& rng) const;
  std::uint64_t draw_initial_distance(Rng& rng) const;

  RenewalSpec spec_;
  double mean_;
  std::uint64_t max_distance_;  // hidden states 0..max_distance_ enumerated
  double tail_stationary_;      // stationary mass beyond max_distance_
  std::vector<double> distance_cdf_;
  std::vector<double> inter_arrival_cdf_;
  LabeledChain chain_;
};

ProcessHandle renewal_process(RenewalSpec spec);

// ---------------------------------------------------------------------------
// Markov-property probes.

/// Largest |P(1 | a c) - P(1 | c)| over contexts c of length `order` and
/// extensions a of length <= `depth`, computed from exact dims.
struct MarkovWitness {
  std::string long_context;
  std::string short_context;
  double gap = 0.0;
};

MarkovWitness markov_violation(const ProcessHandle& handle, int order, int depth);

}  // namespace ergolab

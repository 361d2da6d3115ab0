#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "ergolab/markov.hpp"
#include "ergolab/process.hpp"

namespace ergolab {

struct BlockEmpirics {
  std::size_t source_length = 0;
  int k = 0;
  FiniteDistribution rates;  // sliding counts / (source_length - k + 1)
};

/// Sliding k-block counts over the first `windows` windows (all by default).
std::vector<std::uint64_t> block_counts(const Word& x, int k, std::size_t windows = SIZE_MAX);

BlockEmpirics block_empirics(const Word& x, int k);

/// L1 distance between the sliding k-block rates of u and v.
double pair_block_distance(const Word& u, const Word& v, int k);

/// L1 distance between j-block rates counted over the first `windows`
/// windows only and normalized by `windows`. With windows = N - k + 1 these
/// are the marginals of the k-block counts, so the value never exceeds
/// pair_block_distance(u, v, k).
double truncated_pair_distance(const Word& u, const Word& v, int j, std::size_t windows);

struct MarginalizationCheck {
  double lhs = 0.0;  // distance at block length M
  double rhs = 0.0;  // D_k (N-k+1)/(N-M+1) + (k-M) 2^M / (N-M+1)
  bool holds() const { return lhs <= rhs + 1e-12; }
};

MarginalizationCheck marginalization_bound(const Word& u, const Word& v, int k, int M);

struct CertificateStage {
  int k = 1;
  std::size_t N = 0;
  double epsilon = 0.0;
};

struct StageOutcome {
  CertificateStage stage;
  std::size_t pairs = 0;
  std::size_t failing = 0;
  double failing_fraction = 0.0;
  double radius = 0.0;  // one-sided Hoeffding radius
  bool pass = false;
};

struct ErgodicityCertificate {
  std::vector<StageOutcome> stages;
  bool pass = false;
  bool partial = false;  // symbol budget ran out before all stages ran
  double confidence = 0.99;

  nlohmann::json to_json() const;
};

struct CertificateOptions {
  std::size_t pairs = 200;
  double confidence = 0.99;
  std::uint64_t seed = 0;
  std::size_t symbol_budget = 0;  // 0: unlimited
  int jobs = 0;                   // 0: default_jobs()
};

/// Hoeffding radius sqrt(ln(1/(1-confidence)) / (2n)).
double one_sided_radius(std::size_t n, double confidence);

/// Samples independent path pairs of length N_k and tests
/// pair_block_distance < eps_k; a stage passes when the failing fraction is
/// at most eps_k plus the Hoeffding radius.
ErgodicityCertificate ergodicity_certificate(const ProcessHandle& handle, const std::vector<CertificateStage>& stages,
                                             const CertificateOptions& options = {});

double binary_entropy(double p);
double block_entropy(const FiniteDistribution& d);

/// Sum over contexts of pi(c) H(next | c), in bits.
double entropy_rate_markov(const MarkovChainSpec& chain);

inline constexpr int kPluginMaxOrder = 12;

/// H(X_0 | X_{-k}^{-1}) under the empirical (k+1)-block law of x, in bits.
double entropy_rate_plugin(const Word& x, int k);

/// True when |x| is below 16 * 2^(k+1), the rough size where the plug-in
/// estimate stops being dominated by unseen blocks.
bool plugin_undersampled(std::size_t length, int k);

/// H(X_0 | X_{-k}^{-1}) of an exact block law family, from dims(k+1).
double conditional_entropy(const ProcessHandle& handle, int k);

}  // namespace ergolab

#include "ergolab/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "ergolab/errors.hpp"
#include "ergolab/parallel.hpp"
#include "ergolab/rng.hpp"

namespace ergolab {

std::vector<std::uint64_t> block_counts(const Word& x, int k, std::size_t windows) {
  if (k < 1 || k > kDefaultBlockCap) throw RangeError("block length outside [1, " + std::to_string(kDefaultBlockCap) + "]");
  if (static_cast<std::size_t>(k) > x.size()) {
    throw RangeError("block length " + std::to_string(k) + " exceeds word length " + std::to_string(x.size()));
  }
  windows = std::min(windows, x.size() - k + 1);
  std::vector<std::uint64_t> counts(std::size_t{1} << k, 0);
  const std::uint64_t mask = (std::uint64_t{1} << k) - 1;
  std::uint64_t idx = 0;
  for (std::size_t i = 0; i < windows + k - 1; ++i) {
    idx = ((idx << 1) | x[i]) & mask;
    if (i + 1 >= static_cast<std::size_t>(k)) ++counts[idx];
  }
  return counts;
}

BlockEmpirics block_empirics(const Word& x, int k) {
  const auto counts = block_counts(x, k);
  const double windows = static_cast<double>(x.size() - k + 1);
  std::vector<double> rates(counts.size());
  for (std::size_t b = 0; b < counts.size(); ++b) rates[b] = static_cast<double>(counts[b]) / windows;
  return {x.size(), k, FiniteDistribution(k, std::move(rates))};
}

double truncated_pair_distance(const Word& u, const Word& v, int j, std::size_t windows) {
  if (u.size() != v.size()) throw ShapeError("pair distance needs equal lengths");
  const auto cu = block_counts(u, j, windows);
  const auto cv = block_counts(v, j, windows);
  const double norm = static_cast<double>(std::min(windows, u.size() - j + 1));
  double s = 0.0;
  for (std::size_t b = 0; b < cu.size(); ++b) {
    s += std::abs(static_cast<double>(cu[b]) - static_cast<double>(cv[b]));
  }
  return s / norm;
}

double pair_block_distance(const Word& u, const Word& v, int k) { return truncated_pair_distance(u, v, k, SIZE_MAX); }

MarginalizationCheck marginalization_bound(const Word& u, const Word& v, int k, int M) {
  if (M < 1 || M > k) throw RangeError("marginal length must lie in [1, k]");
  const double N = static_cast<double>(u.size());
  MarginalizationCheck c;
  c.lhs = pair_block_distance(u, v, M);
  c.rhs = pair_block_distance(u, v, k) * (N - k + 1) / (N - M + 1) + (k - M) * std::ldexp(1.0, M) / (N - M + 1);
  return c;
}

// ---------------------------------------------------------------------------

double one_sided_radius(std::size_t n, double confidence) {
  if (n == 0) return INFINITY;
  return std::sqrt(std::log(1.0 / (1.0 - confidence)) / (2.0 * static_cast<double>(n)));
}

nlohmann::json ErgodicityCertificate::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& s : stages) {
    rows.push_back({{"k", s.stage.k},
                    {"N", s.stage.N},
                    {"epsilon", s.stage.epsilon},
                    {"pairs", s.pairs},
                    {"failing", s.failing},
                    {"failing_fraction", s.failing_fraction},
                    {"radius", s.radius},
                    {"pass", s.pass}});
  }
  return {{"schema", "ergolab.certificate/1"}, {"pass", pass}, {"partial", partial}, {"confidence", confidence},
          {"stages", rows}};
}

ErgodicityCertificate ergodicity_certificate(const ProcessHandle& handle, const std::vector<CertificateStage>& stages,
                                             const CertificateOptions& options) {
  ErgodicityCertificate cert;
  cert.confidence = options.confidence;
  double last_eps = INFINITY;
  for (const auto& st : stages) {
    if (st.N <= static_cast<std::size_t>(st.k) * st.k) throw RangeError("certificate stages need N_k > k^2");
    if (!(st.epsilon > 0.0 && st.epsilon <= last_eps)) throw RangeError("certificate epsilons must be positive and non-increasing");
    last_eps = st.epsilon;
  }
  const std::size_t jobs = options.jobs > 0 ? static_cast<std::size_t>(options.jobs) : default_jobs();
  std::size_t used = 0;
  cert.pass = true;
  for (std::size_t s = 0; s < stages.size(); ++s) {
    const CertificateStage& st = stages[s];
    const std::size_t cost = 2 * options.pairs * st.N;
    if (options.symbol_budget && used + cost > options.symbol_budget) {
      cert.partial = true;
      cert.pass = false;
      break;
    }
    used += cost;
    const std::uint64_t stage_seed = derive_seed(options.seed, s);
    std::vector<char> fails(options.pairs, 0);
    parallel_for(options.pairs, jobs, [&](std::size_t i) {
      const Word a = handle->sample(st.N, derive_seed(stage_seed, 2 * i));
      const Word b = handle->sample(st.N, derive_seed(stage_seed, 2 * i + 1));
      fails[i] = pair_block_distance(a, b, st.k) < st.epsilon ? 0 : 1;
    });
    StageOutcome out;
    out.stage = st;
    out.pairs = options.pairs;
    out.failing = static_cast<std::size_t>(std::count(fails.begin(), fails.end(), 1));
    out.failing_fraction = options.pairs ? static_cast<double>(out.failing) / options.pairs : 1.0;
    out.radius = one_sided_radius(options.pairs, options.confidence);
    out.pass = out.failing_fraction <= st.epsilon + out.radius;
    cert.pass = cert.pass && out.pass;
    cert.stages.push_back(out);
  }
  return cert;
}

// ---------------------------------------------------------------------------

double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double block_entropy(const FiniteDistribution& d) {
  double h = 0.0;
  for (double p : d.probs()) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

double entropy_rate_markov(const MarkovChainSpec& chain) {
  double h = 0.0;
  for (std::uint64_t c = 0; c < chain.contexts(); ++c) {
    if (!chain.has_row(c)) continue;
    h += chain.stationary[c] * binary_entropy(chain.p_one[c]);
  }
  return h;
}

double entropy_rate_plugin(const Word& x, int k) {
  if (k < 0 || k > kPluginMaxOrder) throw RangeError("plug-in order must lie in [0, " + std::to_string(kPluginMaxOrder) + "]");
  const BlockEmpirics e = block_empirics(x, k + 1);
  if (k == 0) return block_entropy(e.rates);
  return std::max(0.0, block_entropy(e.rates) - block_entropy(marginalize(e.rates, k, Side::Prefix)));
}

bool plugin_undersampled(std::size_t length, int k) {
  return static_cast<double>(length) < 16.0 * std::ldexp(1.0, k + 1);
}

double conditional_entropy(const ProcessHandle& handle, int k) {
  const FiniteDistribution d = handle->dims(k + 1);
  if (k == 0) return block_entropy(d);
  return block_entropy(d) - block_entropy(marginalize(d, k, Side::Prefix));
}

}  // namespace ergolab

#include "ergolab/closure.hpp"

#include <cmath>

#include "ergolab/errors.hpp"

namespace ergolab {

nlohmann::json ClosureResult::to_json() const {
  nlohmann::json j = ergolab::to_json(chain);
  j["source_error"] = source_error;
  j["classes"] = classes;
  j["stationarity_residual"] = stationarity_residual;
  return j;
}

ClosureResult close_to_markov(const ProcessHandle& handle, int N) {
  if (N < 1 || N + 1 > kDefaultBlockCap) {
    throw RangeError("closure order must lie in [1, " + std::to_string(kDefaultBlockCap - 1) + "]");
  }
  const FiniteDistribution ext = handle->dims(N + 1);
  const FiniteDistribution law = handle->dims(N);
  const std::uint64_t contexts = std::uint64_t{1} << N;
  const std::uint64_t mask = contexts - 1;

  ClosureResult out;
  out.source_error = std::max(ext.error_bound(), law.error_bound());

  std::vector<double> pi(law.probs().begin(), law.probs().end());
  std::vector<double> p_one(contexts, kUndefinedRow);
  for (std::uint64_t c = 0; c < contexts; ++c) {
    if (pi[c] <= 0.0) continue;
    const double m0 = ext[c << 1];
    const double m1 = ext[(c << 1) | 1U];
    if (m0 + m1 <= 0.0) {
      throw InconsistentMarginalsError("context " + block_string(c, N) + " has mass " + std::to_string(pi[c]) +
                                       " but no extension mass");
    }
    p_one[c] = std::clamp(m1 / (m0 + m1), 0.0, 1.0);
  }
  // An approximate source may send a positive context into a zero-mass one;
  // such transitions are dropped and the row renormalized.
  for (std::uint64_t c = 0; c < contexts; ++c) {
    if (p_one[c] != p_one[c]) continue;
    const bool live0 = pi[(c << 1) & mask] > 0.0;
    const bool live1 = pi[((c << 1) | 1U) & mask] > 0.0;
    if (!live0 && !live1) {
      throw InconsistentMarginalsError("context " + block_string(c, N) + " leads only to zero-mass contexts");
    }
    if (!live1 && p_one[c] > 0.0) {
      out.source_error += pi[c] * p_one[c];
      p_one[c] = 0.0;
    } else if (!live0 && p_one[c] < 1.0) {
      out.source_error += pi[c] * (1.0 - p_one[c]);
      p_one[c] = 1.0;
    }
  }

  const SparseChain sc = context_chain(N, p_one);
  const CommunicatingClasses cc = communicating_classes(sc);
  for (const auto& cls : cc.classes) {
    std::vector<std::string> names;
    for (auto s : cls) names.push_back(block_string(s, N));
    out.classes.push_back(std::move(names));
  }
  if (cc.classes.size() != 1) {
    throw IrreducibilityError("closure is reducible on the positive contexts", out.classes);
  }

  double total = 0.0;
  for (double v : pi) total += v;
  if (std::abs(total - 1.0) > 0.0) {
    out.source_error += std::abs(total - 1.0);
    for (double& v : pi) v /= total;
  }
  out.stationarity_residual = stationarity_residual(sc, pi);
  if (out.stationarity_residual > 1e-10) {
    std::vector<double> solved = solve_stationary(sc, [N](std::uint32_t s) { return block_string(s, N); });
    double tv = 0.0;
    for (std::uint64_t c = 0; c < contexts; ++c) tv += std::abs(solved[c] - pi[c]);
    out.source_error += tv;
    pi = std::move(solved);
    out.stationarity_residual = stationarity_residual(sc, pi);
  }
  out.chain = MarkovChainSpec{N, std::move(p_one), FiniteDistribution(N, std::move(pi), out.source_error)};
  return out;
}

ProcessHandle closure_handle(const ClosureResult& result) {
  return std::make_shared<MarkovProcess>(result.chain, "closure");
}

}  // namespace ergolab

#include "ergolab/process.hpp"

#include <algorithm>
#include <cmath>

#include "ergolab/errors.hpp"
#include "ergolab/rng.hpp"

namespace ergolab {

std::string ProcessTag::to_string() const {
  switch (kind) {
    case ProcessKind::Markov:
      return "markov(" + std::to_string(markov_order) + ")";
    case ProcessKind::FinitarilyMarkovian:
      return "finitarily_markovian";
    case ProcessKind::NonFinitarilyMarkovian:
      return "non_finitarily_markovian";
    case ProcessKind::Unknown:
      break;
  }
  return "unknown";
}

Word sample_path(const ProcessHandle& handle, std::size_t length, std::uint64_t seed) {
  if (length < 1) throw RangeError("sample length must be positive");
  return handle->sample(length, seed);
}

std::size_t sample_cdf(const std::vector<double>& cdf, double u) {
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  if (it == cdf.end()) {
    // Rounding left the total just below u; take the last state with mass.
    std::size_t i = cdf.size() - 1;
    while (i > 0 && cdf[i] == cdf[i - 1]) --i;
    return i;
  }
  return static_cast<std::size_t>(it - cdf.begin());
}

MarkovProcess::MarkovProcess(MarkovChainSpec chain, std::string label)
    : chain_(std::move(chain)), label_(std::move(label)) {
  stationary_cdf_.resize(chain_.contexts());
  double acc = 0.0;
  for (std::uint64_t c = 0; c < chain_.contexts(); ++c) {
    acc += chain_.stationary[c];
    stationary_cdf_[c] = acc;
  }
}

FiniteDistribution MarkovProcess::dims(int n) const { return markov_exact_dims(chain_, n); }

Word MarkovProcess::sample(std::size_t length, std::uint64_t seed) const {
  Rng rng(seed);
  std::vector<Bit> bits;
  bits.reserve(length);
  const int k = chain_.order;
  std::uint64_t ctx = sample_cdf(stationary_cdf_, rng.uniform());
  for (int i = 0; i < k && bits.size() < length; ++i) bits.push_back(static_cast<Bit>((ctx >> (k - 1 - i)) & 1U));
  while (bits.size() < length) {
    const Bit b = rng.bernoulli(chain_.p_one[ctx]) ? 1 : 0;
    bits.push_back(b);
    ctx = chain_.shift(ctx, b);
  }
  return Word(std::move(bits));
}

nlohmann::json MarkovProcess::describe() const { return {{"name", label_}, {"chain", to_json(chain_)}}; }

MixtureProcess::MixtureProcess(std::vector<ProcessHandle> components, std::vector<double> weights)
    : components_(std::move(components)), weights_(std::move(weights)) {
  if (components_.empty() || components_.size() != weights_.size()) throw ShapeError("mixture needs one weight per component");
  double s = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0)) throw RangeError("mixture weight must be >= 0");
    s += w;
  }
  if (std::abs(s - 1.0) > 1e-9) throw RangeError("mixture weights must sum to 1");
}

FiniteDistribution MixtureProcess::dims(int n) const {
  std::vector<double> probs(std::size_t{1} << n, 0.0);
  double err = 0.0;
  for (std::size_t i = 0; i < components_.size(); ++i) {
    const FiniteDistribution d = components_[i]->dims(n);
    for (std::size_t x = 0; x < probs.size(); ++x) probs[x] += weights_[i] * d[x];
    err += weights_[i] * d.error_bound();
  }
  return FiniteDistribution(n, std::move(probs), err);
}

Word MixtureProcess::sample(std::size_t length, std::uint64_t seed) const {
  Rng rng(derive_seed(seed, 0));
  double u = rng.uniform();
  std::size_t i = 0;
  while (i + 1 < weights_.size() && u >= weights_[i]) u -= weights_[i++];
  return components_[i]->sample(length, derive_seed(seed, 1));
}

FiniteDistribution labeled_chain_dims(const LabeledChain& chain, int n, double error_bound, int cap) {
  if (n < 1) throw RangeError("block length must be positive");
  if (n > cap) throw RangeError("block length exceeds enumeration cap");
  const std::size_t states = chain.initial.size();
  std::vector<double> probs(std::size_t{1} << n, 0.0);

  // Depth-first over prefixes; alpha[s] = P(prefix, current state = s).
  struct Frame {
    std::vector<double> alpha;
    std::uint64_t prefix;
    int depth;
  };
  std::vector<Frame> stack;
  for (Bit b = 0; b <= 1; ++b) {
    std::vector<double> alpha(states, 0.0);
    bool any = false;
    for (std::size_t s = 0; s < states; ++s) {
      if (chain.label[s] == b && chain.initial[s] > 0.0) {
        alpha[s] = chain.initial[s];
        any = true;
      }
    }
    if (any) stack.push_back({std::move(alpha), b, 1});
  }
  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    if (f.depth == n) {
      double mass = 0.0;
      for (double a : f.alpha) mass += a;
      probs[f.prefix] = mass;
      continue;
    }
    std::vector<double> next0(states, 0.0), next1(states, 0.0);
    bool any0 = false, any1 = false;
    for (std::size_t s = 0; s < states; ++s) {
      const double a = f.alpha[s];
      if (a == 0.0) continue;
      for (const auto& [t, p] : chain.rows[s]) {
        if (chain.label[t]) {
          next1[t] += a * p;
          any1 = true;
        } else {
          next0[t] += a * p;
          any0 = true;
        }
      }
    }
    if (any0) stack.push_back({std::move(next0), f.prefix << 1, f.depth + 1});
    if (any1) stack.push_back({std::move(next1), (f.prefix << 1) | 1U, f.depth + 1});
  }
  return FiniteDistribution(n, std::move(probs), error_bound);
}

}  // namespace ergolab

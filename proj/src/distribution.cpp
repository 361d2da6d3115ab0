#include "ergolab/distribution.hpp"

#include <cmath>
#include <string>

#include "ergolab/errors.hpp"

namespace ergolab {

namespace {

constexpr double kSumTolerance = 1e-9;
constexpr double kClampSlack = 1e-12;

void check_length(int n) {
  if (n < 0 || n > 40) throw RangeError("block length out of range: " + std::to_string(n));
}

}  // namespace

FiniteDistribution::FiniteDistribution(int block_length, std::vector<double> probs, double error_bound)
    : n_(block_length), probs_(std::move(probs)), error_bound_(error_bound) {
  check_length(n_);
  if (probs_.size() != (std::size_t{1} << n_)) throw ShapeError("probability vector size is not 2^n");
  if (!(error_bound_ >= 0.0) || !std::isfinite(error_bound_)) throw RangeError("error_bound must be finite and >= 0");
  double sum = 0.0;
  for (double& p : probs_) {
    if (!std::isfinite(p) || p < -kClampSlack || p > 1.0 + kClampSlack) {
      throw RangeError("probability outside [0,1]: " + std::to_string(p));
    }
    if (p < 0.0) p = 0.0;
    if (p > 1.0) p = 1.0;
    sum += p;
  }
  if (std::abs(sum - 1.0) > kSumTolerance + error_bound_) {
    throw RangeError("probabilities sum to " + std::to_string(sum) + ", not 1");
  }
}

FiniteDistribution FiniteDistribution::uniform(int n) {
  check_length(n);
  const std::size_t size = std::size_t{1} << n;
  return FiniteDistribution(n, std::vector<double>(size, 1.0 / static_cast<double>(size)));
}

FiniteDistribution FiniteDistribution::point_mass(const Word& w) {
  const int n = static_cast<int>(w.size());
  check_length(n);
  std::vector<double> probs(std::size_t{1} << n, 0.0);
  probs[block_index(w.bits())] = 1.0;
  return FiniteDistribution(n, std::move(probs));
}

double FiniteDistribution::prob(const Word& w) const {
  if (static_cast<int>(w.size()) != n_) throw ShapeError("word length does not match block length");
  return probs_[block_index(w.bits())];
}

FiniteDistribution FiniteDistribution::with_error_bound(double e) const {
  FiniteDistribution d = *this;
  if (!(e >= 0.0)) throw RangeError("error_bound must be >= 0");
  d.error_bound_ = e;
  return d;
}

FiniteDistribution marginalize(const FiniteDistribution& d, int j, Side side) {
  const int n = d.block_length();
  if (j < 1 || j > n) throw RangeError("marginal length " + std::to_string(j) + " outside [1, " + std::to_string(n) + "]");
  std::vector<double> out(std::size_t{1} << j, 0.0);
  const int drop = n - j;
  const std::uint64_t mask = (std::uint64_t{1} << j) - 1;
  const auto probs = d.probs();
  for (std::uint64_t x = 0; x < probs.size(); ++x) {
    const std::uint64_t key = side == Side::Prefix ? (x >> drop) : (x & mask);
    out[key] += probs[x];
  }
  return FiniteDistribution(j, std::move(out), d.error_bound());
}

double tv_block_distance(const FiniteDistribution& p, const FiniteDistribution& q) {
  if (p.block_length() != q.block_length()) throw ShapeError("block lengths differ");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return s;
}

nlohmann::json to_json(const FiniteDistribution& d) {
  nlohmann::json probs = nlohmann::json::object();
  for (std::uint64_t i = 0; i < d.size(); ++i) probs[block_string(i, d.block_length())] = d[i];
  return {{"n", d.block_length()}, {"probs", probs}, {"error_bound", d.error_bound()}};
}

FiniteDistribution distribution_from_json(const nlohmann::json& j) {
  const int n = j.at("n").get<int>();
  check_length(n);
  std::vector<double> probs(std::size_t{1} << n, 0.0);
  for (const auto& [key, value] : j.at("probs").items()) {
    if (static_cast<int>(key.size()) != n) throw ShapeError("block '" + key + "' has wrong length");
    probs[block_index(Word::from_string(key).bits())] = value.get<double>();
  }
  return FiniteDistribution(n, std::move(probs), j.value("error_bound", 0.0));
}

}  // namespace ergolab

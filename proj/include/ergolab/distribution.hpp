#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "ergolab/word.hpp"

namespace ergolab {

/// Largest block length enumerated densely (2^24 entries).
inline constexpr int kDefaultBlockCap = 24;

/// Probability law on {0,1}^n, stored densely by block index, together with an
/// additive L1 bound on its distance from the intended process's n-block law.
class FiniteDistribution {
 public:
  FiniteDistribution() : FiniteDistribution(0, {1.0}) {}
  FiniteDistribution(int block_length, std::vector<double> probs, double error_bound = 0.0);

  static FiniteDistribution uniform(int n);
  static FiniteDistribution point_mass(const Word& w);

  int block_length() const { return n_; }
  double error_bound() const { return error_bound_; }
  std::span<const double> probs() const { return probs_; }
  std::size_t size() const { return probs_.size(); }

  double operator[](std::uint64_t index) const { return probs_[index]; }
  double prob(const Word& w) const;

  FiniteDistribution with_error_bound(double e) const;

 private:
  int n_ = 0;
  std::vector<double> probs_;
  double error_bound_ = 0.0;
};

enum class Side { Prefix, Suffix };

/// Law of the first (Prefix) or last (Suffix) j coordinates.
FiniteDistribution marginalize(const FiniteDistribution& d, int j, Side side = Side::Prefix);

/// Sum over blocks of |p - q|. This is twice the usual total variation.
double tv_block_distance(const FiniteDistribution& p, const FiniteDistribution& q);

nlohmann::json to_json(const FiniteDistribution& d);
FiniteDistribution distribution_from_json(const nlohmann::json& j);

}  // namespace ergolab

#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "ergolab/process.hpp"

namespace ergolab {

// Circle [0,1) in fixed point: x is stored as round(x * 2^62).
inline constexpr int kCircleBits = 62;
inline constexpr std::uint64_t kCircle = std::uint64_t{1} << kCircleBits;

std::uint64_t to_circle(double x);
double from_circle(std::uint64_t x);

/// Sorted, disjoint, non-adjacent half-open arcs [lo, hi) of the circle.
/// An arc crossing 0 is stored as two pieces.
class IntervalSet {
 public:
  struct Arc {
    std::uint64_t lo;
    std::uint64_t hi;
  };

  IntervalSet() = default;
  /// Arc from lo of the given length, wrapping at the circle.
  static IntervalSet arc(std::uint64_t lo, std::uint64_t length);
  static IntervalSet centered(std::uint64_t center, std::uint64_t radius);

  const std::vector<Arc>& arcs() const { return arcs_; }
  bool empty() const { return arcs_.empty(); }
  std::uint64_t measure() const;
  bool contains(std::uint64_t x) const;

  IntervalSet rotate(std::uint64_t shift) const;
  IntervalSet dilate(std::uint64_t radius) const;
  IntervalSet unite(const IntervalSet& other) const;
  IntervalSet intersect(const IntervalSet& other) const;
  IntervalSet subtract(const IntervalSet& other) const;
  IntervalSet complement() const;
  /// Smallest point of the circle outside the set, if any.
  bool first_gap(std::uint64_t& out) const;
  /// Arc endpoints (both lo and hi), deduplicated and sorted.
  std::vector<std::uint64_t> endpoints() const;

 private:
  static IntervalSet normalized(std::vector<Arc> arcs);
  std::vector<Arc> arcs_;
};

struct RotationParams {
  double alpha = 0.6180339887498949;
  int n_max = 62;
  double delta_1 = 1e-4;
  double decay = 1.04;
  std::size_t step_budget = 1000000;

  double delta(int n) const;
  /// max over n < n_max of sum_{m>n} m delta_m / delta_n.
  double tail_ratio() const;
  void validate() const;

  nlohmann::json to_json() const;
  static RotationParams from_json(const nlohmann::json& j);
};

/// k-th binary word in length-lexicographic order, k >= 1: 0, 1, 00, 01, ...
std::string enumerated_word(std::uint64_t k);

struct RotationConstruction {
  RotationParams params;
  std::uint64_t alpha = 0;
  std::vector<std::uint64_t> centers;  // x_n, n = 1..n_max at index n-1
  std::vector<std::uint64_t> radii;
  IntervalSet base;                    // A
  std::vector<IntervalSet> returns;    // returns[k-1] = A_k
  IntervalSet ones;                    // P_1
  int realized_depth = 0;              // largest k with A_k of positive measure for all j <= k
  std::uint64_t kac_total = 0;         // sum_k k mu(A_k), in circle units

  nlohmann::json summary() const;
};

RotationConstruction build_rotation(const RotationParams& params);

class RotationProcess final : public Process {
 public:
  explicit RotationProcess(RotationParams params);

  /// Exact law of the coded rotation, from the cell decomposition cut out by
  /// the preimages of the endpoints of P_1.
  FiniteDistribution dims(int n) const override;
  Word sample(std::size_t length, std::uint64_t seed) const override;
  ProcessTag tag() const override { return ProcessTag::non_finitarily_markovian(); }
  std::string name() const override { return "rotation"; }
  nlohmann::json describe() const override;

  const RotationConstruction& construction() const { return construction_; }

 private:
  RotationConstruction construction_;
  mutable std::mutex cache_mutex_;
  mutable std::map<int, FiniteDistribution> cache_;
};

ProcessHandle rotation_process(RotationParams params = {});

}  // namespace ergolab

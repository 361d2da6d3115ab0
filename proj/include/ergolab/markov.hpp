#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ergolab/distribution.hpp"

namespace ergolab {

/// Row-sparse transition structure of a finite Markov chain. Inactive states
/// carry no row and are excluded from the state space.
struct SparseChain {
  std::vector<std::vector<std::pair<std::uint32_t, double>>> rows;
  std::vector<bool> active;

  std::size_t size() const { return rows.size(); }
};

SparseChain dense_chain(const std::vector<std::vector<double>>& matrix);

struct CommunicatingClasses {
  std::vector<std::vector<std::uint32_t>> classes;
  std::vector<bool> closed;

  std::size_t closed_count() const;
};

/// Strongly connected components over positive-probability edges between
/// active states.
CommunicatingClasses communicating_classes(const SparseChain& chain);

/// Unique stationary law. Transient states get mass 0. Throws
/// IrreducibilityError when there is not exactly one closed class.
std::vector<double> solve_stationary(const SparseChain& chain,
                                     const std::function<std::string(std::uint32_t)>& state_name = {});

double stationarity_residual(const SparseChain& chain, std::span<const double> pi);

/// Binary chain of order k: P(next = 1 | last k symbols). Contexts outside
/// the support have p_one = NaN.
struct MarkovChainSpec {
  int order = 0;
  std::vector<double> p_one;
  FiniteDistribution stationary;

  bool has_row(std::uint64_t context) const { return p_one[context] == p_one[context]; }
  double p_next(std::uint64_t context, Bit b) const { return b ? p_one[context] : 1.0 - p_one[context]; }
  std::uint64_t contexts() const { return std::uint64_t{1} << order; }
  std::uint64_t shift(std::uint64_t context, Bit b) const {
    return order == 0 ? 0 : ((context << 1) | b) & (contexts() - 1);
  }
};

inline constexpr double kUndefinedRow = std::numeric_limits<double>::quiet_NaN();

/// The k-tuple chain on contexts induced by a binary order-k chain.
SparseChain context_chain(int order, std::span<const double> p_one);

FiniteDistribution markov_stationary(int order, std::span<const double> p_one);

/// Builds a chain, solving for its stationary law.
MarkovChainSpec make_markov_chain(int order, std::vector<double> p_one);

/// Exact n-block law: stationary k-block law times transition products.
FiniteDistribution markov_exact_dims(const MarkovChainSpec& chain, int n, int cap = kDefaultBlockCap);

struct ChainDiagnostics {
  double max_row_error = 0.0;
  double stationarity_residual = 0.0;
  std::size_t positive_classes = 0;
  std::vector<std::size_t> class_sizes;
};

/// Measures the chain invariants (row sums, shift invariance, irreducibility
/// on positive-mass contexts) without throwing.
ChainDiagnostics diagnose_markov_chain(const MarkovChainSpec& chain);

/// Throws if any chain invariant is violated.
void validate_markov_chain(const MarkovChainSpec& chain);

nlohmann::json to_json(const MarkovChainSpec& chain);
MarkovChainSpec markov_chain_from_json(const nlohmann::json& j);

}  // namespace ergolab

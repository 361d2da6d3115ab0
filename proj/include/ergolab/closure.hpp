#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ergolab/markov.hpp"
#include "ergolab/process.hpp"

namespace ergolab {

struct ClosureResult {
  MarkovChainSpec chain;
  /// Error bound of the source's (N+1)-block law plus any mass moved while
  /// repairing an approximate source.
  double source_error = 0.0;
  /// Communicating classes of the positive contexts (one class when ergodic).
  std::vector<std::vector<std::string>> classes;
  double stationarity_residual = 0.0;

  nlohmann::json to_json() const;
};

/// Order-N chain with P(next | x_1^N) taken from the source's (N+1)-block law
/// on contexts of positive N-block mass.
ClosureResult close_to_markov(const ProcessHandle& handle, int N);

/// Handle wrapping a closure result; tagged markov(N).
ProcessHandle closure_handle(const ClosureResult& result);

}  // namespace ergolab

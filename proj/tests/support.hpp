#pragma once

#include <gtest/gtest.h>

#include "oracles.hpp"

namespace testing_support {

// Prefix and suffix marginals of dims(n) against dims(n-1).
inline void expect_consistent(const ergolab::ProcessHandle& h, int n_max) {
  for (int n = 2; n <= n_max; ++n) {
    const FiniteDistribution d = h->dims(n);
    const FiniteDistribution e = h->dims(n - 1);
    const double tol = d.error_bound() + e.error_bound() + 1e-9;
    EXPECT_LE(ergolab::tv_block_distance(ergolab::marginalize(d, n - 1, ergolab::Side::Prefix), e), tol) << h->name() << " n=" << n;
    EXPECT_LE(ergolab::tv_block_distance(ergolab::marginalize(d, n - 1, ergolab::Side::Suffix), e), tol) << h->name() << " n=" << n;
  }
}

}  // namespace testing_support

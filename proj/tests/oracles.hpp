#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ergolab/distribution.hpp"
#include "ergolab/process.hpp"
#include "ergolab/rng.hpp"

namespace testing_support {

using ergolab::Bit;
using ergolab::FiniteDistribution;

// Dense Gauss-Jordan solve of pi P = pi, sum pi = 1 (last balance equation
// replaced by normalization).
inline std::vector<double> dense_stationary(const std::vector<std::vector<double>>& P) {
  const std::size_t n = P.size();
  std::vector<std::vector<double>> A(n, std::vector<double>(n + 1, 0.0));
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) A[i][j] = P[j][i] - (i == j ? 1.0 : 0.0);
  }
  for (std::size_t j = 0; j < n; ++j) A[n - 1][j] = 1.0;
  A[n - 1][n] = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
    }
    std::swap(A[c], A[piv]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = A[r][c] / A[c][c];
      for (std::size_t k = c; k <= n; ++k) A[r][k] -= f * A[c][k];
    }
  }
  std::vector<double> pi(n);
  for (std::size_t i = 0; i < n; ++i) pi[i] = A[i][n] / A[i][i];
  return pi;
}

// Sum over all hidden paths of length n of pi(s_1) prod P(s_t, s_{t+1}),
// credited to the label word.
inline std::vector<double> brute_force_labels(const std::vector<std::vector<double>>& P, const std::vector<double>& pi,
                                              const std::vector<Bit>& label, int n) {
  const std::size_t S = P.size();
  std::vector<double> out(std::size_t{1} << n, 0.0);
  std::vector<std::size_t> path(n, 0);
  while (true) {
    double p = pi[path[0]];
    for (int t = 1; t < n && p > 0.0; ++t) p *= P[path[t - 1]][path[t]];
    std::size_t idx = 0;
    for (int t = 0; t < n; ++t) idx = (idx << 1) | label[path[t]];
    out[idx] += p;
    int t = n - 1;
    while (t >= 0 && ++path[t] == S) path[t--] = 0;
    if (t < 0) break;
  }
  return out;
}

inline double l1(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s;
}


// Sliding k-block frequencies counted directly, as an independent oracle.
inline std::vector<double> naive_rates(const ergolab::Word& x, int k) {
  std::vector<double> r(std::size_t{1} << k, 0.0);
  const std::size_t windows = x.size() - k + 1;
  for (std::size_t i = 0; i < windows; ++i) {
    std::size_t idx = 0;
    for (int j = 0; j < k; ++j) idx = idx * 2 + x[i + j];
    r[idx] += 1.0 / static_cast<double>(windows);
  }
  return r;
}

// Random order-k table with entries bounded away from 0 and 1.
inline std::vector<double> random_table(int k, std::uint64_t seed) {
  ergolab::Rng rng(seed);
  std::vector<double> t(std::size_t{1} << k);
  for (double& p : t) p = 0.05 + 0.9 * rng.uniform();
  return t;
}

inline int naive_border(const std::string& u) {
  for (int t = static_cast<int>(u.size()) - 1; t > 0; --t) {
    if (u.compare(0, t, u, u.size() - t, t) == 0) return t;
  }
  return 0;
}

// Longest suffix of a equal to a prefix of b.
inline int naive_overlap(const std::string& a, const std::string& b) {
  for (int t = static_cast<int>(std::min(a.size(), b.size())); t > 0; --t) {
    if (a.compare(a.size() - t, t, b, 0, t) == 0) return t;
  }
  return 0;
}

inline std::vector<std::size_t> naive_find_all(const std::string& needle, const std::string& hay) {
  std::vector<std::size_t> at;
  for (std::size_t i = 0; i + needle.size() <= hay.size(); ++i) {
    if (hay.compare(i, needle.size(), needle) == 0) at.push_back(i);
  }
  return at;
}

}  // namespace testing_support

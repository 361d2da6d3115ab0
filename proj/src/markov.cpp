#include "ergolab/markov.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "ergolab/errors.hpp"

namespace ergolab {

namespace {

constexpr double kRowTolerance = 1e-9;

std::string default_name(std::uint32_t s) { return std::to_string(s); }

}  // namespace

SparseChain dense_chain(const std::vector<std::vector<double>>& matrix) {
  SparseChain chain;
  const std::size_t n = matrix.size();
  chain.rows.resize(n);
  chain.active.assign(n, true);
  for (std::size_t i = 0; i < n; ++i) {
    if (matrix[i].size() != n) throw ShapeError("transition matrix is not square");
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double p = matrix[i][j];
      if (!(p >= 0.0 && p <= 1.0)) throw RangeError("transition probability outside [0,1]");
      sum += p;
      if (p > 0.0) chain.rows[i].emplace_back(static_cast<std::uint32_t>(j), p);
    }
    if (std::abs(sum - 1.0) > kRowTolerance) throw RangeError("transition row " + std::to_string(i) + " does not sum to 1");
  }
  return chain;
}

std::size_t CommunicatingClasses::closed_count() const {
  return static_cast<std::size_t>(std::count(closed.begin(), closed.end(), true));
}

CommunicatingClasses communicating_classes(const SparseChain& chain) {
  // Iterative Tarjan.
  const std::size_t n = chain.size();
  constexpr std::uint32_t kUnvisited = ~std::uint32_t{0};
  std::vector<std::uint32_t> index(n, kUnvisited), low(n, 0), comp(n, kUnvisited);
  std::vector<bool> on_stack(n, false);
  std::vector<std::uint32_t> stack;
  std::vector<std::pair<std::uint32_t, std::size_t>> call;
  std::uint32_t counter = 0;
  CommunicatingClasses out;

  auto is_edge = [&](const std::pair<std::uint32_t, double>& e) { return e.second > 0.0 && chain.active[e.first]; };

  for (std::uint32_t root = 0; root < n; ++root) {
    if (!chain.active[root] || index[root] != kUnvisited) continue;
    call.emplace_back(root, 0);
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      auto& [v, edge] = call.back();
      const auto& row = chain.rows[v];
      if (edge < row.size()) {
        const auto& e = row[edge++];
        if (!is_edge(e)) continue;
        const std::uint32_t w = e.first;
        if (index[w] == kUnvisited) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      const std::uint32_t v_done = v;
      if (low[v_done] == index[v_done]) {
        std::vector<std::uint32_t> members;
        std::uint32_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = static_cast<std::uint32_t>(out.classes.size());
          members.push_back(w);
        } while (w != v_done);
        std::sort(members.begin(), members.end());
        out.classes.push_back(std::move(members));
      }
      call.pop_back();
      if (!call.empty()) {
        const std::uint32_t parent = call.back().first;
        low[parent] = std::min(low[parent], low[v_done]);
      }
    }
  }

  out.closed.assign(out.classes.size(), true);
  for (std::uint32_t v = 0; v < n; ++v) {
    if (!chain.active[v]) continue;
    for (const auto& e : chain.rows[v]) {
      if (is_edge(e) && comp[e.first] != comp[v]) out.closed[comp[v]] = false;
    }
  }
  // Deterministic order: by smallest member.
  std::vector<std::size_t> order(out.classes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return out.classes[a].front() < out.classes[b].front(); });
  CommunicatingClasses sorted;
  for (std::size_t i : order) {
    sorted.classes.push_back(std::move(out.classes[i]));
    sorted.closed.push_back(out.closed[i]);
  }
  return sorted;
}

std::vector<double> solve_stationary(const SparseChain& chain,
                                     const std::function<std::string(std::uint32_t)>& state_name) {
  const auto name = state_name ? state_name : std::function<std::string(std::uint32_t)>(default_name);
  for (std::uint32_t v = 0; v < chain.size(); ++v) {
    if (!chain.active[v]) continue;
    for (const auto& [w, p] : chain.rows[v]) {
      if (p > 0.0 && !chain.active[w]) {
        throw InconsistentMarginalsError("state " + name(v) + " moves to undefined state " + name(w));
      }
    }
  }
  const CommunicatingClasses cc = communicating_classes(chain);
  if (cc.closed_count() != 1) {
    std::vector<std::vector<std::string>> named;
    for (const auto& cls : cc.classes) {
      std::vector<std::string> names;
      for (auto s : cls) names.push_back(name(s));
      named.push_back(std::move(names));
    }
    throw IrreducibilityError("chain has " + std::to_string(cc.closed_count()) + " closed communicating classes",
                              std::move(named));
  }
  std::size_t closed_idx = 0;
  while (!cc.closed[closed_idx]) ++closed_idx;
  const auto& members = cc.classes[closed_idx];
  const std::size_t m = members.size();

  std::vector<double> pi(chain.size(), 0.0);
  if (m == 1) {
    pi[members[0]] = 1.0;
    return pi;
  }
  std::vector<std::int64_t> local(chain.size(), -1);
  for (std::size_t i = 0; i < m; ++i) local[members[i]] = static_cast<std::int64_t>(i);

  // Rows of (P^T - I), with the first equation replaced by sum(pi) = 1.
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(3 * m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::uint32_t v = members[i];
    for (const auto& [w, p] : chain.rows[v]) {
      const std::int64_t j = local[w];
      if (j > 0 && p > 0.0) triplets.emplace_back(static_cast<int>(j), static_cast<int>(i), p);
    }
    if (i > 0) triplets.emplace_back(static_cast<int>(i), static_cast<int>(i), -1.0);
    triplets.emplace_back(0, static_cast<int>(i), 1.0);
  }
  Eigen::SparseMatrix<double> a(static_cast<int>(m), static_cast<int>(m));
  a.setFromTriplets(triplets.begin(), triplets.end());
  a.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> solver;
  solver.compute(a);
  if (solver.info() != Eigen::Success) throw Error("stationary solve: factorization failed");
  Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<int>(m));
  b(0) = 1.0;
  Eigen::VectorXd x = solver.solve(b);
  if (solver.info() != Eigen::Success) throw Error("stationary solve failed");
  // One step of iterative refinement.
  Eigen::VectorXd r = b - a * x;
  x += solver.solve(r);

  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double v = std::max(0.0, x(static_cast<int>(i)));
    pi[members[i]] = v;
    total += v;
  }
  for (double& v : pi) v /= total;
  return pi;
}

double stationarity_residual(const SparseChain& chain, std::span<const double> pi) {
  std::vector<double> next(chain.size(), 0.0);
  for (std::size_t v = 0; v < chain.size(); ++v) {
    if (!chain.active[v] || pi[v] == 0.0) continue;
    for (const auto& [w, p] : chain.rows[v]) next[w] += pi[v] * p;
  }
  double r = 0.0;
  for (std::size_t v = 0; v < chain.size(); ++v) r += std::abs(next[v] - pi[v]);
  return r;
}

SparseChain context_chain(int order, std::span<const double> p_one) {
  if (order < 0 || order > kDefaultBlockCap) throw RangeError("markov order out of range");
  const std::uint64_t n = std::uint64_t{1} << order;
  if (p_one.size() != n) throw ShapeError("transition table must have 2^order rows");
  const std::uint64_t mask = n - 1;
  SparseChain chain;
  chain.rows.resize(n);
  chain.active.assign(n, false);
  for (std::uint64_t c = 0; c < n; ++c) {
    const double p = p_one[c];
    if (p != p) continue;
    if (!(p >= 0.0 && p <= 1.0)) throw RangeError("transition probability outside [0,1]");
    chain.active[c] = true;
    const std::uint64_t to0 = order == 0 ? 0 : (c << 1) & mask;
    const std::uint64_t to1 = order == 0 ? 0 : ((c << 1) | 1U) & mask;
    if (to0 == to1) {
      chain.rows[c].emplace_back(static_cast<std::uint32_t>(to0), 1.0);
    } else {
      if (p < 1.0) chain.rows[c].emplace_back(static_cast<std::uint32_t>(to0), 1.0 - p);
      if (p > 0.0) chain.rows[c].emplace_back(static_cast<std::uint32_t>(to1), p);
    }
  }
  return chain;
}

FiniteDistribution markov_stationary(int order, std::span<const double> p_one) {
  const SparseChain chain = context_chain(order, p_one);
  auto name = [order](std::uint32_t s) { return order == 0 ? std::string("<empty>") : block_string(s, order); };
  std::vector<double> pi = solve_stationary(chain, name);
  return FiniteDistribution(order, std::move(pi));
}

MarkovChainSpec make_markov_chain(int order, std::vector<double> p_one) {
  FiniteDistribution st = markov_stationary(order, p_one);
  // Rows of transient contexts are dropped: they carry no stationary mass.
  for (std::uint64_t c = 0; c < p_one.size(); ++c) {
    if (st[c] == 0.0) p_one[c] = kUndefinedRow;
  }
  return MarkovChainSpec{order, std::move(p_one), std::move(st)};
}

FiniteDistribution markov_exact_dims(const MarkovChainSpec& chain, int n, int cap) {
  if (n < 1) throw RangeError("block length must be positive");
  if (n > cap) throw RangeError("block length " + std::to_string(n) + " exceeds enumeration cap " + std::to_string(cap));
  const int k = chain.order;
  if (n <= k) return marginalize(chain.stationary, n, Side::Prefix);
  std::vector<double> cur(chain.stationary.probs().begin(), chain.stationary.probs().end());
  const std::uint64_t mask = chain.contexts() - 1;
  for (int len = k; len < n; ++len) {
    std::vector<double> next(cur.size() * 2, 0.0);
    for (std::uint64_t x = 0; x < cur.size(); ++x) {
      const double px = cur[x];
      if (px == 0.0) continue;
      const std::uint64_t ctx = k == 0 ? 0 : (x & mask);
      const double p1 = chain.p_one[ctx];
      if (p1 != p1) throw InconsistentMarginalsError("positive-mass block reaches an undefined context");
      next[x << 1] = px * (1.0 - p1);
      next[(x << 1) | 1U] = px * p1;
    }
    cur = std::move(next);
  }
  return FiniteDistribution(n, std::move(cur), chain.stationary.error_bound());
}

ChainDiagnostics diagnose_markov_chain(const MarkovChainSpec& chain) {
  ChainDiagnostics d;
  const auto& st = chain.stationary;
  for (std::uint64_t c = 0; c < chain.contexts(); ++c) {
    if (st[c] > 0.0 && !chain.has_row(c)) d.max_row_error = std::max(d.max_row_error, 1.0);
  }
  SparseChain cc = context_chain(chain.order, chain.p_one);
  for (std::uint64_t c = 0; c < chain.contexts(); ++c) cc.active[c] = cc.active[c] && st[c] > 0.0;
  d.stationarity_residual = stationarity_residual(cc, st.probs());
  const CommunicatingClasses classes = communicating_classes(cc);
  d.positive_classes = classes.classes.size();
  for (const auto& c : classes.classes) d.class_sizes.push_back(c.size());
  return d;
}

void validate_markov_chain(const MarkovChainSpec& chain) {
  if (chain.stationary.block_length() != chain.order) throw ShapeError("stationary law has wrong block length");
  const ChainDiagnostics d = diagnose_markov_chain(chain);
  if (d.max_row_error > kRowTolerance) throw RangeError("positive-mass context without a transition row");
  if (d.stationarity_residual > kRowTolerance + chain.stationary.error_bound()) {
    throw InconsistentMarginalsError("stationary law is not shift invariant (residual " +
                                     std::to_string(d.stationarity_residual) + ")");
  }
  if (d.positive_classes != 1) {
    throw IrreducibilityError("positive-mass contexts form " + std::to_string(d.positive_classes) + " classes", {});
  }
}

nlohmann::json to_json(const MarkovChainSpec& chain) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::uint64_t c = 0; c < chain.contexts(); ++c) {
    if (!chain.has_row(c)) continue;
    rows.push_back({{"context", block_string(c, chain.order)},
                    {"p0", 1.0 - chain.p_one[c]},
                    {"p1", chain.p_one[c]},
                    {"stationary", chain.stationary[c]}});
  }
  return {{"schema", "ergolab.chain/1"}, {"order", chain.order}, {"rows", rows},
          {"stationary_error_bound", chain.stationary.error_bound()}};
}

MarkovChainSpec markov_chain_from_json(const nlohmann::json& j) {
  const int order = j.at("order").get<int>();
  if (order < 0 || order > kDefaultBlockCap) throw ConfigError("markov order out of range");
  std::vector<double> p_one(std::size_t{1} << order, kUndefinedRow);
  auto set_row = [&](const std::string& ctx, double p1) {
    if (static_cast<int>(ctx.size()) != order) throw ConfigError("context '" + ctx + "' has wrong length");
    p_one[block_index(Word::from_string(ctx).bits())] = p1;
  };
  if (j.contains("p_one")) {
    for (const auto& [ctx, v] : j.at("p_one").items()) set_row(ctx, v.get<double>());
  } else if (j.contains("rows")) {
    for (const auto& row : j.at("rows")) {
      const double p1 = row.at("p1").get<double>();
      if (row.contains("p0") && std::abs(row.at("p0").get<double>() + p1 - 1.0) > kRowTolerance) {
        throw ConfigError("row for context '" + row.at("context").get<std::string>() + "' does not sum to 1");
      }
      set_row(row.at("context").get<std::string>(), p1);
    }
  } else {
    throw ConfigError("markov chain needs 'p_one' or 'rows'");
  }
  return make_markov_chain(order, std::move(p_one));
}

}  // namespace ergolab

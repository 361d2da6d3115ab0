#include "ergolab/generators.hpp"

#include <cmath>

#include "ergolab/errors.hpp"

namespace ergolab {

ProcessHandle iid_bernoulli(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw RangeError("Bernoulli parameter outside [0,1]");
  auto h = std::make_shared<MarkovProcess>(make_markov_chain(0, {p}), "iid");
  return h;
}

ProcessHandle markov_from_table(int order, std::vector<double> p_one) {
  return std::make_shared<MarkovProcess>(make_markov_chain(order, std::move(p_one)));
}

ProcessHandle period_two() { return std::make_shared<MarkovProcess>(make_markov_chain(1, {1.0, 0.0}), "period2"); }

// ---------------------------------------------------------------------------

namespace {

bool is_pow2_plus_one(std::uint64_t s) {
  if (s < 3) return false;
  const std::uint64_t t = s - 1;
  return (t & (t - 1)) == 0;
}

}  // namespace

Bit WalkChainLabeling::operator()(std::uint64_t state) const {
  if (state <= 1) return 0;
  if (state % 2 == 0) return 1;
  if (auto it = odd_table.find(state); it != odd_table.end()) return it->second;
  if (predicate == "pow2plus1") return is_pow2_plus_one(state) ? 0 : 1;
  return default_odd;
}

void WalkChainLabeling::validate() const {
  for (const auto& [s, b] : odd_table) {
    if (s < 3 || s % 2 == 0) throw ConfigError("walk labeling may only set odd states >= 3 (got " + std::to_string(s) + ")");
    if (b > 1) throw ConfigError("walk label must be 0 or 1");
  }
  if (default_odd > 1) throw ConfigError("walk default label must be 0 or 1");
  if (!predicate.empty() && predicate != "pow2plus1") throw ConfigError("unknown walk predicate '" + predicate + "'");
}

nlohmann::json WalkChainLabeling::to_json() const {
  nlohmann::json table = nlohmann::json::object();
  for (const auto& [s, b] : odd_table) table[std::to_string(s)] = b;
  return {{"odd_labels", table}, {"default_odd", default_odd}, {"predicate", predicate}};
}

WalkChainLabeling WalkChainLabeling::from_json(const nlohmann::json& j) {
  WalkChainLabeling l;
  if (j.contains("odd_labels")) {
    for (const auto& [k, v] : j.at("odd_labels").items()) l.odd_table[std::stoull(k)] = v.get<Bit>();
  }
  l.default_odd = j.value("default_odd", Bit{0});
  l.predicate = j.value("predicate", std::string{});
  l.validate();
  return l;
}

WalkChainProcess::WalkChainProcess(WalkChainLabeling labeling, int truncation)
    : labeling_(std::move(labeling)), truncation_(truncation) {
  labeling_.validate();
  if (truncation_ < 4 || truncation_ > 62) throw RangeError("walk truncation must be in [4, 62]");
  const std::size_t states = static_cast<std::size_t>(truncation_) + 1;
  truncated_.initial.resize(states);
  truncated_.rows.resize(states);
  truncated_.label.resize(states);
  for (std::size_t s = 0; s < states; ++s) {
    truncated_.initial[s] = stationary_mass(s);
    truncated_.label[s] = labeling_(s);
    if (s <= 1) {
      truncated_.rows[s].emplace_back(static_cast<std::uint32_t>(s + 1), 1.0);
    } else {
      truncated_.rows[s].emplace_back(0U, 0.5);
      if (s + 1 < states) truncated_.rows[s].emplace_back(static_cast<std::uint32_t>(s + 1), 0.5);
    }
  }
}

double WalkChainProcess::stationary_mass(std::uint64_t state) {
  if (state <= 1) return 0.25;
  if (state > 1000) return 0.0;
  return std::ldexp(1.0, -static_cast<int>(state));
}

std::uint64_t WalkChainProcess::draw_stationary(Rng& rng) {
  const double u = rng.uniform();
  if (u < 0.25) return 0;
  if (u < 0.5) return 1;
  // Given state >= 2, the state is 2 + Geometric(1/2).
  std::uint64_t s = 2;
  while (rng.bernoulli(0.5)) ++s;
  return s;
}

FiniteDistribution WalkChainProcess::dims(int n) const {
  return labeled_chain_dims(truncated_, n, static_cast<double>(n) * std::ldexp(1.0, -truncation_));
}

TracedPath WalkChainProcess::sample_traced(std::size_t length, std::uint64_t seed) const {
  Rng rng(seed);
  TracedPath out;
  out.states.reserve(length);
  out.symbols.reserve(length);
  std::uint64_t s = draw_stationary(rng);
  for (std::size_t i = 0; i < length; ++i) {
    out.states.push_back(s);
    out.symbols.push_back(labeling_(s));
    if (s <= 1) {
      ++s;
    } else {
      s = rng.bernoulli(0.5) ? 0 : s + 1;
    }
  }
  return out;
}

Word WalkChainProcess::sample(std::size_t length, std::uint64_t seed) const {
  return sample_traced(length, seed).symbols;
}

nlohmann::json WalkChainProcess::describe() const { return {{"name", "walk"}, {"labeling", labeling_.to_json()}}; }

ProcessHandle walk_chain_process(WalkChainLabeling labeling) {
  return std::make_shared<WalkChainProcess>(std::move(labeling));
}

// ---------------------------------------------------------------------------

namespace {

std::vector<double> cumulative(const std::vector<double>& p) {
  std::vector<double> cdf(p.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) cdf[i] = acc += p[i];
  return cdf;
}

}  // namespace

StateIndicatorProcess::StateIndicatorProcess(std::vector<std::vector<double>> transitions, std::size_t state)
    : transitions_(std::move(transitions)), state_(state) {
  const SparseChain sc = dense_chain(transitions_);
  if (state_ >= transitions_.size()) throw RangeError("indicator state out of range");
  stationary_ = solve_stationary(sc);
  if (!(stationary_[state_] > 0.0)) {
    throw RangeError("state " + std::to_string(state_) + " has zero stationary mass");
  }
  stationary_cdf_ = cumulative(stationary_);
  for (const auto& row : transitions_) row_cdf_.push_back(cumulative(row));
  chain_.initial = stationary_;
  chain_.rows = sc.rows;
  chain_.label.resize(transitions_.size());
  for (std::size_t s = 0; s < transitions_.size(); ++s) chain_.label[s] = s == state_ ? 1 : 0;
}

FiniteDistribution StateIndicatorProcess::dims(int n) const { return labeled_chain_dims(chain_, n, 0.0); }

Word StateIndicatorProcess::sample(std::size_t length, std::uint64_t seed) const {
  Rng rng(seed);
  std::vector<Bit> bits;
  bits.reserve(length);
  std::size_t s = sample_cdf(stationary_cdf_, rng.uniform());
  for (std::size_t i = 0; i < length; ++i) {
    bits.push_back(s == state_ ? 1 : 0);
    s = sample_cdf(row_cdf_[s], rng.uniform());
  }
  return Word(std::move(bits));
}

nlohmann::json StateIndicatorProcess::describe() const {
  return {{"name", "indicator"}, {"transitions", transitions_}, {"state", state_}};
}

ProcessHandle state_indicator_process(std::vector<std::vector<double>> transitions, std::size_t state) {
  return std::make_shared<StateIndicatorProcess>(std::move(transitions), state);
}

std::vector<std::vector<double>> parity_chain() {
  return {{0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}, {0.5, 0.5, 0.0}};
}

ProcessHandle parity_indicator() { return state_indicator_process(parity_chain(), 0); }

// ---------------------------------------------------------------------------

double RenewalSpec::prob(std::uint64_t t) const {
  if (t == 0) return 0.0;
  const std::uint64_t len = table.size();
  if (t <= len) return table[t - 1];
  return tail_mass * (1.0 - tail_ratio) * std::pow(tail_ratio, static_cast<double>(t - len - 1));
}

double RenewalSpec::survival(std::uint64_t d) const {
  const std::uint64_t len = table.size();
  if (d >= len) return tail_mass * std::pow(tail_ratio, static_cast<double>(d - len));
  double s = tail_mass;
  for (std::uint64_t t = d + 1; t <= len; ++t) s += table[t - 1];
  return s;
}

double RenewalSpec::mean() const {
  double m = 0.0;
  for (std::uint64_t d = 0; d < table.size(); ++d) m += survival(d);
  if (tail_mass > 0.0) {
    if (!(tail_ratio < 1.0)) return INFINITY;
    m += tail_mass / (1.0 - tail_ratio);
  }
  return m;
}

void RenewalSpec::validate() const {
  double s = tail_mass;
  for (double p : table) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("inter-arrival probability outside [0,1]");
    s += p;
  }
  if (!(tail_mass >= 0.0)) throw ConfigError("tail mass must be >= 0");
  if (std::abs(s - 1.0) > 1e-9) throw ConfigError("inter-arrival masses sum to " + std::to_string(s));
  if (tail_mass > 0.0 && !(tail_ratio >= 0.0 && tail_ratio < 1.0)) {
    throw ConfigError("inter-arrival mean is infinite: tail ratio must lie in [0,1)");
  }
  if (!std::isfinite(mean())) throw ConfigError("inter-arrival mean is infinite");
}

nlohmann::json RenewalSpec::to_json() const {
  return {{"table", table}, {"tail", {{"mass", tail_mass}, {"ratio", tail_ratio}}}};
}

RenewalSpec RenewalSpec::from_json(const nlohmann::json& j) {
  RenewalSpec s;
  s.table = j.value("table", std::vector<double>{});
  if (j.contains("tail")) {
    s.tail_mass = j.at("tail").value("mass", 0.0);
    s.tail_ratio = j.at("tail").value("ratio", 0.0);
  }
  s.validate();
  return s;
}

RenewalProcess::RenewalProcess(RenewalSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  mean_ = spec_.mean();
  // Hidden state D = steps until the next arrival; X = 1 iff D = 0.
  // Stationary law P(D = d) = P(T > d) / mean.
  const std::uint64_t len = spec_.table.size();
  if (spec_.tail_mass == 0.0) {
    std::uint64_t last = len;
    while (last > 1 && spec_.table[last - 1] == 0.0) --last;
    max_distance_ = last - 1;
    tail_stationary_ = 0.0;
  } else {
    max_distance_ = std::max<std::uint64_t>(len, 1);
    auto beyond = [&](std::uint64_t dmax) {
      return spec_.tail_mass * std::pow(spec_.tail_ratio, static_cast<double>(dmax + 1 - len)) /
             ((1.0 - spec_.tail_ratio) * mean_);
    };
    while (beyond(max_distance_) > 1e-17 && max_distance_ < len + 4096) ++max_distance_;
    tail_stationary_ = spec_.tail_ratio == 0.0 ? 0.0 : beyond(max_distance_);
  }
  const std::size_t states = static_cast<std::size_t>(max_distance_) + 1;
  chain_.initial.resize(states);
  chain_.rows.resize(states);
  chain_.label.assign(states, 0);
  chain_.label[0] = 1;
  std::vector<double> dist(states), arrival(states);
  for (std::size_t d = 0; d < states; ++d) {
    dist[d] = spec_.survival(d) / mean_;
    chain_.initial[d] = dist[d];
    arrival[d] = spec_.prob(d + 1);
    if (d > 0) chain_.rows[d].emplace_back(static_cast<std::uint32_t>(d - 1), 1.0);
    if (arrival[d] > 0.0) chain_.rows[0].emplace_back(static_cast<std::uint32_t>(d), arrival[d]);
  }
  distance_cdf_ = cumulative(dist);
  inter_arrival_cdf_ = cumulative(arrival);
}

std::uint64_t RenewalProcess::draw_inter_arrival(Rng& rng) const {
  const double u = rng.uniform();
  if (u < inter_arrival_cdf_.back() || spec_.tail_mass == 0.0) {
    return sample_cdf(inter_arrival_cdf_, u) + 1;
  }
  // Beyond the enumerated range the law is geometric with ratio tail_ratio.
  const std::uint64_t base = max_distance_ + 2;
  if (spec_.tail_ratio == 0.0) return base;
  const double v = rng.uniform();
  return base + static_cast<std::uint64_t>(std::floor(std::log1p(-v) / std::log(spec_.tail_ratio)));
}

std::uint64_t RenewalProcess::draw_initial_distance(Rng& rng) const {
  const double u = rng.uniform();
  if (u < distance_cdf_.back() || tail_stationary_ == 0.0) return sample_cdf(distance_cdf_, u);
  const double v = rng.uniform();
  return max_distance_ + 1 + static_cast<std::uint64_t>(std::floor(std::log1p(-v) / std::log(spec_.tail_ratio)));
}

FiniteDistribution RenewalProcess::dims(int n) const {
  return labeled_chain_dims(chain_, n, static_cast<double>(n) * tail_stationary_);
}

Word RenewalProcess::sample(std::size_t length, std::uint64_t seed) const {
  Rng rng(seed);
  std::vector<Bit> bits;
  bits.reserve(length);
  std::uint64_t d = draw_initial_distance(rng);
  for (std::size_t i = 0; i < length; ++i) {
    bits.push_back(d == 0 ? 1 : 0);
    d = d == 0 ? draw_inter_arrival(rng) - 1 : d - 1;
  }
  return Word(std::move(bits));
}

ProcessHandle renewal_process(RenewalSpec spec) { return std::make_shared<RenewalProcess>(std::move(spec)); }

// ---------------------------------------------------------------------------

MarkovWitness markov_violation(const ProcessHandle& handle, int order, int depth) {
  MarkovWitness best;
  const FiniteDistribution short_law = handle->dims(order + 1);
  for (int extra = 1; extra <= depth; ++extra) {
    const int len = order + extra;
    const FiniteDistribution law = handle->dims(len + 1);
    const std::uint64_t ctx_mask = (std::uint64_t{1} << order) - 1;
    for (std::uint64_t x = 0; x < (std::uint64_t{1} << len); ++x) {
      const double mass = law[x << 1] + law[(x << 1) | 1U];
      if (mass <= 1e-14) continue;
      const std::uint64_t c = order == 0 ? 0 : (x & ctx_mask);
      const double short_mass = short_law[c << 1] + short_law[(c << 1) | 1U];
      const double p_long = law[(x << 1) | 1U] / mass;
      const double p_short = short_law[(c << 1) | 1U] / short_mass;
      const double gap = std::abs(p_long - p_short);
      if (gap > best.gap) {
        best = {block_string(x, len), order == 0 ? std::string() : block_string(c, order), gap};
      }
    }
  }
  return best;
}

}  // namespace ergolab

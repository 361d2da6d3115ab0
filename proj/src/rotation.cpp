#include "ergolab/rotation.hpp"

#include <algorithm>
#include <cmath>

#include "ergolab/errors.hpp"
#include "ergolab/rng.hpp"

namespace ergolab {

std::uint64_t to_circle(double x) {
  x -= std::floor(x);
  const auto v = static_cast<std::uint64_t>(std::llround(std::ldexp(x, kCircleBits)));
  return v % kCircle;
}

double from_circle(std::uint64_t x) { return std::ldexp(static_cast<double>(x), -kCircleBits); }

namespace {

std::uint64_t wrap(std::uint64_t x) { return x & (kCircle - 1); }

}  // namespace

IntervalSet IntervalSet::normalized(std::vector<Arc> arcs) {
  std::erase_if(arcs, [](const Arc& a) { return a.hi <= a.lo; });
  std::sort(arcs.begin(), arcs.end(), [](const Arc& a, const Arc& b) { return a.lo < b.lo; });
  IntervalSet out;
  for (const Arc& a : arcs) {
    if (!out.arcs_.empty() && a.lo <= out.arcs_.back().hi) {
      out.arcs_.back().hi = std::max(out.arcs_.back().hi, a.hi);
    } else {
      out.arcs_.push_back(a);
    }
  }
  return out;
}

IntervalSet IntervalSet::arc(std::uint64_t lo, std::uint64_t length) {
  if (length >= kCircle) return normalized({{0, kCircle}});
  lo = wrap(lo);
  const std::uint64_t end = lo + length;
  if (end <= kCircle) return normalized({{lo, end}});
  return normalized({{lo, kCircle}, {0, end - kCircle}});
}

IntervalSet IntervalSet::centered(std::uint64_t center, std::uint64_t radius) {
  return arc(wrap(center - radius), 2 * radius);
}

std::uint64_t IntervalSet::measure() const {
  std::uint64_t m = 0;
  for (const Arc& a : arcs_) m += a.hi - a.lo;
  return m;
}

bool IntervalSet::contains(std::uint64_t x) const {
  auto it = std::upper_bound(arcs_.begin(), arcs_.end(), x, [](std::uint64_t v, const Arc& a) { return v < a.lo; });
  if (it == arcs_.begin()) return false;
  return x < std::prev(it)->hi;
}

IntervalSet IntervalSet::rotate(std::uint64_t shift) const {
  std::vector<Arc> out;
  out.reserve(arcs_.size() + 1);
  shift = wrap(shift);
  for (const Arc& a : arcs_) {
    const std::uint64_t lo = a.lo + shift;
    const std::uint64_t hi = a.hi + shift;
    if (lo >= kCircle) {
      out.push_back({lo - kCircle, hi - kCircle});
    } else if (hi > kCircle) {
      out.push_back({lo, kCircle});
      out.push_back({0, hi - kCircle});
    } else {
      out.push_back({lo, hi});
    }
  }
  return normalized(std::move(out));
}

IntervalSet IntervalSet::dilate(std::uint64_t radius) const {
  std::vector<Arc> out;
  for (const Arc& a : arcs_) {
    for (const Arc& b : arc(wrap(a.lo - radius), a.hi - a.lo + 2 * radius).arcs_) out.push_back(b);
  }
  return normalized(std::move(out));
}

IntervalSet IntervalSet::unite(const IntervalSet& other) const {
  std::vector<Arc> all = arcs_;
  all.insert(all.end(), other.arcs_.begin(), other.arcs_.end());
  return normalized(std::move(all));
}

IntervalSet IntervalSet::intersect(const IntervalSet& other) const {
  IntervalSet out;
  std::size_t i = 0, j = 0;
  while (i < arcs_.size() && j < other.arcs_.size()) {
    const Arc& a = arcs_[i];
    const Arc& b = other.arcs_[j];
    const std::uint64_t lo = std::max(a.lo, b.lo);
    const std::uint64_t hi = std::min(a.hi, b.hi);
    if (lo < hi) out.arcs_.push_back({lo, hi});
    if (a.hi < b.hi) {
      ++i;
    } else {
      ++j;
    }
  }
  return out;
}

IntervalSet IntervalSet::complement() const {
  std::vector<Arc> out;
  std::uint64_t pos = 0;
  for (const Arc& a : arcs_) {
    if (a.lo > pos) out.push_back({pos, a.lo});
    pos = a.hi;
  }
  if (pos < kCircle) out.push_back({pos, kCircle});
  IntervalSet s;
  s.arcs_ = std::move(out);
  return s;
}

IntervalSet IntervalSet::subtract(const IntervalSet& other) const { return intersect(other.complement()); }

bool IntervalSet::first_gap(std::uint64_t& out) const {
  if (arcs_.empty() || arcs_.front().lo > 0) {
    out = 0;
    return true;
  }
  if (arcs_.front().hi < kCircle) {
    out = arcs_.front().hi;
    return true;
  }
  return false;
}

std::vector<std::uint64_t> IntervalSet::endpoints() const {
  std::vector<std::uint64_t> e;
  for (const Arc& a : arcs_) {
    e.push_back(a.lo);
    e.push_back(wrap(a.hi));
  }
  std::sort(e.begin(), e.end());
  e.erase(std::unique(e.begin(), e.end()), e.end());
  return e;
}

// ---------------------------------------------------------------------------

double RotationParams::delta(int n) const { return delta_1 * std::pow(decay, -(n - 1)); }

double RotationParams::tail_ratio() const {
  double worst = 0.0;
  for (int n = 1; n < n_max; ++n) {
    double s = 0.0;
    for (int m = n + 1; m <= n_max; ++m) s += m * delta(m);
    worst = std::max(worst, s / delta(n));
  }
  return worst;
}

void RotationParams::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("rotation alpha must lie in (0,1)");
  if (n_max < 1 || n_max > 256) throw ConfigError("rotation n_max must lie in [1, 256]");
  if (!(delta_1 > 0.0 && delta_1 < 0.25)) throw ConfigError("rotation delta_1 must lie in (0, 0.25)");
  if (!(decay > 1.0)) throw ConfigError("rotation decay must exceed 1");
  if (step_budget == 0) throw ConfigError("rotation step budget must be positive");
}

nlohmann::json RotationParams::to_json() const {
  return {{"alpha", alpha}, {"n_max", n_max}, {"delta_1", delta_1}, {"decay", decay}, {"step_budget", step_budget}};
}

RotationParams RotationParams::from_json(const nlohmann::json& j) {
  RotationParams p;
  p.alpha = j.value("alpha", p.alpha);
  p.n_max = j.value("n_max", p.n_max);
  p.delta_1 = j.value("delta_1", p.delta_1);
  p.decay = j.value("decay", p.decay);
  p.step_budget = j.value("step_budget", p.step_budget);
  p.validate();
  return p;
}

std::string enumerated_word(std::uint64_t k) {
  if (k == 0) throw RangeError("word enumeration starts at 1");
  int len = 1;
  while (k > (std::uint64_t{1} << (len + 1)) - 2) ++len;
  return block_string(k - ((std::uint64_t{1} << len) - 1), len);
}

nlohmann::json RotationConstruction::summary() const {
  nlohmann::json masses = nlohmann::json::array();
  for (std::size_t k = 0; k < returns.size() && k < 64; ++k) masses.push_back(from_circle(returns[k].measure()));
  return {{"params", params.to_json()},
          {"realized_depth", realized_depth},
          {"max_return_time", returns.size()},
          {"base_measure", from_circle(base.measure())},
          {"return_set_measures", masses},
          {"ones_measure", from_circle(ones.measure())},
          {"ones_arcs", ones.arcs().size()},
          {"kac_total", static_cast<double>(kac_total) / static_cast<double>(kCircle)},
          {"tail_ratio", params.tail_ratio()}};
}

namespace {

std::uint64_t circle_distance(std::uint64_t x) {
  x = wrap(x);
  return std::min(x, kCircle - x);
}

}  // namespace

RotationConstruction build_rotation(const RotationParams& params) {
  params.validate();
  RotationConstruction c;
  c.params = params;
  c.alpha = to_circle(params.alpha) | 1U;  // odd step: the orbit of every grid point is the whole grid
  const std::uint64_t a = c.alpha;

  IntervalSet mids;  // intermediate levels T^i I_m, 1 <= i < m, of earlier n
  IntervalSet ends;  // I_m and T^m I_m of earlier n
  std::vector<IntervalSet> pieces, levels;
  for (int n = 1; n <= params.n_max; ++n) {
    const std::uint64_t r = to_circle(params.delta(n));
    if (r == 0) throw ConstructionError("interval radius underflows at n = " + std::to_string(n));
    for (int d = 1; d <= n; ++d) {
      if (circle_distance(static_cast<std::uint64_t>(d) * a) < 2 * r) {
        throw ConstructionError("tower of I_" + std::to_string(n) + " overlaps itself after " + std::to_string(d) +
                                " steps; reduce delta_1");
      }
    }
    const IntervalSet mids_r = mids.dilate(r);
    IntervalSet forbidden = mids_r.unite(mids_r.rotate(kCircle - wrap(n * a)));
    const IntervalSet ends_r = ends.dilate(r);
    for (int i = 1; i < n; ++i) forbidden = forbidden.unite(ends_r.rotate(kCircle - wrap(i * a)));
    std::uint64_t x = 0;
    if (!forbidden.first_gap(x)) {
      throw ConstructionError("no admissible centre for I_" + std::to_string(n) + " (placed " + std::to_string(n - 1) +
                              " intervals); reduce delta_1 or n_max");
    }
    const IntervalSet interval = IntervalSet::centered(x, r);
    IntervalSet own_levels;
    for (int i = 1; i < n; ++i) own_levels = own_levels.unite(interval.rotate(wrap(i * a)));
    const IntervalSet piece = interval.unite(interval.rotate(wrap(n * a)));
    c.centers.push_back(x);
    c.radii.push_back(r);
    pieces.push_back(piece);
    levels.push_back(own_levels);
    mids = mids.unite(own_levels);
    ends = ends.unite(piece);
  }

  // A = union over n of the piece minus intermediate levels of later n.
  IntervalSet later;
  for (int n = params.n_max; n >= 1; --n) {
    c.base = c.base.unite(pieces[n - 1].subtract(later));
    later = later.unite(levels[n - 1]);
  }

  IntervalSet pending = c.base;
  for (std::size_t j = 1; !pending.empty(); ++j) {
    if (j > params.step_budget) throw BudgetError("return-time decomposition exceeded the step budget", 0.0);
    pending = pending.rotate(a);
    const IntervalSet hit = pending.intersect(c.base);
    c.returns.push_back(hit.rotate(kCircle - wrap(j * a)));
    c.kac_total += j * hit.measure();
    pending = pending.subtract(hit);
  }
  if (c.kac_total != kCircle) throw ConstructionError("return-time towers do not tile the circle");
  while (c.realized_depth < static_cast<int>(c.returns.size()) && c.returns[c.realized_depth].measure() > 0) {
    ++c.realized_depth;
  }

  for (std::size_t k = 1; k <= c.returns.size(); ++k) {
    if (c.returns[k - 1].empty()) continue;
    const std::string w = enumerated_word(k);
    for (std::size_t i = 0; i < w.size() && i < k; ++i) {
      if (w[i] == '1') c.ones = c.ones.unite(c.returns[k - 1].rotate(wrap(i * a)));
    }
  }
  return c;
}

RotationProcess::RotationProcess(RotationParams params) : construction_(build_rotation(params)) {}

FiniteDistribution RotationProcess::dims(int n) const {
  if (n < 0 || n > kDefaultBlockCap) throw RangeError("block length outside [0, " + std::to_string(kDefaultBlockCap) + "]");
  {
    std::lock_guard lock(cache_mutex_);
    if (auto it = cache_.find(n); it != cache_.end()) return it->second;
  }
  const IntervalSet& ones = construction_.ones;
  const std::uint64_t a = construction_.alpha;
  const std::vector<std::uint64_t> ends = ones.endpoints();
  std::vector<std::uint64_t> cuts{0};
  for (int j = 0; j < n; ++j) {
    for (std::uint64_t e : ends) cuts.push_back(wrap(e - static_cast<std::uint64_t>(j) * a));
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<double> probs(std::size_t{1} << n, 0.0);
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    const std::uint64_t next = i + 1 < cuts.size() ? cuts[i + 1] : kCircle;
    std::uint64_t index = 0;
    std::uint64_t x = cuts[i];
    for (int j = 0; j < n; ++j) {
      index = (index << 1) | (ones.contains(x) ? 1U : 0U);
      x = wrap(x + a);
    }
    probs[index] += from_circle(next - cuts[i]);
  }
  // Distance to the ideal rotation by alpha: each endpoint crossing moves at
  // most j |alpha - a/2^62| of mass in step j.
  const double drift = std::ldexp(1.0, -kCircleBits) * 2.0;
  const double bound = 2.0 * static_cast<double>(ends.size()) * n * n * drift;
  FiniteDistribution d(n, std::move(probs), bound);
  std::lock_guard lock(cache_mutex_);
  cache_.emplace(n, d);
  return d;
}

Word RotationProcess::sample(std::size_t length, std::uint64_t seed) const {
  Rng rng(seed);
  const IntervalSet& ones = construction_.ones;
  std::uint64_t x = rng.next() & (kCircle - 1);
  std::vector<Bit> bits;
  bits.reserve(length);
  for (std::size_t i = 0; i < length; ++i) {
    bits.push_back(ones.contains(x) ? 1 : 0);
    x = wrap(x + construction_.alpha);
  }
  return Word(std::move(bits));
}

nlohmann::json RotationProcess::describe() const {
  return {{"name", "rotation"}, {"params", construction_.params.to_json()}};
}

ProcessHandle rotation_process(RotationParams params) { return std::make_shared<RotationProcess>(params); }

}  // namespace ergolab

#include "ergolab/splice.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "ergolab/errors.hpp"
#include "ergolab/rng.hpp"

namespace ergolab {

namespace {

std::vector<int> prefix_function(const std::vector<int>& s) {
  std::vector<int> pi(s.size(), 0);
  for (std::size_t i = 1; i < s.size(); ++i) {
    int k = pi[i - 1];
    while (k > 0 && s[i] != s[k]) k = pi[k - 1];
    if (s[i] == s[k]) ++k;
    pi[i] = k;
  }
  return pi;
}

std::vector<std::size_t> occurrences(const Word& needle, std::span<const Bit> hay) {
  std::vector<std::size_t> out;
  const auto bits = needle.bits();
  if (bits.empty() || hay.size() < bits.size()) return out;
  const std::boyer_moore_horspool_searcher searcher(bits.begin(), bits.end());
  auto it = hay.begin();
  while (true) {
    auto found = std::search(it, hay.end(), searcher);
    if (found == hay.end()) break;
    out.push_back(static_cast<std::size_t>(found - hay.begin()));
    it = found + 1;
  }
  return out;
}

}  // namespace

std::size_t minimal_word_length(int N, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw RangeError("delta must lie in (0,1)");
  std::size_t r = 2;
  while (r < static_cast<std::size_t>(N) ||
         static_cast<double>(sync_length(r) + N) / static_cast<double>(sync_length(r) + r + 1) >= delta / 4.0) {
    r *= 2;
  }
  return r;
}

double block_discrepancy(const Word& w, const FiniteDistribution& target) {
  const int n = target.block_length();
  if (w.size() < static_cast<std::size_t>(n) || n == 0) return 1.0;
  std::vector<double> counts(target.size(), 0.0);
  const std::uint64_t mask = (std::uint64_t{1} << n) - 1;
  std::uint64_t idx = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    idx = ((idx << 1) | w[i]) & mask;
    if (i + 1 >= static_cast<std::size_t>(n)) counts[idx] += 1.0;
  }
  const double windows = static_cast<double>(w.size() - n + 1);
  double worst = 0.0;
  for (std::size_t b = 0; b < counts.size(); ++b) worst = std::max(worst, std::abs(counts[b] / windows - target[b]));
  return worst;
}

TypicalWord find_typical_word(const ProcessHandle& handle, int N, double delta, const TypicalSearch& search) {
  if (N < 1) throw RangeError("block length must be positive");
  const FiniteDistribution target = handle->dims(N);
  const double tol = delta / std::ldexp(1.0, N + 1);
  std::size_t r = search.r_start ? search.r_start : minimal_word_length(N, delta);
  TypicalWord best;
  best.achieved_discrepancy = INFINITY;
  best.tolerance = tol;
  std::uint64_t stream = 0;
  for (; r <= search.r_max; r *= 2) {
    for (int a = 0; a < search.samples_per_length; ++a) {
      const std::uint64_t seed = derive_seed(search.seed, stream++);
      Word w = sample_path(handle, r, seed);
      const double disc = block_discrepancy(w, target);
      if (disc < best.achieved_discrepancy) {
        best.w = std::move(w);
        best.achieved_discrepancy = disc;
        best.seed = seed;
      }
      best.attempts = stream;
      if (best.achieved_discrepancy < tol) return best;
    }
  }
  throw BudgetError("no typical word of length <= " + std::to_string(search.r_max) + " met discrepancy " +
                        std::to_string(tol) + " (best " + std::to_string(best.achieved_discrepancy) + ")",
                    best.achieved_discrepancy);
}

// ---------------------------------------------------------------------------

int sync_length(std::size_t r) {
  if (r < 2) throw RangeError("typical word must have length >= 2");
  return static_cast<int>(std::ceil(10.0 * std::log2(static_cast<double>(r)) - 1e-12));
}

bool sync_counting_bound(std::size_t r, int m) {
  // log2(r + 4m 2^(3m/5)) < m
  const double a = std::log2(static_cast<double>(r));
  const double b = std::log2(4.0 * m) + 0.6 * m;
  const double hi = std::max(a, b);
  return hi + std::log2(1.0 + std::exp2(std::min(a, b) - hi)) < m;
}

int longest_border(const Word& u) {
  if (u.empty()) return 0;
  std::vector<int> s(u.bits().begin(), u.bits().end());
  return prefix_function(s).back();
}

int longest_overlap(const Word& a, const Word& b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<int> s(b.bits().begin(), b.bits().end());
  s.push_back(2);
  s.insert(s.end(), a.bits().begin(), a.bits().end());
  return prefix_function(s).back();
}

bool occurs_in(const Word& needle, const Word& haystack) { return !occurrences(needle, haystack.bits()).empty(); }

namespace {

bool planted_only(const Word& u, const Word& w) {
  const std::size_t period = u.size() + w.size() + 1;
  for (Bit z : {Bit{0}, Bit{1}}) {
    Word text = u;
    text.append(w);
    text.push_back(z);
    text.append(u);
    text.append(w);
    const auto at = occurrences(u, text.bits());
    if (at != std::vector<std::size_t>{0, period}) return false;
  }
  return true;
}

bool admissible(const Word& u, const Word& w) {
  const int m = static_cast<int>(u.size());
  if (5 * longest_border(u) > 2 * m) return false;
  if (5 * longest_overlap(u, w) > 2 * m) return false;
  if (5 * longest_overlap(w, u) > 2 * m) return false;
  if (occurs_in(u, w)) return false;
  return planted_only(u, w);
}

// Suffix of w of length t equals the first t bits of prefix.
bool suffix_matches(const Word& w, const std::vector<Bit>& prefix, std::size_t t) {
  if (t > w.size()) return false;
  const std::size_t off = w.size() - t;
  for (std::size_t i = 0; i < t; ++i) {
    if (w[off + i] != prefix[i]) return false;
  }
  return true;
}

// Lexicographic depth-first search; prefixes already matching a long suffix
// of w are cut.
struct SyncSearch {
  const Word& w;
  int m;
  std::size_t budget;
  std::size_t tried = 0;
  std::vector<Bit> bits;

  bool descend(int depth) {
    if (depth > 0 && 5 * depth > 2 * m && suffix_matches(w, bits, depth)) return false;
    if (depth == m) {
      ++tried;
      return admissible(Word(bits), w);
    }
    for (Bit b : {Bit{0}, Bit{1}}) {
      if (tried >= budget) return false;
      bits[depth] = b;
      if (descend(depth + 1)) return true;
    }
    return false;
  }
};

}  // namespace

SyncWord find_sync_word(const Word& w) {
  SyncWord out;
  out.m_formula = sync_length(w.size());
  out.counting_bound = sync_counting_bound(w.size(), out.m_formula);
  constexpr std::size_t kTriesPerLength = std::size_t{1} << 16;
  for (int m = out.m_formula; m <= out.m_formula + 64; ++m) {
    SyncSearch search{w, m, kTriesPerLength, 0, std::vector<Bit>(m, 0)};
    const bool found = search.descend(0);
    out.candidates_tried += search.tried;
    if (found) {
      out.u = Word(search.bits);
      return out;
    }
  }
  throw ConstructionError("no synchronizing word found for r = " + std::to_string(w.size()));
}

// ---------------------------------------------------------------------------

namespace {

std::vector<Bit> period_pattern(const Word& u, const Word& w) {
  std::vector<Bit> p(1 + u.size() + w.size(), 0);
  for (std::size_t i = 0; i < u.size(); ++i) p[1 + i] = u[i];
  for (std::size_t i = 0; i < w.size(); ++i) p[1 + u.size() + i] = w[i];
  return p;
}

}  // namespace

SplicedProcess::SplicedProcess(ProcessHandle z, Word w, Word u)
    : z_(std::move(z)), w_(std::move(w)), u_(std::move(u)), pattern_(period_pattern(u_, w_)) {
  if (!z_) throw ConfigError("spliced process needs a Z process");
  if (w_.empty() || u_.empty()) throw ConfigError("spliced process needs non-empty w and u");
}

FiniteDistribution SplicedProcess::dims(int n) const {
  if (n < 0 || n > kDefaultBlockCap) throw RangeError("block length outside [0, " + std::to_string(kDefaultBlockCap) + "]");
  if (n == 0) return FiniteDistribution();
  const std::size_t P = pattern_.size();
  const double weight = 1.0 / static_cast<double>(P);
  std::vector<double> probs(std::size_t{1} << n, 0.0);
  const std::uint64_t mask = (std::uint64_t{1} << n) - 1;

  // Windows inside [1, P-1] see no Z-slot: slide over the fixed part.
  std::vector<bool> fixed_phase(P, false);
  if (static_cast<std::size_t>(n) < P) {
    std::uint64_t idx = 0;
    for (std::size_t j = 1; j < P; ++j) {
      idx = ((idx << 1) | pattern_[j]) & mask;
      if (j >= static_cast<std::size_t>(n)) {
        probs[idx] += weight;
        fixed_phase[j - n + 1] = true;
      }
    }
  }

  std::map<int, FiniteDistribution> zlaw;
  double error = 0.0;
  for (std::size_t theta = 0; theta < P; ++theta) {
    if (fixed_phase[theta]) continue;
    std::vector<int> slots;
    for (int t = 0; t < n; ++t) {
      if ((theta + t) % P == 0) slots.push_back(t);
    }
    const int q = static_cast<int>(slots.size());
    auto it = zlaw.find(q);
    if (it == zlaw.end()) it = zlaw.emplace(q, z_->dims(q)).first;
    const FiniteDistribution& zd = it->second;
    error += weight * zd.error_bound();
    std::uint64_t base = 0;
    for (int t = 0; t < n; ++t) base = (base << 1) | pattern_[(theta + t) % P];
    for (std::uint64_t v = 0; v < zd.size(); ++v) {
      if (zd[v] == 0.0) continue;
      std::uint64_t idx = base;
      for (int s = 0; s < q; ++s) {
        const std::uint64_t bit = (v >> (q - 1 - s)) & 1U;
        const int pos = n - 1 - slots[s];
        idx = (idx & ~(std::uint64_t{1} << pos)) | (bit << pos);
      }
      probs[idx] += weight * zd[v];
    }
  }
  return FiniteDistribution(n, std::move(probs), error);
}

SplicedProcess::Trace SplicedProcess::sample_with_truth(std::size_t length, std::uint64_t seed) const {
  const std::size_t P = pattern_.size();
  Rng rng(seed);
  Trace out;
  out.zeta = static_cast<std::size_t>(rng.below(P));
  if (length == 0) return out;
  const std::size_t last_slot = (out.zeta + length - 1) / P;
  const Word z = z_->sample(last_slot + 1, derive_seed(seed, 1));
  out.y.reserve(length);
  for (std::size_t i = 0; i < length; ++i) {
    const std::size_t j = out.zeta + i;
    const std::size_t ph = j % P;
    if (ph == 0) {
      out.y.push_back(z[j / P]);
      out.z.push_back(z[j / P]);
    } else {
      out.y.push_back(pattern_[ph]);
    }
  }
  return out;
}

Word SplicedProcess::sample(std::size_t length, std::uint64_t seed) const { return sample_with_truth(length, seed).y; }

double SplicedProcess::overhead_fraction(int N) const {
  const double P = static_cast<double>(pattern_.size());
  return std::min(1.0, (static_cast<double>(u_.size()) + N) / P);
}

nlohmann::json SplicedProcess::describe() const {
  return {{"name", "spliced"}, {"z", z_->describe()}, {"w", w_.to_string()}, {"u", u_.to_string()}};
}

nlohmann::json SpliceResult::to_json() const {
  return {{"schema", "ergolab.spliced/1"},
          {"process", handle->describe()},
          {"N", N},
          {"delta", delta},
          {"r", typical.r()},
          {"m", sync.m()},
          {"period", handle->period()},
          {"typical", {{"achieved_discrepancy", typical.achieved_discrepancy},
                       {"tolerance", typical.tolerance},
                       {"seed", typical.seed},
                       {"attempts", typical.attempts}}},
          {"sync", {{"m_formula", sync.m_formula},
                    {"counting_bound", sync.counting_bound},
                    {"candidates_tried", sync.candidates_tried}}},
          {"verification", {{"tv", tv},
                            {"tv_error", tv_error},
                            {"holds", tv < delta},
                            {"overhead_fraction", handle->overhead_fraction(N)}}}};
}

SpliceResult splice(const ProcessHandle& z, const ProcessHandle& source, const TypicalWord& w, const SyncWord& u, int N,
                    double delta) {
  if (z->tag().kind != ProcessKind::NonFinitarilyMarkovian) {
    throw ConfigError("Z process must be tagged non_finitarily_markovian (got " + z->tag().to_string() + ")");
  }
  if (!admissible(u.u, w.w)) throw ConstructionError("sync word fails the synchronization checks for this w");
  SpliceResult out;
  out.handle = std::make_shared<SplicedProcess>(z, w.w, u.u);
  out.typical = w;
  out.sync = u;
  out.N = N;
  out.delta = delta;
  const FiniteDistribution y = out.handle->dims(N);
  const FiniteDistribution x = source->dims(N);
  out.tv = tv_block_distance(y, x);
  out.tv_error = y.error_bound() + x.error_bound();
  if (!(out.tv < delta)) {
    throw ConstructionError("N-block distance " + std::to_string(out.tv) + " is not below delta " +
                            std::to_string(delta) + "; use a longer typical word");
  }
  return out;
}

SpliceResult splice_source(const ProcessHandle& z, const ProcessHandle& source, int N, double delta,
                           const TypicalSearch& search) {
  const TypicalWord w = find_typical_word(source, N, delta, search);
  const SyncWord u = find_sync_word(w.w);
  return splice(z, source, w, u, N, delta);
}

Word decode_z(const Word& y, const Word& u, const Word& w) {
  const std::vector<Bit> pattern = period_pattern(u, w);
  const std::size_t P = pattern.size();
  if (y.size() < 2 * P) throw DecodeError("path shorter than two periods");
  const auto at = occurrences(u, y.bits());
  if (at.empty()) throw DecodeError("sync word does not occur");
  const std::size_t phase = (at.front() + P - 1) % P;
  std::size_t expected = 0;
  for (std::size_t s = (phase + 1) % P; s + u.size() <= y.size(); s += P) ++expected;
  if (at.size() != expected) throw DecodeError("sync word occurs off the period grid");
  Word z;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const std::size_t ph = (i + P - phase) % P;
    if (ph == 0) {
      z.push_back(y[i]);
    } else if (y[i] != pattern[ph]) {
      throw DecodeError("path disagrees with the planted block at position " + std::to_string(i));
    }
  }
  return z;
}

}  // namespace ergolab

#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include <json.hpp>

#include "ergolab/process.hpp"

namespace ergolab {

struct TypicalWord {
  Word w;
  double achieved_discrepancy = 0.0;  // max over N-blocks of |sliding rate - target|
  double tolerance = 0.0;             // delta / 2^(N+1)
  std::uint64_t seed = 0;
  std::size_t attempts = 0;

  std::size_t r() const { return w.size(); }
};

struct TypicalSearch {
  std::size_t r_start = 0;  // 0: smallest power of two meeting the overhead condition
  std::size_t r_max = std::size_t{1} << 22;
  int samples_per_length = 4;
  std::uint64_t seed = 0;
};

/// Smallest r with (m(r) + N) / (m(r) + r + 1) < delta / 4.
std::size_t minimal_word_length(int N, double delta);

/// Sliding N-block rates of w against target; max absolute difference.
double block_discrepancy(const Word& w, const FiniteDistribution& target);

TypicalWord find_typical_word(const ProcessHandle& handle, int N, double delta, const TypicalSearch& search = {});

struct SyncWord {
  Word u;
  int m_formula = 0;             // ceil(10 log2 r)
  bool counting_bound = false;   // r + 4m 2^(3m/5) < 2^m at m_formula
  std::size_t candidates_tried = 0;

  int m() const { return static_cast<int>(u.size()); }
};

int sync_length(std::size_t r);
bool sync_counting_bound(std::size_t r, int m);

/// Longest proper border of u.
int longest_border(const Word& u);
/// Longest suffix of a that is a prefix of b.
int longest_overlap(const Word& a, const Word& b);
bool occurs_in(const Word& needle, const Word& haystack);

/// Lexicographically first u of length ceil(10 log2 r) that is absent from w,
/// has no border longer than 2m/5, has no cross-overlap with w longer than
/// 2m/5 in either direction, and occurs only at its planted place in
/// u w z u w for both z. m is increased if no such word exists.
SyncWord find_sync_word(const Word& w);

/// Y_n = W_{n + zeta}: W repeats the period (Z_k, u, w), zeta uniform on
/// {0, ..., m + r}.
class SplicedProcess final : public Process {
 public:
  SplicedProcess(ProcessHandle z, Word w, Word u);

  FiniteDistribution dims(int n) const override;
  Word sample(std::size_t length, std::uint64_t seed) const override;
  ProcessTag tag() const override { return ProcessTag::non_finitarily_markovian(); }
  std::string name() const override { return "spliced"; }
  nlohmann::json describe() const override;

  struct Trace {
    Word y;
    Word z;  // Z-symbols whose slots fall inside the path
    std::size_t zeta = 0;
  };
  Trace sample_with_truth(std::size_t length, std::uint64_t seed) const;

  std::size_t period() const { return pattern_.size(); }
  const Word& w() const { return w_; }
  const Word& u() const { return u_; }
  const ProcessHandle& z() const { return z_; }
  /// Fraction of N-windows not lying inside a planted w.
  double overhead_fraction(int N) const;

 private:
  ProcessHandle z_;
  Word w_;
  Word u_;
  std::vector<Bit> pattern_;  // one period, slot 0 left for Z
};

struct SpliceResult {
  std::shared_ptr<const SplicedProcess> handle;
  TypicalWord typical;
  SyncWord sync;
  int N = 0;
  double delta = 0.0;
  double tv = 0.0;  // L1 distance between N-block laws
  double tv_error = 0.0;

  nlohmann::json to_json() const;
};

/// Checks the N-block distance to the source and throws ConstructionError
/// when it is not below delta.
SpliceResult splice(const ProcessHandle& z, const ProcessHandle& source, const TypicalWord& w, const SyncWord& u, int N,
                    double delta);

/// Typical word, sync word and splice in one call.
SpliceResult splice_source(const ProcessHandle& z, const ProcessHandle& source, int N, double delta,
                           const TypicalSearch& search = {});

/// Recovers the embedded Z-symbols from a spliced path.
Word decode_z(const Word& y, const Word& u, const Word& w);

}  // namespace ergolab

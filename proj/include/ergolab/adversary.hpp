#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ergolab/classifiers.hpp"
#include "ergolab/metrics.hpp"
#include "ergolab/process.hpp"
#include "ergolab/splice.hpp"

namespace ergolab {

struct Schedules {
  int k_max = 4;
  std::size_t n_cap = std::size_t{1} << 20;
  std::size_t samples = 200;     // classifier calls per probability estimate
  std::size_t pairs = 200;       // path pairs per typicality check
  double confidence = 0.99;
  std::vector<double> epsilon_override;  // eps_k at index k-1; default 1/(k+1)
  std::vector<double> delta_override;    // delta_k at index k-1; default 0.2 2^-k
  TypicalSearch splice_search;

  double epsilon(int k) const;
  double delta(int k) const;
  /// sum_{i=k}^{k_max-1} delta_i
  double delta_tail(int k) const;
  void validate() const;

  nlohmann::json to_json() const;
  static Schedules from_json(const nlohmann::json& j);
};

struct ProbEstimate {
  double p_hat = 0.0;  // P(g_n = YES)
  double radius = 0.0;
  std::size_t samples = 0;
  std::size_t yes = 0;

  nlohmann::json to_json() const;
};

/// Two-sided Hoeffding radius sqrt(ln(2/(1-confidence)) / (2n)).
double two_sided_radius(std::size_t n, double confidence);

ProbEstimate estimate_verdict_prob(Classifier& c, const ProcessHandle& h, std::size_t n, std::size_t samples,
                                   double confidence, std::uint64_t seed, int jobs = 0);

struct Probe {
  std::size_t N = 0;
  ProbEstimate estimate;
  double target_lower = 0.0;  // lower confidence edge of P(target verdict)
  std::optional<StageOutcome> typicality;
};

struct Selection {
  bool ok = false;
  std::size_t N = 0;
  std::vector<Probe> probes;
  std::string failed_requirement;  // "", "verdict", "typicality"
  std::string diagnosis;
};

/// Doubling search from max(k^2 + 1, start) up to the cap for the smallest N
/// whose target-verdict lower edge reaches 1 - eps_k and whose sampled
/// k-block pair test passes.
Selection select_N(Classifier& c, const ProcessHandle& h, Verdict target, int k, std::size_t start,
                   const Schedules& s, std::uint64_t seed, int jobs = 0);

struct StageRecord {
  int k = 0;
  Verdict target = Verdict::Yes;
  nlohmann::json construction;  // closure / splice summary
  std::string status;           // "ok", "construction_failed", "selection_failed"
  std::string diagnosis;
  std::uint64_t seed = 0;
  Selection selection;
  std::vector<double> tv_to_previous;  // L1 distance of n-block laws, n = 1..4
  double error_bound = 0.0;

  nlohmann::json to_json() const;
};

struct LimitCheck {
  int k = 0;
  std::size_t N = 0;
  Verdict target = Verdict::Yes;
  ProbEstimate estimate;
  double target_prob = 0.0;
  double required = 0.0;  // 1 - eps_k - delta tail
  bool pass = false;
};

struct TelescopeCheck {
  int from = 0;
  int to = 0;
  int n = 0;
  double tv = 0.0;
  double bound = 0.0;
  bool pass = false;
};

/// Stage handles with the tail bounds of the delta schedule.
struct LimitProcess {
  std::vector<ProcessHandle> stages;
  std::vector<double> deltas;

  FiniteDistribution dims(int n) const { return stages.back()->dims(n); }
  /// Certified L1 distance between stage k and the last stage on n-blocks, n <= N_k.
  double bound(int k) const;
};

struct AdversaryReport {
  nlohmann::json classifier;
  std::string classifier_spec;
  Schedules schedules;
  std::uint64_t seed = 0;
  nlohmann::json z_description;
  std::vector<StageRecord> stages;
  std::vector<TelescopeCheck> telescope;
  std::vector<LimitCheck> limit_checks;
  bool complete = false;
  int halted_at = 0;
  std::string diagnosis;

  nlohmann::json to_json() const;
};

struct AdversaryRun {
  AdversaryReport report;
  LimitProcess limit;
};

AdversaryRun run_diagonalization(Classifier& c, const std::string& classifier_spec, const Schedules& s,
                                 std::uint64_t seed, const ProcessHandle& z = nullptr, int jobs = 0);

struct ReplayResult {
  bool agree = false;
  std::vector<std::string> mismatches;
  nlohmann::json fresh;
};

/// Re-runs the recorded configuration and compares every stage record.
ReplayResult replay_report(const nlohmann::json& report, int jobs = 0);

}  // namespace ergolab

#include "ergolab/adversary.hpp"

#include <cmath>
#include <sstream>

#include "ergolab/closure.hpp"
#include "ergolab/errors.hpp"
#include "ergolab/generators.hpp"
#include "ergolab/parallel.hpp"
#include "ergolab/rng.hpp"
#include "ergolab/rotation.hpp"

namespace ergolab {

double Schedules::epsilon(int k) const {
  if (k >= 1 && static_cast<std::size_t>(k) <= epsilon_override.size()) return epsilon_override[k - 1];
  return 1.0 / (k + 1);
}

double Schedules::delta(int k) const {
  if (k >= 1 && static_cast<std::size_t>(k) <= delta_override.size()) return delta_override[k - 1];
  return 0.2 * std::ldexp(1.0, -k);
}

double Schedules::delta_tail(int k) const {
  double s = 0.0;
  for (int i = k; i < k_max; ++i) s += delta(i);
  return s;
}

void Schedules::validate() const {
  if (k_max < 1) throw ConfigError("at least one stage is required");
  if (n_cap < 4) throw ConfigError("N cap must be at least 4");
  if (samples < 30) throw ConfigError("verdict estimates need at least 30 samples");
  if (pairs < 1) throw ConfigError("typicality checks need at least one pair");
  if (!(confidence > 0.0 && confidence < 1.0)) throw ConfigError("confidence must lie in (0,1)");
  double total = 0.0;
  for (int k = 1; k <= k_max; ++k) {
    const double e = epsilon(k), d = delta(k);
    if (!(e > 0.0 && e < 1.0)) throw ConfigError("epsilon_" + std::to_string(k) + " must lie in (0,1)");
    if (k > 1 && !(e < epsilon(k - 1))) throw ConfigError("epsilon schedule must be strictly decreasing");
    if (!(d > 0.0 && d < 1.0)) throw ConfigError("delta_" + std::to_string(k) + " must lie in (0,1)");
    total += d;
  }
  if (!(total < 0.25)) throw ConfigError("delta schedule must sum to less than 0.25");
}

nlohmann::json Schedules::to_json() const {
  nlohmann::json eps = nlohmann::json::array(), del = nlohmann::json::array();
  for (int k = 1; k <= k_max; ++k) {
    eps.push_back(epsilon(k));
    del.push_back(delta(k));
  }
  return {{"k_max", k_max},
          {"n_cap", n_cap},
          {"samples", samples},
          {"pairs", pairs},
          {"confidence", confidence},
          {"epsilon", eps},
          {"delta", del},
          {"splice_search", {{"r_start", splice_search.r_start},
                             {"r_max", splice_search.r_max},
                             {"samples_per_length", splice_search.samples_per_length},
                             {"seed", splice_search.seed}}}};
}

Schedules Schedules::from_json(const nlohmann::json& j) {
  Schedules s;
  s.k_max = j.value("k_max", s.k_max);
  s.n_cap = j.value("n_cap", s.n_cap);
  s.samples = j.value("samples", s.samples);
  s.pairs = j.value("pairs", s.pairs);
  s.confidence = j.value("confidence", s.confidence);
  s.epsilon_override = j.value("epsilon", std::vector<double>{});
  s.delta_override = j.value("delta", std::vector<double>{});
  if (j.contains("splice_search")) {
    const auto& t = j.at("splice_search");
    s.splice_search.r_start = t.value("r_start", s.splice_search.r_start);
    s.splice_search.r_max = t.value("r_max", s.splice_search.r_max);
    s.splice_search.samples_per_length = t.value("samples_per_length", s.splice_search.samples_per_length);
    s.splice_search.seed = t.value("seed", s.splice_search.seed);
  }
  s.validate();
  return s;
}

// ---------------------------------------------------------------------------

nlohmann::json ProbEstimate::to_json() const {
  return {{"p_yes", p_hat}, {"radius", radius}, {"samples", samples}, {"yes", yes}};
}

double two_sided_radius(std::size_t n, double confidence) {
  if (n == 0) return INFINITY;
  return std::sqrt(std::log(2.0 / (1.0 - confidence)) / (2.0 * static_cast<double>(n)));
}

ProbEstimate estimate_verdict_prob(Classifier& c, const ProcessHandle& h, std::size_t n, std::size_t samples,
                                   double confidence, std::uint64_t seed, int jobs) {
  if (samples < 30) throw RangeError("verdict estimates need at least 30 samples");
  std::vector<char> yes(samples, 0);
  const std::size_t workers = jobs > 0 ? static_cast<std::size_t>(jobs) : default_jobs();
  parallel_for(samples, workers, [&](std::size_t i) {
    const Word x = h->sample(n, derive_seed(seed, i));
    yes[i] = c.classify(x) == Verdict::Yes ? 1 : 0;
  });
  ProbEstimate e;
  e.samples = samples;
  for (char v : yes) e.yes += static_cast<std::size_t>(v);
  e.p_hat = static_cast<double>(e.yes) / static_cast<double>(samples);
  e.radius = two_sided_radius(samples, confidence);
  return e;
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

}  // namespace

Selection select_N(Classifier& c, const ProcessHandle& h, Verdict target, int k, std::size_t start,
                   const Schedules& s, std::uint64_t seed, int jobs) {
  Selection sel;
  const double eps = s.epsilon(k);
  std::size_t N = std::max<std::size_t>(static_cast<std::size_t>(k) * k + 1, start);
  double best_lower = -INFINITY;
  std::size_t best_N = 0;
  bool verdict_cleared = false;
  for (std::uint64_t probe = 0; N <= s.n_cap; N *= 2, ++probe) {
    Probe p;
    p.N = N;
    p.estimate = estimate_verdict_prob(c, h, N, s.samples, s.confidence, derive_seed(seed, 2 * probe), jobs);
    const double prob = target == Verdict::Yes ? p.estimate.p_hat : 1.0 - p.estimate.p_hat;
    p.target_lower = prob - p.estimate.radius;
    if (p.target_lower > best_lower) {
      best_lower = p.target_lower;
      best_N = N;
    }
    if (p.target_lower >= 1.0 - eps) {
      verdict_cleared = true;
      CertificateOptions opt;
      opt.pairs = s.pairs;
      opt.confidence = s.confidence;
      opt.seed = derive_seed(seed, 2 * probe + 1);
      opt.jobs = jobs;
      p.typicality = ergodicity_certificate(h, {{k, N, eps}}, opt).stages.front();
      if (p.typicality->pass) {
        sel.probes.push_back(p);
        sel.ok = true;
        sel.N = N;
        return sel;
      }
    }
    sel.probes.push_back(p);
  }
  const std::string hyp = target == Verdict::Yes ? "(1)" : "(2)";
  const std::string verdict = to_string(target);
  if (!verdict_cleared) {
    sel.failed_requirement = "verdict";
    sel.diagnosis = "hypothesis " + hyp + " violated at reachable scales: lower edge of P(" + verdict +
                    ") never reached 1 - eps_" + std::to_string(k) + " = " + fmt(1.0 - eps) + " for N <= " +
                    std::to_string(s.n_cap) + " (best " + fmt(best_lower) + " at N = " + std::to_string(best_N) + ")";
  } else {
    sel.failed_requirement = "typicality";
    sel.diagnosis = "verdict target reached but the " + std::to_string(k) +
                    "-block pair test failed at every such N <= " + std::to_string(s.n_cap);
  }
  return sel;
}

// ---------------------------------------------------------------------------

namespace {

nlohmann::json selection_json(const Selection& sel) {
  nlohmann::json probes = nlohmann::json::array();
  for (const Probe& p : sel.probes) {
    nlohmann::json j = {{"N", p.N}, {"estimate", p.estimate.to_json()}, {"target_lower", p.target_lower}};
    if (p.typicality) {
      j["typicality"] = {{"k", p.typicality->stage.k},
                         {"epsilon", p.typicality->stage.epsilon},
                         {"pairs", p.typicality->pairs},
                         {"failing", p.typicality->failing},
                         {"failing_fraction", p.typicality->failing_fraction},
                         {"radius", p.typicality->radius},
                         {"pass", p.typicality->pass}};
    }
    probes.push_back(j);
  }
  return {{"ok", sel.ok}, {"N", sel.N}, {"failed_requirement", sel.failed_requirement},
          {"diagnosis", sel.diagnosis}, {"probes", probes}};
}

}  // namespace

nlohmann::json StageRecord::to_json() const {
  return {{"k", k},
          {"kind", k % 2 == 1 ? "markov" : "non_finitarily_markovian"},
          {"target", to_string(target)},
          {"status", status},
          {"diagnosis", diagnosis},
          {"seed", seed},
          {"construction", construction},
          {"selection", selection_json(selection)},
          {"tv_to_previous", tv_to_previous},
          {"error_bound", error_bound}};
}

double LimitProcess::bound(int k) const {
  double s = 0.0;
  for (std::size_t i = static_cast<std::size_t>(k); i < stages.size(); ++i) s += deltas[i - 1];
  return s;
}

nlohmann::json AdversaryReport::to_json() const {
  nlohmann::json st = nlohmann::json::array(), tel = nlohmann::json::array(), lim = nlohmann::json::array();
  for (const auto& r : stages) st.push_back(r.to_json());
  for (const auto& t : telescope) {
    tel.push_back({{"from", t.from}, {"to", t.to}, {"n", t.n}, {"tv", t.tv}, {"bound", t.bound}, {"pass", t.pass}});
  }
  for (const auto& l : limit_checks) {
    lim.push_back({{"k", l.k},
                   {"N", l.N},
                   {"target", to_string(l.target)},
                   {"estimate", l.estimate.to_json()},
                   {"target_prob", l.target_prob},
                   {"required", l.required},
                   {"pass", l.pass}});
  }
  double max_yes = 0.0, max_no = 0.0;
  for (const auto& r : stages) {
    if (!r.selection.ok) continue;
    const double p = r.selection.probes.back().estimate.p_hat;
    if (r.k % 2 == 1) max_yes = std::max(max_yes, p);
    if (r.k % 2 == 0) max_no = std::max(max_no, 1.0 - p);
  }
  return {{"schema", "ergolab.adversary/1"},
          {"classifier", classifier},
          {"classifier_spec", classifier_spec},
          {"schedules", schedules.to_json()},
          {"seed", seed},
          {"z", z_description},
          {"complete", complete},
          {"halted_at", halted_at},
          {"diagnosis", diagnosis},
          {"stages", st},
          {"telescope", tel},
          {"limit_checks", lim},
          {"oscillation", {{"max_yes_at_odd_stages", max_yes}, {"max_no_at_even_stages", max_no}}}};
}

namespace {

struct Built {
  ProcessHandle handle;
  nlohmann::json construction;
};

Built build_stage(int k, const ProcessHandle& prev, std::size_t prev_N, const ProcessHandle& z, const Schedules& s,
                  std::uint64_t stage_seed) {
  if (k == 1) return {iid_bernoulli(0.5), {{"kind", "iid"}, {"p", 0.5}}};
  const int N = static_cast<int>(prev_N);
  if (k % 2 == 0) {
    TypicalSearch search = s.splice_search;
    search.seed = derive_seed(stage_seed, 1 + s.splice_search.seed);
    const SpliceResult res = splice_source(z, prev, N, s.delta(k - 1), search);
    nlohmann::json j = res.to_json();
    j.erase("process");
    j.erase("schema");
    j["kind"] = "splice";
    j["u"] = res.handle->u().to_string();
    return {res.handle, j};
  }
  if (N + 1 > kDefaultBlockCap) {
    throw RangeError("closure at order " + std::to_string(N) + " needs the " + std::to_string(N + 1) +
                     "-block law, beyond the enumeration cap " + std::to_string(kDefaultBlockCap));
  }
  const ClosureResult res = close_to_markov(prev, N);
  std::size_t positive = 0;
  for (std::uint64_t c = 0; c < res.chain.contexts(); ++c) positive += res.chain.has_row(c) ? 1 : 0;
  return {closure_handle(res),
          {{"kind", "closure"},
           {"order", N},
           {"positive_contexts", positive},
           {"source_error", res.source_error},
           {"stationarity_residual", res.stationarity_residual}}};
}

}  // namespace

AdversaryRun run_diagonalization(Classifier& c, const std::string& classifier_spec, const Schedules& s,
                                 std::uint64_t seed, const ProcessHandle& z_in, int jobs) {
  s.validate();
  const ProcessHandle z = z_in ? z_in : rotation_process();
  AdversaryRun run;
  AdversaryReport& rep = run.report;
  rep.classifier = c.describe();
  rep.classifier_spec = classifier_spec;
  rep.schedules = s;
  rep.seed = seed;
  rep.z_description = z->describe();

  ProcessHandle prev;
  std::size_t prev_N = 1;
  std::vector<std::size_t> Ns;
  for (int k = 1; k <= s.k_max; ++k) {
    StageRecord rec;
    rec.k = k;
    rec.target = k % 2 == 1 ? Verdict::Yes : Verdict::No;
    rec.seed = derive_seed(seed, static_cast<std::uint64_t>(k));
    Built b;
    try {
      b = build_stage(k, prev, prev_N, z, s, rec.seed);
    } catch (const Error& e) {
      rec.status = "construction_failed";
      rec.diagnosis = std::string("stage ") + std::to_string(k) + " could not be built: " + e.what();
      rep.halted_at = k;
      rep.diagnosis = rec.diagnosis;
      rep.stages.push_back(std::move(rec));
      break;
    }
    rec.construction = std::move(b.construction);
    const ProcessHandle h = b.handle;
    for (int n = 1; n <= 4; ++n) {
      const FiniteDistribution d = h->dims(n);
      rec.error_bound = std::max(rec.error_bound, d.error_bound());
      if (prev) rec.tv_to_previous.push_back(tv_block_distance(d, prev->dims(n)));
    }
    run.limit.stages.push_back(h);
    run.limit.deltas.push_back(s.delta(k));

    rec.selection = select_N(c, h, rec.target, k, 2 * prev_N, s, derive_seed(rec.seed, 2), jobs);
    if (!rec.selection.ok) {
      rec.status = "selection_failed";
      rec.diagnosis = "stage " + std::to_string(k) + ": " + rec.selection.diagnosis;
      rep.halted_at = k;
      rep.diagnosis = rec.diagnosis;
      rep.stages.push_back(std::move(rec));
      break;
    }
    rec.status = "ok";
    prev = h;
    prev_N = rec.selection.N;
    Ns.push_back(prev_N);
    rep.stages.push_back(std::move(rec));
  }
  rep.complete = rep.halted_at == 0;

  // Consecutive stages share their n-block laws up to delta_k for n <= N_k;
  // stage k and the last stage up to twice the delta tail.
  const auto& hs = run.limit.stages;
  const int K = static_cast<int>(hs.size());
  for (int k = 1; k < K; ++k) {
    const int top = static_cast<int>(std::min<std::size_t>(4, Ns[k - 1]));
    std::vector<int> targets{k + 1};
    if (K != k + 1) targets.push_back(K);
    for (int to : targets) {
      for (int n = 1; n <= top; ++n) {
        const FiniteDistribution a = hs[k - 1]->dims(n), b = hs[to - 1]->dims(n);
        TelescopeCheck t;
        t.from = k;
        t.to = to;
        t.n = n;
        t.tv = tv_block_distance(a, b);
        double slack = 0.0;
        for (int i = k; i < to; ++i) slack += s.delta(i);
        if (to != k + 1) slack *= 2.0;
        t.bound = slack + a.error_bound() + b.error_bound() + 1e-9;
        t.pass = t.tv <= t.bound;
        rep.telescope.push_back(t);
      }
    }
  }

  // Stage targets measured on the last constructed stage.
  if (K > 0) {
    for (const auto& rec : rep.stages) {
      if (!rec.selection.ok) continue;
      LimitCheck l;
      l.k = rec.k;
      l.N = rec.selection.N;
      l.target = rec.target;
      l.estimate = estimate_verdict_prob(c, hs.back(), l.N, s.samples, s.confidence, derive_seed(rec.seed, 3), jobs);
      l.target_prob = l.target == Verdict::Yes ? l.estimate.p_hat : 1.0 - l.estimate.p_hat;
      l.required = 1.0 - s.epsilon(rec.k) - run.limit.bound(rec.k);
      l.pass = l.target_prob + l.estimate.radius >= l.required;
      rep.limit_checks.push_back(l);
    }
  }
  return run;
}

ReplayResult replay_report(const nlohmann::json& report, int jobs) {
  if (report.value("schema", std::string()) != "ergolab.adversary/1") throw ConfigError("not an adversary report");
  const Schedules s = Schedules::from_json(report.at("schedules"));
  const std::string spec = report.at("classifier_spec").get<std::string>();
  const std::uint64_t seed = report.at("seed").get<std::uint64_t>();
  ProcessHandle z;
  const nlohmann::json& zd = report.at("z");
  if (zd.value("name", std::string()) == "rotation") {
    z = rotation_process(RotationParams::from_json(zd.at("params")));
  } else {
    throw ConfigError("replay supports rotation Z processes only");
  }
  ClassifierHandle c = make_classifier(spec);
  ReplayResult out;
  out.fresh = run_diagonalization(*c, spec, s, seed, z, jobs).report.to_json();
  for (const char* key : {"complete", "halted_at", "diagnosis", "telescope", "limit_checks", "oscillation"}) {
    if (report.value(key, nlohmann::json()) != out.fresh.at(key)) out.mismatches.push_back(key);
  }
  const auto& old_stages = report.at("stages");
  const auto& new_stages = out.fresh.at("stages");
  if (old_stages.size() != new_stages.size()) out.mismatches.push_back("stage count");
  for (std::size_t i = 0; i < std::min(old_stages.size(), new_stages.size()); ++i) {
    if (old_stages[i] != new_stages[i]) out.mismatches.push_back("stage " + std::to_string(i + 1));
  }
  out.agree = out.mismatches.empty();
  return out;
}

}  // namespace ergolab

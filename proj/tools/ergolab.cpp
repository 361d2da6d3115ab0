#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ergolab/adversary.hpp"
#include "ergolab/classifiers.hpp"
#include "ergolab/closure.hpp"
#include "ergolab/errors.hpp"
#include "ergolab/metrics.hpp"
#include "ergolab/parallel.hpp"
#include "ergolab/specs.hpp"
#include "ergolab/splice.hpp"

using namespace ergolab;
using nlohmann::json;

namespace {

Word read_word(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::vector<Bit> bits;
  for (char ch; in.get(ch);) {
    if (ch == '0' || ch == '1') {
      bits.push_back(static_cast<Bit>(ch - '0'));
    } else if (!std::isspace(static_cast<unsigned char>(ch))) {
      throw ConfigError("'" + path + "' contains a character other than 0, 1 and whitespace");
    }
  }
  return Word(std::move(bits));
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::vector<CertificateStage> parse_stages(const std::string& text) {
  std::vector<CertificateStage> out;
  std::istringstream is(text);
  for (std::string item; std::getline(is, item, ',');) {
    CertificateStage s;
    char c1 = 0, c2 = 0;
    std::istringstream it(item);
    if (!(it >> s.k >> c1 >> s.N >> c2 >> s.epsilon) || c1 != ':' || c2 != ':') {
      throw ConfigError("stage '" + item + "' is not k:N:eps");
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ergolab: stationary binary processes, Markov closure, splicing and classifier diagonalization"};
  app.require_subcommand(1);
  int jobs = 0;
  app.add_option("--jobs", jobs, "worker threads (default: ERGOLAB_JOBS or hardware concurrency)");

  std::string spec, out_path, in_path, classifier_spec, report_path, z_spec = "rotation:default";
  std::size_t length = 0;
  std::uint64_t seed = 0;
  int n = 1, N = 1, k = 1, stages = 4;
  double delta = 0.1;

  auto* gen = app.add_subcommand("gen", "sample a path as a 0/1 line");
  gen->add_option("--spec", spec, "process spec")->required();
  gen->add_option("--length", length, "path length")->required();
  gen->add_option("--seed", seed, "seed");
  gen->add_option("--out", out_path, "output file (default stdout)");

  auto* dims = app.add_subcommand("dims", "n-block law as JSON");
  dims->add_option("--spec", spec, "process spec")->required();
  dims->add_option("--n", n, "block length")->required();
  dims->add_option("--out", out_path, "output file");

  auto* close = app.add_subcommand("close", "order-N Markov closure");
  close->add_option("--spec", spec, "process spec")->required();
  close->add_option("--N", N, "order")->required();
  close->add_option("--out", out_path, "chain JSON");

  TypicalSearch search;
  auto* spl = app.add_subcommand("splice", "splice a source into a non-finitarily-Markovian process");
  spl->add_option("--source", spec, "source process spec")->required();
  spl->add_option("--N", N, "block length to preserve")->required();
  spl->add_option("--delta", delta, "L1 tolerance on N-blocks")->required();
  spl->add_option("--z", z_spec, "Z process spec (default rotation:default)");
  spl->add_option("--seed", search.seed, "seed for the typical-word search");
  spl->add_option("--r-max", search.r_max, "largest typical-word length tried");
  spl->add_option("--out", out_path, "spliced JSON");

  bool certify = false;
  std::string stage_text = "1:4096:0.2,2:4096:0.1,3:4096:0.0667";
  std::size_t pairs = 200;
  auto* met = app.add_subcommand("metrics", "block rates, plug-in entropies and ergodicity certificate");
  met->add_option("--in", in_path, "0/1 path file");
  met->add_option("--spec", spec, "process spec (for --certify)");
  met->add_option("--k", k, "largest plug-in order / block length");
  met->add_flag("--certify", certify, "run the sampled ergodicity certificate on --spec");
  met->add_option("--stages", stage_text, "certificate stages k:N:eps,...");
  met->add_option("--pairs", pairs, "pairs per stage");
  met->add_option("--seed", seed, "seed");
  met->add_option("--report", out_path, "output JSON");

  auto* cls = app.add_subcommand("classify", "run a classifier on a path");
  cls->add_option("--classifier", classifier_spec, "yes | no | freq:K[:C] | ext:CMD")->required();
  cls->add_option("--in", in_path, "0/1 path file")->required();

  Schedules sched;
  bool timing = false;
  auto* adv = app.add_subcommand("adversary", "diagonalize against a classifier");
  adv->add_option("--classifier", classifier_spec, "yes | no | freq:K[:C] | ext:CMD | exec:CMD");
  adv->add_option("--stages", stages, "number of stages");
  adv->add_option("--seed", seed, "seed");
  adv->add_option("--n-cap", sched.n_cap, "largest N probed");
  adv->add_option("--samples", sched.samples, "classifier calls per estimate");
  adv->add_option("--pairs", sched.pairs, "pairs per typicality check");
  adv->add_option("--r-max", sched.splice_search.r_max, "largest typical-word length");
  adv->add_flag("--timing", timing, "add wall-clock seconds to the report");
  adv->add_option("--out", out_path, "report JSON");
  auto* adv_replay = adv->add_subcommand("replay", "re-run a stored report and compare");
  adv_replay->add_option("--report", report_path, "report JSON")->required();

  auto* rep = app.add_subcommand("replay", "re-run a stored adversary report and compare");
  rep->add_option("--report", report_path, "report JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  if (jobs > 0) setenv("ERGOLAB_JOBS", std::to_string(jobs).c_str(), 1);

  try {
    if (gen->parsed()) {
      emit(out_path, parse_process_spec(spec)->sample(length, seed).to_string() + "\n");
    } else if (dims->parsed()) {
      json j = to_json(parse_process_spec(spec)->dims(n));
      j["schema"] = "ergolab.dims/1";
      j["spec"] = spec;
      emit(out_path, dump(j));
    } else if (close->parsed()) {
      emit(out_path, dump(close_to_markov(parse_process_spec(spec), N).to_json()));
    } else if (spl->parsed()) {
      const SpliceResult r = splice_source(parse_process_spec(z_spec), parse_process_spec(spec), N, delta, search);
      emit(out_path, dump(r.to_json()));
    } else if (met->parsed()) {
      json j = {{"schema", "ergolab.metrics/1"}};
      if (!in_path.empty()) {
        const Word x = read_word(in_path);
        j["length"] = x.size();
        j["k"] = k;
        j["block_rates"] = to_json(block_empirics(x, k).rates);
        json h = json::array();
        for (int i = 0; i <= std::min(k, kPluginMaxOrder); ++i) {
          h.push_back({{"k", i}, {"h", entropy_rate_plugin(x, i)}, {"undersampled", plugin_undersampled(x.size(), i)}});
          if (plugin_undersampled(x.size(), i)) std::cerr << "warning: plug-in order " << i << " is undersampled\n";
        }
        j["plugin_entropy"] = h;
      }
      if (certify) {
        if (spec.empty()) throw ConfigError("--certify needs --spec");
        CertificateOptions opt;
        opt.pairs = pairs;
        opt.seed = seed;
        opt.jobs = jobs;
        j["certificate"] = ergodicity_certificate(parse_process_spec(spec), parse_stages(stage_text), opt).to_json();
      }
      if (in_path.empty() && !certify) throw ConfigError("metrics needs --in or --certify");
      emit(out_path, dump(j));
    } else if (cls->parsed()) {
      std::cout << to_string(make_classifier(classifier_spec)->classify(read_word(in_path))) << "\n";
    } else if (adv->parsed() && !adv_replay->parsed()) {
      if (classifier_spec.empty()) throw CLI::RequiredError("--classifier");
      sched.k_max = stages;
      const auto start = std::chrono::steady_clock::now();
      ClassifierHandle c = make_classifier(classifier_spec, std::chrono::seconds(10), default_jobs());
      const AdversaryRun run = run_diagonalization(*c, classifier_spec, sched, seed, nullptr, jobs);
      json j = run.report.to_json();
      if (timing) {
        j["wall_clock_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      }
      emit(out_path, dump(j));
      if (!run.report.complete) {
        std::cerr << "adversary halted: " << run.report.diagnosis << "\n";
        return 1;
      }
    } else {
      const ReplayResult r = replay_report(read_json_file(report_path), jobs);
      if (!r.agree) {
        std::cerr << "replay disagrees:";
        for (const auto& m : r.mismatches) std::cerr << " [" << m << "]";
        std::cerr << "\n";
        return 1;
      }
      std::cout << "replay agrees with " << report_path << "\n";
    }
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << "\n" << app.help();
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

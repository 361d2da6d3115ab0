#include "ergolab/specs.hpp"

#include <fstream>

#include "ergolab/errors.hpp"
#include "ergolab/generators.hpp"
#include "ergolab/rotation.hpp"
#include "ergolab/splice.hpp"

namespace ergolab {

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
  }
}

namespace {

ProcessHandle indicator_from_json(const nlohmann::json& j) {
  return state_indicator_process(j.at("transitions").get<std::vector<std::vector<double>>>(),
                                 j.at("state").get<std::size_t>());
}

}  // namespace

ProcessHandle process_from_description(const nlohmann::json& desc) {
  try {
    if (desc.contains("chain")) {
      return std::make_shared<MarkovProcess>(markov_chain_from_json(desc.at("chain")),
                                             desc.value("name", std::string("markov")));
    }
    const std::string name = desc.value("name", std::string());
    if (name == "walk") return walk_chain_process(WalkChainLabeling::from_json(desc.at("labeling")));
    if (name == "indicator") return indicator_from_json(desc);
    if (name == "renewal") return renewal_process(RenewalSpec::from_json(desc.at("spec")));
    if (name == "rotation") return rotation_process(RotationParams::from_json(desc.value("params", nlohmann::json::object())));
    if (name == "spliced") {
      return std::make_shared<SplicedProcess>(process_from_description(desc.at("z")),
                                              Word::from_string(desc.at("w").get<std::string>()),
                                              Word::from_string(desc.at("u").get<std::string>()));
    }
    throw ConfigError("cannot rebuild a process named '" + name + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed process description: ") + e.what());
  }
}

ProcessHandle parse_process_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? std::string() : spec.substr(colon + 1);
  try {
    if (kind == "iid") {
      std::size_t used = 0;
      const double p = std::stod(arg, &used);
      if (used != arg.size()) throw ConfigError("bad probability '" + arg + "'");
      return iid_bernoulli(p);
    }
    if (kind == "period2") return period_two();
    if (kind == "example2") return parity_indicator();
    if (kind == "markov") return std::make_shared<MarkovProcess>(markov_chain_from_json(read_json_file(arg)));
    if (kind == "walk") {
      if (arg == "default") return walk_chain_process({});
      if (arg == "pow2plus1") {
        WalkChainLabeling l;
        l.predicate = "pow2plus1";
        return walk_chain_process(l);
      }
      return walk_chain_process(WalkChainLabeling::from_json(read_json_file(arg)));
    }
    if (kind == "renewal") return renewal_process(RenewalSpec::from_json(read_json_file(arg)));
    if (kind == "indicator") return indicator_from_json(read_json_file(arg));
    if (kind == "rotation") {
      if (arg.empty() || arg == "default") return rotation_process();
      return rotation_process(RotationParams::from_json(read_json_file(arg)));
    }
    if (kind == "spliced") {
      const nlohmann::json j = read_json_file(arg);
      return process_from_description(j.contains("process") ? j.at("process") : j);
    }
  } catch (const std::invalid_argument&) {
    throw ConfigError("bad number in process spec '" + spec + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed config for '" + spec + "': " + e.what());
  }
  throw ConfigError("unknown process spec '" + spec +
                    "' (expected iid:P, period2, example2, markov:, walk:, renewal:, indicator:, rotation:, spliced:)");
}

}  // namespace ergolab

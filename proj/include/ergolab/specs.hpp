#pragma once

#include <string>

#include <json.hpp>

#include "ergolab/process.hpp"

namespace ergolab {

/// Compact process grammar:
///   iid:P  period2  example2
///   markov:FILE  walk:FILE|default|pow2plus1  renewal:FILE
///   indicator:FILE  rotation:default|FILE  spliced:FILE
ProcessHandle parse_process_spec(const std::string& spec);

/// Rebuilds a handle from Process::describe() output.
ProcessHandle process_from_description(const nlohmann::json& desc);

nlohmann::json read_json_file(const std::string& path);

}  // namespace ergolab

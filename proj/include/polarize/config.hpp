#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "polarize/serialize.hpp"
#include "polarize/simsched.hpp"

namespace polarize {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One batch: a structure, its workload, how to explore it and what to
/// check. Loaded from a JSON document:
///
///   {
///     "structure": "tsqueue",            // tsqueue | hwqueue | optset
///     "spec": "queue",                   // optional; must match the structure
///     "threads": [["Enq(1)", "Enq(3)"], ["Enq(2)", "Deq()"], ["Deq()"]],
///     "initial": [1, 2, 4],              // optional; seeded before the threads start
///     "mode": "exhaustive",              // or {"kind": "random", "seed": 7, "count": 100}
///     "cadence": "on-complete",          // end | on-complete | paranoid
///     "caps": {"events": 24, "retries": 1, "steps": 400},
///     "mutations": ["hw-emptiness"],     // optional
///     "crosscheck": true,
///     "output": {"report": "report.jsonl", "all_runs": false}
///   }
struct RunConfig {
  std::string structure;
  std::string spec;
  Workload workload;
  ExploreMode mode;
  CheckOptions checks;
  std::vector<std::string> mutations;
  std::optional<std::string> report_path;
  bool report_all_runs = false;
  std::string source;  // where the config was read from, for replay hints
};

std::vector<std::string_view> structure_names();
/// "queue" for the queues, "set" for optset. Throws ConfigError.
std::string_view spec_for(std::string_view structure);

RunConfig parse_config(const json& j);
RunConfig load_config(const std::filesystem::path& path);
json config_to_json(const RunConfig& c);

}  // namespace polarize

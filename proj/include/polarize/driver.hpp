#pragma once

#include <map>
#include <ostream>
#include <string>

#include "polarize/config.hpp"
#include "polarize/hwqueue.hpp"
#include "polarize/optset.hpp"
#include "polarize/tsqueue.hpp"

namespace polarize {

template <class M>
struct MachineTag {
  using type = M;
};

/// Calls f(MachineTag<M>{}) for the structure's step machine.
template <class F>
decltype(auto) with_machine(std::string_view structure, F&& f) {
  if (structure == "tsqueue") return f(MachineTag<ts::Machine>{});
  if (structure == "hwqueue") return f(MachineTag<hw::Machine>{});
  if (structure == "optset") return f(MachineTag<optset::Machine>{});
  throw ConfigError("unknown structure '" + std::string(structure) + "'");
}

enum ExitCode : int { kExitPass = 0, kExitViolation = 1, kExitConfig = 2 };

struct RunSummary {
  ExploreStats stats;
  std::map<std::string, std::size_t> rules;  // failing runs per violated rule
  int exit_code = kExitPass;
};

/// One report line for a finished run.
template <StepMachine M>
json run_record(const RunConfig& c, std::size_t index, const RunResult<M>& r) {
  json violations = json::array();
  for (const auto& v : r.violations) violations.push_back(violation_to_json(v));
  const auto sched = schedule_to_string(r.schedule);
  return {{"type", "run"},
          {"index", index},
          {"structure", c.structure},
          {"verdict", r.ok() ? "pass" : "fail"},
          {"status", run_status_name(r.status)},
          {"schedule", sched},
          {"violations", std::move(violations)},
          {"abstract", history_to_json(r.final.cfg.history)},
          {"concrete", history_to_json(r.final.concrete)},
          {"replay", "polarize replay --config " + (c.source.empty() ? std::string("<config>") : c.source) +
                         " --schedule \"" + sched + "\""}};
}

json summary_record(const RunConfig& c, const RunSummary& s);

/// Explores the configured workload, streaming JSON lines to `report` (one
/// per failing run, or per run with report_all_runs, then a summary).
RunSummary run(const RunConfig& c, std::ostream* report, std::size_t workers = 1);

struct ReplayOutcome {
  Schedule schedule;
  RunStatus status = RunStatus::Completed;
  Violations violations;
  History abstract;
  History concrete;
  json record;

  bool ok() const { return violations.empty(); }
};

/// Re-executes a schedule under the config. Throws ScheduleMismatch.
ReplayOutcome replay(const RunConfig& c, const Schedule& schedule);

/// POLARIZE_WORKERS if set and positive, else the hardware concurrency.
std::size_t default_workers();

}  // namespace polarize

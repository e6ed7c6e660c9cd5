#include "polarize/driver.hpp"

#include <cstdlib>
#include <set>
#include <thread>

namespace polarize {

json summary_record(const RunConfig& c, const RunSummary& s) {
  return {{"type", "summary"},
          {"structure", c.structure},
          {"mode", c.mode.kind == ExploreMode::Kind::Random ? "random" : "exhaustive"},
          {"mutations", c.mutations},
          {"runs", s.stats.runs},
          {"failing_runs", s.stats.failing_runs},
          {"bound_exhausted", s.stats.bound_exhausted},
          {"states", s.stats.states},
          {"transitions", s.stats.transitions},
          {"rules", s.rules},
          {"exit", s.exit_code}};
}

RunSummary run(const RunConfig& c, std::ostream* report, std::size_t workers) {
  return with_machine(c.structure, [&]<class M>(MachineTag<M>) {
    Runner<M> runner(c.workload, c.checks);
    RunSummary out;
    std::size_t index = 0;
    const RunVisitor<M> visit = [&](const RunResult<M>& r) {
      std::set<std::string> rules;
      for (const auto& v : r.violations) rules.insert(v.rule);
      for (const auto& rule : rules) ++out.rules[rule];
      if (report && (c.report_all_runs || !r.ok())) *report << run_record(c, index, r).dump() << '\n';
      ++index;
      return true;
    };
    out.stats = explore(runner, c.mode, workers, visit);
    out.exit_code = out.stats.failing_runs == 0 ? kExitPass : kExitViolation;
    if (report) *report << summary_record(c, out).dump() << '\n' << std::flush;
    return out;
  });
}

ReplayOutcome replay(const RunConfig& c, const Schedule& schedule) {
  return with_machine(c.structure, [&]<class M>(MachineTag<M>) {
    Runner<M> runner(c.workload, c.checks);
    const auto r = runner.replay(schedule);
    return ReplayOutcome{r.schedule, r.status, r.violations, r.final.cfg.history, r.final.concrete, run_record(c, 0, r)};
  });
}

std::size_t default_workers() {
  if (const char* env = std::getenv("POLARIZE_WORKERS")) {
    char* end = nullptr;
    const auto n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return static_cast<std::size_t>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace polarize

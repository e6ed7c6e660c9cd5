#pragma once

#include <string>
#include <vector>

#include "polarize/simsched.hpp"

namespace polarize::test {

inline Workload workload(std::vector<std::vector<std::string>> scripts, std::vector<std::string> prelude = {}) {
  Workload w;
  for (const auto& s : scripts) {
    auto& calls = w.scripts.emplace_back();
    for (const auto& c : s) calls.push_back(parse_call(c));
  }
  for (const auto& c : prelude) w.prelude.push_back(parse_call(c));
  return w;
}

template <StepMachine M>
struct Tally {
  ExploreStats stats;
  std::vector<RunResult<M>> failures;
};

template <StepMachine M>
Tally<M> explore_all(const Workload& w, CheckOptions opts = {}, Reduction r = Reduction::StateCache,
                     std::size_t keep = 3) {
  Runner<M> runner(w, opts);
  ExhaustiveExplorer<M> ex(runner, r);
  Tally<M> out;
  out.stats = ex.run([&](const RunResult<M>& run) {
    if (!run.ok() && out.failures.size() < keep) out.failures.push_back(run);
    return true;
  });
  return out;
}

template <StepMachine M>
std::string describe(const RunResult<M>& r) {
  std::string s = "schedule [" + schedule_to_string(r.schedule) + "]";
  for (const auto& v : r.violations) {
    s += "\n  " + std::string(category_name(v.category)) + " " + v.rule + " {";
    for (auto id : v.witness) s += " " + std::to_string(id);
    s += " } " + v.detail;
  }
  return s;
}

}  // namespace polarize::test

#pragma once

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include <absl/container/flat_hash_set.h>
#include <vector>

#include "polarize/commitment.hpp"
#include "polarize/hash.hpp"
#include "polarize/history.hpp"
#include "polarize/linoracle.hpp"
#include "polarize/violation.hpp"

namespace polarize {

/// Registered faults injected into the algorithms for negative testing.
struct Mutations {
  bool hw_emptiness = false;
  bool ts_skip_startts_guard = false;
  bool ts_no_scan_edges = false;
  bool set_skip_validation = false;
  // Unrepaired instrumentation variants of the TS queue; each one undoes a
  // repair in the default instrumentation.
  bool ts_no_insert_order = false;
  bool ts_scan_all_pools = false;
  bool hw_no_insert_order = false;  // unrepaired HW enqueue

  friend bool operator==(const Mutations&, const Mutations&) = default;
};

/// "hw-emptiness", "ts-skip-startts-guard", "ts-no-scan-edges",
/// "set-skip-validation", plus the TS variants "ts-no-insert-order",
/// "ts-scan-all-pools" and "ts-paper" (both), and "hw-no-insert-order".
/// "none" or "" yields no mutation; names may be joined with ','.
std::optional<Mutations> mutation_by_name(std::string_view name);
std::vector<std::string_view> mutation_names();

enum class StepStatus { Running, Finished, Retry };

/// A data structure compiled to atomic steps. `step` performs one atomic
/// block together with its commitment action; on Finished it has stored the
/// return value in res[t]. Checks append to the violation list.
template <class M>
concept StepMachine = requires(typename M::Config& cfg, const typename M::Config& ccfg, ThreadId t,
                               const Call& call, const Mutations& mut, Violations& out) {
  { M::name } -> std::convertible_to<std::string_view>;
  { M::spec() } -> std::same_as<const SeqSpec&>;
  { M::initial(std::size_t{}) } -> std::same_as<typename M::Config>;
  M::begin(cfg, t, call);
  { M::arity(ccfg, t) } -> std::same_as<std::size_t>;
  { M::step(cfg, t, std::size_t{}, mut, out) } -> std::same_as<StepStatus>;
  M::check_invariants(ccfg, out);
  M::check_loop_invariant(ccfg, t, out);
  M::check_transition(ccfg, ccfg, t, out);
};

struct Bounds {
  std::size_t max_retries = 2;  // restarts allowed per operation
  std::size_t max_steps = 400;  // scheduler choices per run
};

/// Per-thread call scripts for the most general client, plus a prelude run
/// sequentially on thread 0 before the concurrent phase (e.g. seeding set
/// members).
struct Workload {
  std::vector<std::vector<Call>> scripts;
  std::vector<Call> prelude;
  Bounds bounds;

  std::size_t thread_count() const { return std::max<std::size_t>(scripts.size(), prelude.empty() ? 0 : 1); }
};

/// One scheduler decision: which thread moves, and which internal branch it
/// takes (e.g. the dequeue's starting pool).
struct Choice {
  ThreadId thread = 0;
  std::uint32_t branch = 0;

  friend bool operator==(const Choice&, const Choice&) = default;
};

using Schedule = std::vector<Choice>;

std::string schedule_to_string(const Schedule& s);
/// Parses "t.b t.b ..." as written by schedule_to_string.
Schedule parse_schedule(std::string_view text);

enum class ThreadStatus : std::uint8_t { Idle, Running, Stuck };

struct ThreadSlot {
  ThreadStatus status = ThreadStatus::Idle;
  std::uint32_t next_call = 0;
  std::uint32_t attempts = 0;

  friend bool operator==(const ThreadSlot&, const ThreadSlot&) = default;
};

inline void hash_into(Hasher& h, const ThreadSlot& s) {
  h.mix(static_cast<std::uint64_t>(s.status));
  h.mix(s.next_call);
  h.mix(s.attempts);
}

enum class Cadence { End, OnComplete, Paranoid };

std::optional<Cadence> cadence_by_name(std::string_view name);
std::string_view cadence_name(Cadence c);

struct CheckOptions {
  Cadence cadence = Cadence::OnComplete;
  bool invariants = true;
  bool transitions = true;
  bool crosscheck = true;
  std::size_t max_events = 24;  // cap for check_abs and the oracle
  Mutations mutations;
};

enum class RunStatus { Completed, BoundExhausted };

std::string_view run_status_name(RunStatus s);

class NotIdle : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class Blocked : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class LastUndefined : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class ScheduleMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <StepMachine M>
struct SimState {
  typename M::Config cfg;
  History concrete;
  std::vector<ThreadSlot> threads;
  std::size_t steps = 0;

  /// Identity for visited-state caching; excludes the step counter.
  Fingerprint key() const {
    Hasher h;
    hash_into(h, cfg);
    hash_into(h, concrete);
    hash_into(h, threads);
    return h.finish();
  }
};

template <StepMachine M>
struct RunResult {
  Schedule schedule;
  SimState<M> final;
  RunStatus status = RunStatus::Completed;
  Violations violations;

  bool ok() const { return violations.empty(); }
};

struct ExploreStats {
  std::size_t runs = 0;
  std::size_t failing_runs = 0;
  std::size_t bound_exhausted = 0;
  std::size_t transitions = 0;
  std::size_t states = 0;
  bool stopped = false;
};

/// Executes the most-general-client semantics for one workload: invoke,
/// atomic steps with their commitments, and return, with the configured
/// checks run after every step.
template <StepMachine M>
class Runner {
 public:
  Runner(Workload workload, CheckOptions options) : workload_(std::move(workload)), options_(options) {
    if (workload_.bounds.max_retries == 0 || workload_.bounds.max_steps == 0) {
      throw std::invalid_argument("workload bounds must be positive");
    }
    std::size_t next = workload_.prelude.size();
    for (const auto& script : workload_.scripts) {
      first_id_.push_back(next);
      next += script.size();
    }
  }

  /// Event ids are fixed by position in the workload: prelude calls first,
  /// then each thread's script in thread order. Interleavings that differ
  /// only in invocation order thus name their events identically.
  EventId event_id(ThreadId t, std::size_t call) const { return first_id_.at(t) + call; }

  const Workload& workload() const { return workload_; }
  const CheckOptions& options() const { return options_; }

  /// Initial state with the prelude already executed on thread 0.
  SimState<M> start() const {
    SimState<M> s;
    s.cfg = M::initial(workload_.thread_count());
    s.threads.assign(workload_.thread_count(), ThreadSlot{});
    for (std::size_t i = 0; i < workload_.prelude.size(); ++i) {
      invoke(s, 0, workload_.prelude[i], i);
      for (;;) {
        Violations ignored;
        const auto st = M::step(s.cfg, 0, 0, options_.mutations, ignored);
        if (st == StepStatus::Finished) {
          ret(s, 0);
          break;
        }
        if (st == StepStatus::Retry) throw std::logic_error("prelude operation restarted");
      }
    }
    return s;
  }

  /// Runnable choices in canonical order: by thread, then by branch.
  std::vector<Choice> enabled(const SimState<M>& s) const {
    std::vector<Choice> out;
    if (s.steps >= workload_.bounds.max_steps) return out;
    for (ThreadId t = 0; t < s.threads.size(); ++t) {
      const auto& slot = s.threads[t];
      if (slot.status == ThreadStatus::Idle) {
        if (t < workload_.scripts.size() && slot.next_call < workload_.scripts[t].size()) out.push_back({t, 0});
      } else if (slot.status == ThreadStatus::Running) {
        const auto n = M::arity(s.cfg, t);
        for (std::uint32_t b = 0; b < n; ++b) out.push_back({t, b});
      }
    }
    return out;
  }

  bool valid(const SimState<M>& s, Choice c) const {
    const auto en = enabled(s);
    return std::find(en.begin(), en.end(), c) != en.end();
  }

  /// Invocation rule: the idle thread's next call gets a fresh event in both
  /// the abstract and the concrete history.
  void invoke(SimState<M>& s, ThreadId t, const Call& call, EventId id) const {
    if (s.threads[t].status != ThreadStatus::Idle) throw NotIdle("thread " + std::to_string(t) + " is not idle");
    invoke_event(s.cfg, t, call.op, call.arg, id);
    invoke_history_event(s.concrete, t, call.op, call.arg, id);
    M::begin(s.cfg, t, call);
    s.threads[t].status = ThreadStatus::Running;
    s.threads[t].attempts = 0;
  }

  /// Return rule: completes last(t) in the concrete history with res[t].
  void ret(SimState<M>& s, ThreadId t) const {
    const auto last = s.concrete.last_of(t);
    if (!last) throw LastUndefined("thread " + std::to_string(t) + " has no event");
    s.concrete.complete(*last, s.cfg.res[t]);
    s.threads[t].status = ThreadStatus::Idle;
  }

  /// Applies one scheduler choice and runs the per-step checks. A non-empty
  /// result means the run failed at this step.
  Violations apply(SimState<M>& s, Choice c) const {
    Violations out;
    const auto before = s.cfg;
    const auto completed_before = std::popcount(s.cfg.history.completed_mask());
    ++s.steps;
    auto& slot = s.threads[c.thread];
    const bool invoking = slot.status == ThreadStatus::Idle;
    if (invoking) {
      invoke(s, c.thread, workload_.scripts[c.thread][slot.next_call], event_id(c.thread, slot.next_call));
      ++slot.next_call;
    } else {
      if (M::arity(s.cfg, c.thread) == 0) throw Blocked("thread " + std::to_string(c.thread) + " is blocked");
      StepStatus st;
      try {
        st = M::step(s.cfg, c.thread, c.branch, options_.mutations, out);
      } catch (const HistoryError& err) {
        s.cfg = before;
        out.push_back({Category::CommitRejected, error_kind(err), err.ids(), err.what()});
        return out;
      }
      if (st == StepStatus::Finished) {
        ret(s, c.thread);
      } else if (st == StepStatus::Retry) {
        if (++slot.attempts > workload_.bounds.max_retries) slot.status = ThreadStatus::Stuck;
      }
    }
    check_step(before, s, c.thread, invoking ? std::optional(event_id(c.thread, slot.next_call - 1)) : std::nullopt,
               completed_before, out);
    return out;
  }

  /// End-of-run checks: abstraction and the oracle cross-check.
  Violations finish(const SimState<M>& s) const {
    Violations out;
    check_abs_into(s.cfg.history, out);
    if (!validate_hupd(s.concrete, s.cfg.history)) {
      out.push_back({Category::HistoryUpdate, "concrete-to-abstract", {}, "h ⤳* H does not hold at run end"});
    }
    if (out.empty() && options_.crosscheck) {
      const auto verdict = crosscheck_cached(s.concrete);
      if (!verdict) {
        out.push_back({Category::Discrepancy, "oracle", {}, "abstract history passed but concrete history is not linearizable"});
      }
    }
    return out;
  }

  RunStatus status_of(const SimState<M>& s) const {
    if (s.steps >= workload_.bounds.max_steps) return RunStatus::BoundExhausted;
    for (const auto& slot : s.threads) {
      if (slot.status == ThreadStatus::Stuck) return RunStatus::BoundExhausted;
    }
    return RunStatus::Completed;
  }

  /// Re-executes a recorded schedule. Throws ScheduleMismatch if a choice is
  /// not enabled or the schedule ends before the run does.
  RunResult<M> replay(const Schedule& schedule) const {
    RunResult<M> r;
    r.final = start();
    for (const auto& c : schedule) {
      if (!r.violations.empty()) throw ScheduleMismatch("schedule continues past a failing step");
      if (!valid(r.final, c)) {
        throw ScheduleMismatch("choice " + std::to_string(c.thread) + "." + std::to_string(c.branch) +
                               " is not enabled at step " + std::to_string(r.schedule.size()));
      }
      r.schedule.push_back(c);
      r.violations = apply(r.final, c);
    }
    if (r.violations.empty()) {
      if (!enabled(r.final).empty()) throw ScheduleMismatch("schedule ends before the run terminates");
      r.violations = finish(r.final);
    }
    r.status = status_of(r.final);
    return r;
  }

 private:
  static std::string error_kind(const HistoryError& err) {
    if (dynamic_cast<const CycleError*>(&err)) return "cycle";
    if (dynamic_cast<const SourceUncompleted*>(&err)) return "source-uncompleted";
    if (dynamic_cast<const AlreadyCompleted*>(&err)) return "already-completed";
    if (dynamic_cast<const UnknownEvent*>(&err)) return "unknown-event";
    return "rejected-update";
  }

  void check_step(const typename M::Config& before, const SimState<M>& s, ThreadId actor,
                  std::optional<EventId> invoked, int completed_before, Violations& out) const {
    for (const auto& v : check_wf(s.cfg.history)) {
      out.push_back({Category::WellFormedness, "abstract:" + std::string(rule_name(v.rule)), v.ids, ""});
    }
    for (const auto& v : check_wf(s.concrete)) {
      out.push_back({Category::WellFormedness, "concrete:" + std::string(rule_name(v.rule)), v.ids, ""});
    }
    for (ThreadId t = 0; t < s.threads.size(); ++t) {
      const bool running = s.threads[t].status != ThreadStatus::Idle;
      if (current_event(s.concrete, t).has_value() != running) {
        out.push_back({Category::WellFormedness, "running-events", {}, "thread " + std::to_string(t)});
      }
    }
    if (invoked) {
      // An invocation is exactly ⇢_t: one new event after the completed ones.
      History expected = before.history;
      const auto& fresh = s.cfg.history.event(*invoked);
      invoke_history_event(expected, actor, fresh.op, fresh.arg, fresh.id);
      if (!(expected == s.cfg.history) || !(before.ghost == s.cfg.ghost)) {
        out.push_back({Category::HistoryUpdate, "invoke", {fresh.id}, "invocation is not an event creation step"});
      }
    } else if (!validate_hupd(before.history, s.cfg.history)) {
      out.push_back({Category::HistoryUpdate, "step", {}, "abstract history did not evolve by ⤳"});
    }
    if (options_.invariants) {
      M::check_invariants(s.cfg, out);
      for (ThreadId t = 0; t < s.threads.size(); ++t) M::check_loop_invariant(s.cfg, t, out);
    }
    if (options_.transitions) M::check_transition(before, s.cfg, actor, out);
    const bool completed_now = std::popcount(s.cfg.history.completed_mask()) != completed_before;
    if (options_.cadence == Cadence::Paranoid || (options_.cadence == Cadence::OnComplete && completed_now)) {
      check_abs_into(s.cfg.history, out);
    }
  }

  void check_abs_into(const History& h, Violations& out) const {
    const auto key = fingerprint(h);
    if (auto it = abs_cache_.find(key); it != abs_cache_.end()) {
      if (!it->second.pass) out.push_back(abs_violation(it->second));
      return;
    }
    AbsVerdict verdict;
    try {
      verdict = check_abs(h, M::spec(), options_.max_events);
    } catch (const SizeLimit& err) {
      out.push_back({Category::Abstraction, "size-limit", {}, err.what()});
      return;
    }
    if (!verdict.pass) out.push_back(abs_violation(verdict));
    abs_cache_.emplace(key, std::move(verdict));
  }

  static Violation abs_violation(const AbsVerdict& v) {
    std::vector<EventId> ids;
    std::string text;
    for (const auto& e : *v.counterexample) {
      ids.push_back(e.id);
      if (!text.empty()) text += "; ";
      text += to_string(e);
    }
    return {Category::Abstraction, "abs", ids, "rejected linearization [" + text + "]"};
  }

  bool crosscheck_cached(const History& concrete) const {
    const auto key = fingerprint(concrete);
    if (auto it = oracle_cache_.find(key); it != oracle_cache_.end()) return it->second;
    bool ok = true;
    try {
      ok = crosscheck(true, concrete, M::spec(), options_.max_events);
    } catch (const SizeLimit&) {
      ok = true;  // beyond the oracle's reach; not a discrepancy
    }
    oracle_cache_.emplace(key, ok);
    return ok;
  }

  Workload workload_;
  CheckOptions options_;
  std::vector<EventId> first_id_;
  mutable std::unordered_map<Fingerprint, AbsVerdict, FingerprintHash> abs_cache_;
  mutable std::unordered_map<Fingerprint, bool, FingerprintHash> oracle_cache_;
};

enum class Reduction {
  None,        // enumerate every schedule
  StateCache,  // expand each distinct configuration once
};

struct ExploreMode {
  enum class Kind { Exhaustive, Random } kind = Kind::Exhaustive;
  Reduction reduction = Reduction::StateCache;
  std::uint64_t seed = 0;
  std::size_t count = 100;
};

template <StepMachine M>
using RunVisitor = std::function<bool(const RunResult<M>&)>;

/// Depth-first exploration with backtracking over cloned states. With
/// StateCache, transitions into an already visited configuration are still
/// checked but not expanded, so every reachable transition is checked once.
template <StepMachine M>
class ExhaustiveExplorer {
 public:
  ExhaustiveExplorer(const Runner<M>& runner, Reduction reduction) : runner_(runner), reduction_(reduction) {}

  ExploreStats run(const RunVisitor<M>& visit) {
    stats_ = {};
    visited_.clear();
    visit_ = &visit;
    auto s = runner_.start();
    if (reduction_ == Reduction::StateCache) visited_.insert(s.key());
    stats_.states = 1;
    Schedule path;
    dfs(s, path);
    return stats_;
  }

  const ExploreStats& stats() const { return stats_; }

 private:
  bool emit(RunResult<M>&& r) {
    ++stats_.runs;
    if (!r.ok()) ++stats_.failing_runs;
    if (r.status == RunStatus::BoundExhausted) ++stats_.bound_exhausted;
    if (!(*visit_)(r)) {
      stats_.stopped = true;
      return false;
    }
    return true;
  }

  bool dfs(const SimState<M>& s, Schedule& path) {
    const auto choices = runner_.enabled(s);
    if (choices.empty()) {
      RunResult<M> r{path, s, runner_.status_of(s), runner_.finish(s)};
      return emit(std::move(r));
    }
    for (const auto& c : choices) {
      SimState<M> next = s;
      path.push_back(c);
      ++stats_.transitions;
      auto violations = runner_.apply(next, c);
      bool go_on = true;
      if (!violations.empty()) {
        go_on = emit(RunResult<M>{path, next, runner_.status_of(next), std::move(violations)});
      } else if (reduction_ == Reduction::None || visited_.insert(next.key()).second) {
        ++stats_.states;
        go_on = dfs(next, path);
      }
      path.pop_back();
      if (!go_on) return false;
    }
    return true;
  }

  const Runner<M>& runner_;
  Reduction reduction_;
  ExploreStats stats_;
  absl::flat_hash_set<Fingerprint, FingerprintHash> visited_;
  const RunVisitor<M>* visit_ = nullptr;
};

/// Seed for the i-th random run; independent of worker assignment.
std::uint64_t run_seed(std::uint64_t seed, std::size_t index);

template <StepMachine M>
RunResult<M> random_run(const Runner<M>& runner, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  RunResult<M> r;
  r.final = runner.start();
  for (;;) {
    const auto choices = runner.enabled(r.final);
    if (choices.empty()) {
      r.violations = runner.finish(r.final);
      break;
    }
    std::uniform_int_distribution<std::size_t> pick(0, choices.size() - 1);
    const auto c = choices[pick(rng)];
    r.schedule.push_back(c);
    r.violations = runner.apply(r.final, c);
    if (!r.violations.empty()) break;
  }
  r.status = runner.status_of(r.final);
  return r;
}

/// Samples `count` schedules reproducibly from `seed`, spread over
/// `workers` threads. Results are delivered in index order.
template <StepMachine M>
ExploreStats explore_random(const Runner<M>& runner, std::uint64_t seed, std::size_t count, std::size_t workers,
                            const RunVisitor<M>& visit) {
  ExploreStats stats;
  workers = std::max<std::size_t>(1, workers);
  const std::size_t batch = std::max<std::size_t>(workers * 8, 1);
  for (std::size_t base = 0; base < count && !stats.stopped; base += batch) {
    const std::size_t n = std::min(batch, count - base);
    std::vector<RunResult<M>> results(n);
    // Each worker owns a Runner copy: the check caches are not shared.
    auto work = [&](std::size_t w) {
      Runner<M> local = runner;
      for (std::size_t i = w; i < n; i += workers) results[i] = random_run(local, run_seed(seed, base + i));
    };
    if (workers == 1) {
      work(0);
    } else {
      std::vector<std::jthread> pool;
      for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
    }
    for (auto& r : results) {
      ++stats.runs;
      stats.transitions += r.schedule.size();
      if (!r.ok()) ++stats.failing_runs;
      if (r.status == RunStatus::BoundExhausted) ++stats.bound_exhausted;
      if (!visit(r)) {
        stats.stopped = true;
        break;
      }
    }
  }
  return stats;
}

template <StepMachine M>
ExploreStats explore(const Runner<M>& runner, const ExploreMode& mode, std::size_t workers, const RunVisitor<M>& visit) {
  if (mode.kind == ExploreMode::Kind::Random) return explore_random(runner, mode.seed, mode.count, workers, visit);
  ExhaustiveExplorer<M> ex(runner, mode.reduction);
  return ex.run(visit);
}

}  // namespace polarize

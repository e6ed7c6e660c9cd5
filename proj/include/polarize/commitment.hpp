#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "polarize/hash.hpp"
#include "polarize/history.hpp"
#include "polarize/seqspec.hpp"

namespace polarize {

/// Ghost state: a partial map from event ids to proof-only values
/// (timestamps, array slots or node ids, depending on the structure).
template <class V>
using GhostMap = std::map<EventId, V>;

/// κ = (state, abstract history, ghost). `state` holds the structure's
/// shared locations; `locals` the per-thread registers; `arg`/`res` the
/// distinguished per-thread argument and result locations.
template <class Shared, class Locals, class GhostValue>
struct Configuration {
  using Ghost = GhostMap<GhostValue>;

  Shared state;
  std::vector<Locals> locals;
  std::vector<Value> arg;
  std::vector<Value> res;
  History history;
  Ghost ghost;

  std::size_t thread_count() const { return locals.size(); }

  friend void hash_into(Hasher& h, const Configuration& c) {
    hash_into(h, c.state);
    hash_into(h, c.locals);
    hash_into(h, c.arg);
    hash_into(h, c.res);
    hash_into(h, c.history);
    hash_into(h, c.ghost);
  }
};

class PendingEvent : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class NoCurrentEvent : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Raised when an update passes add_edges/complete but still fails
/// validate_hupd. Treated like the other HistoryError verdicts.
class UpdateRejected : public HistoryError {
 public:
  using HistoryError::HistoryError;
};

class SizeLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Commit actions

struct AddEdges {
  std::vector<Edge> edges;
};

struct Complete {
  EventId id;
  Value value;
};

template <class V>
struct SetGhost {
  EventId id;
  V value;
};

/// A composed commitment: primitive updates applied in order. An empty
/// action leaves the history intact.
template <class V>
struct CommitAction {
  using Step = std::variant<AddEdges, Complete, SetGhost<V>>;
  std::vector<Step> steps;

  CommitAction& edges(std::vector<Edge> es) {
    if (!es.empty()) steps.emplace_back(AddEdges{std::move(es)});
    return *this;
  }
  CommitAction& complete(EventId id, Value v) {
    steps.emplace_back(Complete{id, v});
    return *this;
  }
  CommitAction& ghost(EventId id, V v) {
    steps.emplace_back(SetGhost<V>{id, std::move(v)});
    return *this;
  }
  CommitAction& then(const CommitAction& other) {
    steps.insert(steps.end(), other.steps.begin(), other.steps.end());
    return *this;
  }
};

// ---------------------------------------------------------------------------
// Operations

/// h ⤳* h': same ids, each event keeps (thread, op, arg), completed results
/// are unchanged, and the order only grows.
bool validate_hupd(const History& before, const History& after);

/// last(t, H) when that event is uncompleted.
std::optional<EventId> current_event(const History& h, ThreadId t);

template <class S, class L, class V>
EventId my_eid(const Configuration<S, L, V>& cfg, ThreadId t) {
  const auto id = current_event(cfg.history, t);
  if (!id) throw NoCurrentEvent("thread " + std::to_string(t) + " has no running operation");
  return *id;
}

/// Adds the event for a freshly invoked operation to `h`, ordered after
/// every completed event. The id is the next unused one unless given.
/// Throws PendingEvent if t already has one running.
EventId invoke_history_event(History& h, ThreadId t, Op op, Value arg, std::optional<EventId> id = std::nullopt);

template <class S, class L, class V>
EventId invoke_event(Configuration<S, L, V>& cfg, ThreadId t, Op op, Value arg,
                     std::optional<EventId> given = std::nullopt) {
  const EventId id = invoke_history_event(cfg.history, t, op, arg, given);
  cfg.arg[t] = arg;
  return id;
}

/// Applies a commit to the abstract history and ghost state atomically.
/// Propagates CycleError / SourceUncompleted / AlreadyCompleted; on error
/// the configuration is unchanged.
template <class S, class L, class V>
void apply_commit(Configuration<S, L, V>& cfg, ThreadId /*t*/, const CommitAction<V>& action) {
  History next = cfg.history;
  auto ghost = cfg.ghost;
  for (const auto& step : action.steps) {
    if (const auto* add = std::get_if<AddEdges>(&step)) {
      next.add_edges(add->edges);
    } else if (const auto* done = std::get_if<Complete>(&step)) {
      next.complete(done->id, done->value);
    } else {
      const auto& g = std::get<SetGhost<V>>(step);
      ghost[g.id] = g.value;
    }
  }
  if (!validate_hupd(cfg.history, next)) {
    throw UpdateRejected("update is not a history extension", {});
  }
  cfg.history = std::move(next);
  cfg.ghost = std::move(ghost);
}

struct AbsVerdict {
  bool pass = true;
  /// A linear extension of ⌊H⌋ that the spec rejects (when !pass).
  std::optional<SeqHistory> counterexample;
};

/// abs(H, spec): every linear extension of ⌊H⌋ is a member of the spec.
/// Explores prefixes with memoized replay states. Throws SizeLimit when ⌊H⌋
/// has more than `max_events` events.
AbsVerdict check_abs(const History& h, const SeqSpec& spec, std::size_t max_events = History::kMaxEvents);

template <class S, class L, class V>
AbsVerdict check_abs(const Configuration<S, L, V>& cfg, const SeqSpec& spec,
                     std::size_t max_events = History::kMaxEvents) {
  return check_abs(cfg.history, spec, max_events);
}

/// Final spec states over every linear extension of ⌊H⌋ that the spec
/// accepts (deduplicated). Empty when no extension is accepted.
std::vector<SpecState> final_states(const History& h, const SeqSpec& spec);

}  // namespace polarize

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "polarize/hash.hpp"
#include "polarize/value.hpp"

namespace polarize {

class SeqSpec;

/// An operation record [id : (thread, op, arg, result)]. An empty result is
/// the `todo` marker of an uncompleted event.
struct Event {
  EventId id = 0;
  ThreadId thread = 0;
  Op op = Op::Enq;
  Value arg;
  std::optional<Value> result;

  bool completed() const { return result.has_value(); }

  friend bool operator==(const Event&, const Event&) = default;
};

std::string to_string(const Event& e);

using Edge = std::pair<EventId, EventId>;

/// Raised when a history update breaks the discipline of adding edges and
/// completing events. Each subclass is a checker verdict: the
/// instrumentation that requested the update is wrong.
class HistoryError : public std::runtime_error {
 public:
  HistoryError(const std::string& what, std::vector<EventId> ids)
      : std::runtime_error(what), ids_(std::move(ids)) {}
  const std::vector<EventId>& ids() const { return ids_; }

 private:
  std::vector<EventId> ids_;
};

class CycleError : public HistoryError {
 public:
  using HistoryError::HistoryError;
};

class SourceUncompleted : public HistoryError {
 public:
  using HistoryError::HistoryError;
};

class AlreadyCompleted : public HistoryError {
 public:
  using HistoryError::HistoryError;
};

class UnknownEvent : public HistoryError {
 public:
  using HistoryError::HistoryError;
};

/// A finite set of events plus a strict partial order over their ids (the
/// real-time order R). The order is stored transitively closed as one
/// successor bitset per event, so histories hold at most kMaxEvents events.
///
/// Mutators that go through add_edges/complete keep the history
/// well-formed; the *_raw entry points exist for deserialization and for
/// building deliberately broken histories in tests.
class History {
 public:
  static constexpr std::size_t kMaxEvents = 64;

  /// Adds a fresh uncompleted event with the next unused id. No edges.
  EventId add_event(ThreadId thread, Op op, Value arg);
  /// Inserts an event with a caller-chosen id. Throws std::invalid_argument
  /// on a duplicate id.
  void insert_event_raw(const Event& e);
  /// Records a ≺ b without closure or checks.
  void add_order_raw(EventId a, EventId b);
  /// Recomputes the transitive closure of the stored order.
  void close_raw();

  /// Adds the edges and transitively closes the order. Throws CycleError
  /// when the closure would relate an id to itself and SourceUncompleted
  /// when a new edge leaves an uncompleted event. On error the history is
  /// left unchanged.
  void add_edges(std::span<const Edge> edges);
  /// Fills in the result of an uncompleted event. Throws AlreadyCompleted.
  void complete(EventId id, Value result);

  bool contains(EventId id) const { return position(id).has_value(); }
  const Event& event(EventId id) const;
  const std::vector<Event>& events() const { return events_; }
  std::size_t size() const { return events_.size(); }
  bool empty() const { return events_.empty(); }
  EventId next_id() const { return next_id_; }

  bool precedes(EventId a, EventId b) const;
  /// All pairs of the (closed) order, sorted.
  std::vector<Edge> order() const;
  std::size_t order_size() const;

  /// last(t, H): the R-maximal event of thread t, if t has any event.
  std::optional<EventId> last_of(ThreadId t) const;

  // Position-based access; position i is events()[i].
  std::optional<std::size_t> position(EventId id) const;
  std::uint64_t successors(std::size_t pos) const { return succ_[pos]; }
  std::uint64_t predecessors(std::size_t pos) const;
  std::uint64_t completed_mask() const;

  friend bool operator==(const History& a, const History& b) {
    return a.events_ == b.events_ && a.succ_ == b.succ_;
  }
  friend void hash_into(Hasher& h, const History& hist);

 private:
  std::size_t require(EventId id) const;

  std::vector<Event> events_;       // sorted by id
  std::vector<std::uint64_t> succ_;  // succ_[i] bit j: events_[i] ≺ events_[j]
  EventId next_id_ = 0;
};

void hash_into(Hasher& h, const Value& v);
void hash_into(Hasher& h, const Event& e);

enum class WfRule {
  Irreflexive,
  Transitive,
  ThreadTotal,
  UncompletedMaximal,
  IntervalOrder,
};

std::string_view rule_name(WfRule rule);

/// One failed well-formedness condition with the ids that witness it.
struct WfViolation {
  WfRule rule;
  std::vector<EventId> ids;

  friend bool operator==(const WfViolation&, const WfViolation&) = default;
};

/// Checks the five well-formedness conditions of a history. Empty result
/// iff the history is well-formed.
std::vector<WfViolation> check_wf(const History& h);

/// Pure counterparts of the mutators.
History add_edges(const History& h, std::span<const Edge> edges);
History complete_event(const History& h, EventId id, Value result);

/// ⌊h⌋: drops uncompleted events and their incident edges.
History floor(const History& h);

/// h1 ≼ h2: same events (ids and records) and order(h1) ⊆ order(h2).
bool refines(const History& h1, const History& h2);

/// Edges of the transitive reduction (Hasse diagram), sorted.
std::vector<Edge> transitive_reduction(const History& h);

/// A sequential history: completed events listed in order.
using SeqHistory = std::vector<Event>;

struct ExtensionSummary {
  std::size_t yielded = 0;
  /// With pruning: whether some extension (or prefix) failed the spec.
  bool rejected_any = false;
  bool stopped = false;
};

/// Enumerates the linear extensions of h's order, depth first by minimal
/// elements. `visit` returns false to stop. With `prune`, prefixes whose
/// replay fails the spec are cut, so only spec-satisfying extensions are
/// yielded. Precondition: all events completed (apply floor first).
ExtensionSummary for_each_linear_extension(const History& h,
                                           const std::function<bool(const SeqHistory&)>& visit,
                                           const SeqSpec* prune = nullptr);

std::vector<SeqHistory> linear_extensions(const History& h, const SeqSpec* prune = nullptr);

/// The sequential history as a History with a total order.
History to_history(const SeqHistory& seq);

}  // namespace polarize

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "polarize/history.hpp"
#include "polarize/value.hpp"

namespace polarize {

/// Abstract state of a sequential specification. Queue: contents front
/// first. Set: members in ascending order.
using SpecState = std::vector<std::int64_t>;

struct SpecOutcome {
  SpecState state;
  Value ret;

  friend bool operator==(const SpecOutcome&, const SpecOutcome&) = default;
};

/// A sequential specification as a replayable state machine. `apply` may
/// return several outcomes (nondeterminism) or none (the call is not
/// allowed in that state).
class SeqSpec {
 public:
  virtual ~SeqSpec() = default;
  virtual std::string_view name() const = 0;
  virtual SpecState initial() const = 0;
  virtual std::vector<SpecOutcome> apply(const SpecState& st, Op op, Value arg) const = 0;
};

/// FIFO queue. Dequeue on an empty queue has no outcome: it is undefined
/// rather than returning a distinguished empty value.
class QueueSpec final : public SeqSpec {
 public:
  std::string_view name() const override { return "queue"; }
  SpecState initial() const override { return {}; }
  std::vector<SpecOutcome> apply(const SpecState& st, Op op, Value arg) const override;
};

/// Integer set with insert/remove/contains returning booleans.
class SetSpec final : public SeqSpec {
 public:
  std::string_view name() const override { return "set"; }
  SpecState initial() const override { return {}; }
  std::vector<SpecOutcome> apply(const SpecState& st, Op op, Value arg) const override;
};

const QueueSpec& queue_spec();
const SetSpec& set_spec();

/// Looks up "queue" or "set". Throws std::invalid_argument otherwise.
const SeqSpec& spec_by_name(std::string_view name);

/// Whether replaying the events from the initial state can reproduce every
/// recorded return value. Threads are ignored. Nondeterministic outcomes are
/// searched exhaustively.
bool member(std::span<const Event> seq, const SeqSpec& spec);

/// Replays one event from every state in `states`, keeping the successor
/// states whose return value matches the event's result.
std::vector<SpecState> replay_step(const std::vector<SpecState>& states, const Event& e, const SeqSpec& spec);

}  // namespace polarize

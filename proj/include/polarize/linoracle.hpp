#pragma once

#include <optional>
#include <vector>

#include "polarize/commitment.hpp"
#include "polarize/history.hpp"
#include "polarize/seqspec.hpp"

namespace polarize {

struct LinVerdict {
  bool linearizable = false;
  /// On success: the completion h1 (dropped or completed pending events)
  /// and a sequential history h2 with h1 ≼ h2 accepted by the spec.
  std::optional<History> completion;
  std::optional<SeqHistory> witness;
  /// Number of distinct search nodes expanded; with a failure this is the
  /// size of the exhaustion proof.
  std::size_t explored = 0;
};

/// Classical linearizability by brute force. Pending events are either
/// dropped or completed with some value from `retvals`; completed events keep
/// their results. Throws SizeLimit when h has more than `max_events` events.
LinVerdict is_linearizable(const History& h, const SeqSpec& spec, const std::vector<Value>& retvals,
                           std::size_t max_events = 24);

/// Queue: every enqueued value plus ⊥. Set: true and false.
std::vector<Value> default_retvals(const SeqSpec& spec, const History& h);

/// The one-sided agreement check: when the abstract-history method passed,
/// the concrete history must be linearizable. Returns false on a
/// discrepancy; a failed method verdict is never a discrepancy.
bool crosscheck(bool method_passed, const History& concrete, const SeqSpec& spec, std::size_t max_events = 24);

}  // namespace polarize

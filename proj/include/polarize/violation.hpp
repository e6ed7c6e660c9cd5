#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "polarize/value.hpp"

namespace polarize {

/// Report categories. CommitRejected and HistoryUpdate are checker verdicts
/// (the instrumentation broke the update discipline); Abstraction means a
/// linearization of the abstract history fails the sequential spec;
/// Discrepancy means the abstract-history checks passed but the classical
/// oracle rejected the concrete history.
enum class Category {
  WellFormedness,
  HistoryUpdate,
  CommitRejected,
  Invariant,
  LoopInvariant,
  Transition,
  Abstraction,
  Discrepancy,
};

std::string_view category_name(Category c);

struct Violation {
  Category category;
  std::string rule;
  std::vector<EventId> witness;
  std::string detail;

  friend bool operator==(const Violation&, const Violation&) = default;
};

using Violations = std::vector<Violation>;

}  // namespace polarize

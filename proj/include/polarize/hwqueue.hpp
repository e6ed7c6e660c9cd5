#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "polarize/commitment.hpp"
#include "polarize/simsched.hpp"

namespace polarize::hw {

struct Shared {
  std::uint32_t back = 0;
  // Grows on demand; cells at index ≥ back are NULL.
  std::vector<std::optional<std::int64_t>> array;

  std::optional<std::int64_t> cell(std::uint32_t k) const { return k < array.size() ? array[k] : std::nullopt; }

  friend bool operator==(const Shared&, const Shared&) = default;
};

inline void hash_into(Hasher& h, const Shared& s) {
  h.mix(s.back);
  h.mix(s.array.size());
  for (const auto& c : s.array) {
    h.mix(c.has_value());
    h.mix(static_cast<std::uint64_t>(c.value_or(0)));
  }
}

enum class Pc : std::uint8_t { Idle, GetSlot, Insert, ReadBack, Swap };

struct Locals {
  Pc pc = Pc::Idle;
  std::uint32_t k = 0;
  std::uint32_t n = 0;

  friend bool operator==(const Locals&, const Locals&) = default;
};

inline void hash_into(Hasher& h, const Locals& l) {
  h.mix(static_cast<std::uint64_t>(l.pc));
  h.mix(l.k);
  h.mix(l.n);
}

using Slot = std::uint32_t;
using Config = Configuration<Shared, Locals, Slot>;

/// The three phases of an enqueue that holds a slot.
struct Phases {
  std::vector<EventId> with_slot;  // uncompleted, slot still NULL
  std::vector<EventId> untaken;    // completed, value still in its slot
  std::vector<EventId> taken;      // completed, value removed
};

Phases hw_sets(const Config& cfg);

/// getEvent(k): the enqueue holding slot k.
std::optional<EventId> enq_at(const Config& cfg, Slot k);

void check_hw_inv(const Config& cfg, Violations& out);
void check_hw_loop_inv(const Config& cfg, ThreadId t, Violations& out);

struct Machine {
  using Config = hw::Config;
  static constexpr std::string_view name = "hwqueue";

  static const SeqSpec& spec() { return queue_spec(); }
  static Config initial(std::size_t threads);
  static void begin(Config& cfg, ThreadId t, const Call& call);
  static std::size_t arity(const Config& cfg, ThreadId t);
  static StepStatus step(Config& cfg, ThreadId t, std::size_t branch, const Mutations& mut, Violations& out);
  static void check_invariants(const Config& cfg, Violations& out) { check_hw_inv(cfg, out); }
  static void check_loop_invariant(const Config& cfg, ThreadId t, Violations& out) { check_hw_loop_inv(cfg, t, out); }
  static void check_transition(const Config&, const Config&, ThreadId, Violations&) {}
};

}  // namespace polarize::hw

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "polarize/commitment.hpp"
#include "polarize/simsched.hpp"

namespace polarize::ts {

/// Interval timestamp (s, e) with s ≤ e, or ⊤ which exceeds every interval.
struct Timestamp {
  bool top = true;
  std::int64_t s = 0;
  std::int64_t e = 0;

  static constexpr Timestamp max() { return {}; }
  static constexpr Timestamp interval(std::int64_t s, std::int64_t e) { return {false, s, e}; }

  friend bool operator==(const Timestamp&, const Timestamp&) = default;
  std::string to_string() const;
};

inline void hash_into(Hasher& h, const Timestamp& t) {
  h.mix(t.top);
  h.mix(static_cast<std::uint64_t>(t.s));
  h.mix(static_cast<std::uint64_t>(t.e));
}

/// (s1,e1) <_TS (s2,e2) iff e1 < s2; every interval is below ⊤.
bool ts_lt(const Timestamp& a, const Timestamp& b);

using PoolId = std::uint64_t;  // 0 is NULL; otherwise (thread << 32) | per-thread insert count
inline constexpr PoolId kNull = 0;

struct PoolEntry {
  PoolId pid = kNull;
  std::int64_t value = 0;
  Timestamp ts;

  friend bool operator==(const PoolEntry&, const PoolEntry&) = default;
};

inline void hash_into(Hasher& h, const PoolEntry& p) {
  h.mix(p.pid);
  h.mix(static_cast<std::uint64_t>(p.value));
  hash_into(h, p.ts);
}

using Pool = std::vector<PoolEntry>;

struct Shared {
  std::vector<Pool> pools;
  std::int64_t counter = 1;
  std::vector<std::uint32_t> inserted;  // per-thread insert counts, for pool ids

  friend bool operator==(const Shared&, const Shared&) = default;
};

inline void hash_into(Hasher& h, const Shared& s) {
  hash_into(h, s.pools);
  h.mix(static_cast<std::uint64_t>(s.counter));
  hash_into(h, s.inserted);
}

// SP pool operations; each is one atomic step.
PoolId pool_insert(Shared& s, ThreadId t, std::int64_t v);
void pool_set_timestamp(Shared& s, ThreadId t, PoolId p, const Timestamp& ts);
struct Oldest {
  PoolId pid = kNull;
  std::optional<Timestamp> ts;
};
Oldest pool_get_oldest(const Shared& s, ThreadId t);
std::optional<std::int64_t> pool_remove(Shared& s, ThreadId t, PoolId p);

/// The counter-based timestamp generator as a step machine: read counter;
/// CAS; on CAS failure, read counter again.
struct TimestampGen {
  enum class Pc : std::uint8_t { Read, Cas, Reread, Done };
  Pc pc = Pc::Read;
  std::int64_t old = 0;
  Timestamp result;

  /// One atomic step against the shared counter. True once result is set.
  bool step(std::int64_t& counter);

  friend bool operator==(const TimestampGen&, const TimestampGen&) = default;
};

inline void hash_into(Hasher& h, const TimestampGen& g) {
  h.mix(static_cast<std::uint64_t>(g.pc));
  h.mix(static_cast<std::uint64_t>(g.old));
  hash_into(h, g.result);
}

enum class Pc : std::uint8_t { Idle, EnqInsert, NewTs, EnqSetTs, DeqScan, DeqRemove };

struct Locals {
  Pc pc = Pc::Idle;
  bool dequeue = false;
  TimestampGen gen;
  // enqueue
  PoolId node = kNull;
  Timestamp timestamp;
  // dequeue
  bool has_start = false;
  Timestamp start_ts;
  PoolId cand_pid = kNull;
  Timestamp cand_ts;
  ThreadId cand_tid = 0;
  std::optional<EventId> cand;  // ghost CAND
  std::uint32_t k = 0;
  std::uint32_t iterations = 0;
  std::uint64_t visited = 0;  // the set A, one bit per thread

  friend bool operator==(const Locals&, const Locals&) = default;
};

inline void hash_into(Hasher& h, const Locals& l) {
  h.mix(static_cast<std::uint64_t>(l.pc));
  h.mix(l.dequeue);
  hash_into(h, l.gen);
  h.mix(l.node);
  hash_into(h, l.timestamp);
  h.mix(l.has_start);
  hash_into(h, l.start_ts);
  h.mix(l.cand_pid);
  hash_into(h, l.cand_ts);
  h.mix(l.cand_tid);
  h.mix(l.cand.has_value());
  h.mix(l.cand.value_or(0));
  h.mix(l.k);
  h.mix(l.iterations);
  h.mix(l.visited);
}

using Config = Configuration<Shared, Locals, Timestamp>;

/// enqOf(E, G_ts, t, τ): the enqueue of thread t whose ghost timestamp is τ.
std::optional<EventId> enq_of(const History& h, const Config::Ghost& g, ThreadId t, const Timestamp& ts);
/// inQueue: enqueue events of all values currently in the pools (sorted).
std::vector<EventId> in_queue(const Config& cfg);
/// seen(κ, d) restricted to the visited pools A of d's thread. Empty unless
/// d is the running dequeue of its thread and has its start timestamp.
std::vector<EventId> seen(const Config& cfg, EventId d);

void check_ts_inv(const Config& cfg, Violations& out);
void check_ts_loop_inv(const Config& cfg, ThreadId t, Violations& out);
/// Environment-step property: seen sets of other threads' dequeues do not grow.
void check_ts_transition(const Config& before, const Config& after, ThreadId actor, Violations& out);
/// The same_data surrogate: every accepted linearization of the completed
/// part ends in a queue holding the same multiset of values as the pools
/// hold for completed enqueues.
void check_ts_same_data(const Config& cfg, Violations& out);

struct Machine {
  using Config = ts::Config;
  static constexpr std::string_view name = "tsqueue";

  static const SeqSpec& spec() { return queue_spec(); }
  static Config initial(std::size_t threads);
  static void begin(Config& cfg, ThreadId t, const Call& call);
  static std::size_t arity(const Config& cfg, ThreadId t);
  static StepStatus step(Config& cfg, ThreadId t, std::size_t branch, const Mutations& mut, Violations& out);
  static void check_invariants(const Config& cfg, Violations& out) {
    check_ts_inv(cfg, out);
    check_ts_same_data(cfg, out);
  }
  static void check_loop_invariant(const Config& cfg, ThreadId t, Violations& out) { check_ts_loop_inv(cfg, t, out); }
  static void check_transition(const Config& before, const Config& after, ThreadId actor, Violations& out) {
    check_ts_transition(before, after, actor, out);
  }
};

}  // namespace polarize::ts

#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "polarize/commitment.hpp"
#include "polarize/simsched.hpp"

namespace polarize::optset {

using NodeId = std::uint32_t;

inline constexpr NodeId kHead = 0;
inline constexpr NodeId kTail = 1;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();
inline constexpr std::int64_t kMinusInf = std::numeric_limits<std::int64_t>::min();
inline constexpr std::int64_t kPlusInf = std::numeric_limits<std::int64_t>::max();

/// The node allocated by a successful insert is named after its event, so
/// equal structures reached by different interleavings hash equally.
inline NodeId node_of_event(EventId e) { return e + 2; }

struct Node {
  NodeId next = kNoNode;
  std::int64_t val = 0;
  bool marked = false;
  bool live = false;  // allocated; nodes are never freed

  friend bool operator==(const Node&, const Node&) = default;
};

inline void hash_into(Hasher& h, const Node& n) {
  h.mix(n.next);
  h.mix(static_cast<std::uint64_t>(n.val));
  h.mix(n.marked);
  h.mix(n.live);
}

struct Shared {
  std::vector<Node> nodes;

  Shared();

  bool has(NodeId n) const { return n < nodes.size() && nodes[n].live; }
  const Node& node(NodeId n) const { return nodes.at(n); }
  Node& node(NodeId n) { return nodes.at(n); }
  NodeId allocate(NodeId id, std::int64_t val, NodeId next);
  /// Live nodes reachable from `from` (including itself), in chain order.
  std::vector<NodeId> chain(NodeId from) const;
  bool reaches(NodeId from, NodeId to) const;
  /// Unmarked values in list order, sentinels excluded.
  std::vector<std::int64_t> members() const;

  friend bool operator==(const Shared&, const Shared&) = default;
};

inline void hash_into(Hasher& h, const Shared& s) { hash_into(h, s.nodes); }

enum class Pc : std::uint8_t { Idle, ReadHead, Traverse, Validate };

struct Locals {
  Pc pc = Pc::Idle;
  Op op = Op::Contains;
  std::int64_t v = 0;
  NodeId prev = kHead;
  NodeId curr = kNoNode;

  friend bool operator==(const Locals&, const Locals&) = default;
};

inline void hash_into(Hasher& h, const Locals& l) {
  h.mix(static_cast<std::uint64_t>(l.pc));
  h.mix(static_cast<std::uint64_t>(l.op));
  h.mix(static_cast<std::uint64_t>(l.v));
  h.mix(l.prev);
  h.mix(l.curr);
}

using Config = Configuration<Shared, Locals, NodeId>;

/// insOf(E, n): the successful insert that allocated n.
std::optional<EventId> ins_of(const Config& cfg, NodeId n);
/// remOf(E, n): the successful remove that marked n.
std::optional<EventId> rem_of(const Config& cfg, NodeId n);

struct LastRemove {
  std::optional<EventId> id;  // ⊥ when v was never removed
  bool defined = true;        // false if the successful removes have no R-maximum
};

/// lastRemOf(E, R, v): the R-last successful remove of v.
LastRemove last_rem_of(const History& h, std::int64_t v);

void check_set_inv(const Config& cfg, Violations& out);
void check_set_loop_inv(const Config& cfg, ThreadId t, Violations& out);

struct Machine {
  using Config = optset::Config;
  static constexpr std::string_view name = "optset";

  static const SeqSpec& spec() { return set_spec(); }
  static Config initial(std::size_t threads);
  static void begin(Config& cfg, ThreadId t, const Call& call);
  static std::size_t arity(const Config& cfg, ThreadId t);
  static StepStatus step(Config& cfg, ThreadId t, std::size_t branch, const Mutations& mut, Violations& out);
  static void check_invariants(const Config& cfg, Violations& out) { check_set_inv(cfg, out); }
  static void check_loop_invariant(const Config& cfg, ThreadId t, Violations& out) { check_set_loop_inv(cfg, t, out); }
  /// contains never writes a node.
  static void check_transition(const Config& before, const Config& after, ThreadId t, Violations& out);
};

}  // namespace polarize::optset

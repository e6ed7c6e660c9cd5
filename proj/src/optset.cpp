#include "polarize/optset.hpp"

#include <algorithm>

namespace polarize::optset {
namespace {

void report(Violations& out, Category c, std::string rule, std::vector<EventId> ids, std::string detail = {}) {
  out.push_back({c, std::move(rule), std::move(ids), std::move(detail)});
}

bool same_arg(const Event& e, std::int64_t v) { return e.arg.is_int() && e.arg.as_int() == v; }

bool succeeded(const Event& e) { return e.completed() && e.result->is_bool() && e.result->as_bool(); }

std::optional<EventId> owner(const Config& cfg, NodeId n, Op op) {
  for (const auto& [id, node] : cfg.ghost) {
    if (node != n || !cfg.history.contains(id)) continue;
    const Event& e = cfg.history.event(id);
    if (e.op == op && succeeded(e)) return id;
  }
  return std::nullopt;
}

std::string node_name(const Shared& s, NodeId n) {
  if (n == kHead) return "head";
  if (n == kTail) return "tail";
  return "node(" + std::to_string(s.node(n).val) + ")#" + std::to_string(n);
}

void restart(Locals& l) {
  l.pc = Pc::ReadHead;
  l.prev = kHead;
  l.curr = kNoNode;
}

// After reading curr: either keep walking, or stop. Returns true when the
// traversal has found its window.
bool arrived(const Config& cfg, const Locals& l) { return cfg.state.node(l.curr).val >= l.v; }

// The appendix lemmas, checked at the commitment point before it orders
// anything: no successful remove of v lies between insOf(curr) and the
// contains (found), no successful insert of v between lastRemOf(v) and it
// (not found).
void check_contains_lemmas(const Config& cfg, EventId me, bool found, std::optional<EventId> obs, Violations& out) {
  const History& h = cfg.history;
  const auto v = cfg.locals[h.event(me).thread].v;
  for (const auto& e : h.events()) {
    if (!same_arg(e, v) || !succeeded(e)) continue;
    if (found && e.op == Op::Remove && obs && h.precedes(*obs, e.id) && h.precedes(e.id, me)) {
      report(out, Category::LoopInvariant, "contains-true", {*obs, e.id, me}, "successful remove between insOf and contains");
    }
    if (!found && e.op == Op::Insert && (!obs || h.precedes(*obs, e.id)) && h.precedes(e.id, me)) {
      report(out, Category::LoopInvariant, "contains-false", {e.id, me}, "successful insert before a contains returning false");
    }
  }
}

void commit_contains(Config& cfg, ThreadId t, Violations& out) {
  auto& l = cfg.locals[t];
  const EventId me = my_eid(cfg, t);
  const bool found = cfg.state.node(l.curr).val == l.v;
  std::optional<EventId> obs;
  if (found) {
    obs = ins_of(cfg, l.curr);
    if (!obs) report(out, Category::Invariant, "insOf", {me}, "found " + node_name(cfg.state, l.curr) + " has no insert");
  } else {
    const auto last = last_rem_of(cfg.history, l.v);
    if (!last.defined) report(out, Category::Invariant, "lastRemOf", {me}, "successful removes are not linearly ordered");
    obs = last.id;
  }
  check_contains_lemmas(cfg, me, found, obs, out);

  const History& h = cfg.history;
  std::vector<Edge> edges;
  if (obs) edges.emplace_back(*obs, me);
  // i ⊀ myEid is judged after the obs edge is in place.
  const auto before_me = [&](EventId i) { return h.precedes(i, me) || (obs && (i == *obs || h.precedes(i, *obs))); };
  for (const auto& e : h.events()) {
    if (e.id != me && same_arg(e, l.v) && !before_me(e.id)) edges.emplace_back(me, e.id);
  }
  const Value res = Value::boolean(found);
  apply_commit(cfg, t, CommitAction<NodeId>{}.complete(me, res).edges(std::move(edges)));
  cfg.res[t] = res;
  l = {};
}

// OrderInsRem: completed same-argument events first, then myEid before the
// uncompleted same-argument inserts and removes.
CommitAction<NodeId> order_ins_rem(const Config& cfg, EventId me, std::int64_t v) {
  std::vector<Edge> before, after;
  for (const auto& e : cfg.history.events()) {
    if (e.id == me || !same_arg(e, v)) continue;
    if (e.completed()) {
      before.emplace_back(e.id, me);
    } else if (e.op != Op::Contains) {
      after.emplace_back(me, e.id);
    }
  }
  CommitAction<NodeId> act;
  act.edges(std::move(before)).edges(std::move(after));
  return act;
}

}  // namespace

Shared::Shared() {
  nodes.resize(2);
  nodes[kHead] = {kTail, kMinusInf, false, true};
  nodes[kTail] = {kNoNode, kPlusInf, false, true};
}

NodeId Shared::allocate(NodeId id, std::int64_t val, NodeId next) {
  if (has(id)) throw std::logic_error("node " + std::to_string(id) + " allocated twice");
  if (nodes.size() <= id) nodes.resize(id + 1);
  nodes[id] = {next, val, false, true};
  return id;
}

std::vector<NodeId> Shared::chain(NodeId from) const {
  std::vector<NodeId> out;
  for (NodeId n = from; has(n); n = nodes[n].next) {
    if (std::find(out.begin(), out.end(), n) != out.end()) break;  // cycle: malformed store
    out.push_back(n);
  }
  return out;
}

bool Shared::reaches(NodeId from, NodeId to) const {
  const auto c = chain(from);
  return std::find(c.begin(), c.end(), to) != c.end();
}

std::vector<std::int64_t> Shared::members() const {
  std::vector<std::int64_t> out;
  for (auto n : chain(kHead)) {
    if (n != kHead && n != kTail) out.push_back(nodes[n].val);
  }
  return out;
}

std::optional<EventId> ins_of(const Config& cfg, NodeId n) { return owner(cfg, n, Op::Insert); }
std::optional<EventId> rem_of(const Config& cfg, NodeId n) { return owner(cfg, n, Op::Remove); }

LastRemove last_rem_of(const History& h, std::int64_t v) {
  std::vector<EventId> removes;
  for (const auto& e : h.events()) {
    if (e.op == Op::Remove && same_arg(e, v) && succeeded(e)) removes.push_back(e.id);
  }
  if (removes.empty()) return {};
  for (auto r : removes) {
    const bool last = std::all_of(removes.begin(), removes.end(), [&](EventId o) { return o == r || h.precedes(o, r); });
    if (last) return {r, true};
  }
  return {std::nullopt, false};
}

void check_set_inv(const Config& cfg, Violations& out) {
  const History& h = cfg.history;
  const Shared& s = cfg.state;

  // INV_ORD: completed inserts and removes of one value are totally ordered.
  const auto& evs = h.events();
  for (std::size_t a = 0; a < evs.size(); ++a) {
    const Event& e = evs[a];
    if (e.op == Op::Contains || !e.completed()) continue;
    for (std::size_t b = a + 1; b < evs.size(); ++b) {
      const Event& f = evs[b];
      if (f.op == Op::Contains || !f.completed() || !(f.arg == e.arg)) continue;
      if (!h.precedes(e.id, f.id) && !h.precedes(f.id, e.id)) report(out, Category::Invariant, "INV_ORD", {e.id, f.id});
    }
  }

  const auto head_chain = s.chain(kHead);
  const auto from_head = [&](NodeId n) { return std::find(head_chain.begin(), head_chain.end(), n) != head_chain.end(); };

  for (NodeId n = 0; n < s.nodes.size(); ++n) {
    if (!s.has(n)) continue;
    const Node& node = s.node(n);
    const bool sentinel = n == kHead || n == kTail;
    const auto ins = ins_of(cfg, n);
    const auto rem = rem_of(cfg, n);

    // No successful insert or remove of the node's value between the two.
    const auto quiet_between = [&](std::optional<EventId> lo, std::optional<EventId> hi, const char* rule) {
      for (const auto& e : evs) {
        if (e.op == Op::Contains || !succeeded(e) || !same_arg(e, node.val)) continue;
        if (e.id == *lo || (hi && e.id == *hi)) continue;
        if (h.precedes(*lo, e.id) && (!hi || h.precedes(e.id, *hi))) report(out, Category::Invariant, rule, {*lo, e.id});
      }
    };

    if (!sentinel) {
      if (!node.marked) {
        // (i)
        if (!ins || rem) {
          report(out, Category::Invariant, "INV_ALG(i)", ins ? std::vector{*ins} : std::vector<EventId>{},
                 node_name(s, n) + (ins ? " has a remove" : " has no insert"));
        } else {
          quiet_between(ins, std::nullopt, "INV_ALG(i)");
        }
      } else {
        // (ii)
        if (!ins || !rem) {
          report(out, Category::Invariant, "INV_ALG(ii)", {}, node_name(s, n) + " lacks its insert or remove");
        } else {
          quiet_between(ins, rem, "INV_ALG(ii)");
        }
      }
      // (iv)
      if (ins && rem && !h.precedes(*ins, *rem)) report(out, Category::Invariant, "INV_ALG(iv)", {*ins, *rem});
    }

    // (iii) values strictly increase along every chain.
    const auto c = s.chain(n);
    for (std::size_t i = 1; i < c.size(); ++i) {
      if (!(s.node(c[i - 1]).val < s.node(c[i]).val)) {
        report(out, Category::Invariant, "INV_ALG(iii)", {}, node_name(s, c[i - 1]) + " -> " + node_name(s, c[i]));
      }
    }
    // (v)
    if (from_head(n) == node.marked) {
      report(out, Category::Invariant, "INV_ALG(v)", {}, node_name(s, n) + (node.marked ? " marked but reachable" : " unmarked but unreachable"));
    }
    // (vi)
    if (c.empty() || c.back() != kTail) report(out, Category::Invariant, "INV_ALG(vi)", {}, node_name(s, n) + " does not reach tail");
  }

  // INV_WF(i, ii)
  for (const auto& e : evs) {
    if (e.op == Op::Contains) {
      if (cfg.ghost.contains(e.id)) report(out, Category::Invariant, "INV_WF(i)", {e.id}, "contains has a node");
      continue;
    }
    const bool mapped = cfg.ghost.contains(e.id);
    if (succeeded(e) != mapped) report(out, Category::Invariant, "INV_WF(i)", {e.id});
    if (mapped) {
      const NodeId n = cfg.ghost.at(e.id);
      if (!s.has(n) || !same_arg(e, s.node(n).val)) report(out, Category::Invariant, "INV_WF(ii)", {e.id});
    }
  }
}

void check_set_loop_inv(const Config& cfg, ThreadId t, Violations& out) {
  const auto& l = cfg.locals[t];
  if (l.op != Op::Contains || l.pc != Pc::Traverse) return;
  const auto me = current_event(cfg.history, t);
  if (!me) return;
  const Shared& s = cfg.state;
  const History& h = cfg.history;
  const auto ahead = s.chain(l.curr);
  for (NodeId n = 2; n < s.nodes.size(); ++n) {
    if (!s.has(n) || s.node(n).val != l.v) continue;
    const bool reachable = std::find(ahead.begin(), ahead.end(), n) != ahead.end();
    if (reachable) {
      const auto rem = rem_of(cfg, n);
      if (s.node(n).marked && rem && h.precedes(*rem, *me)) report(out, Category::LoopInvariant, "LI(reachable)", {*rem, *me}, node_name(s, n));
    } else {
      const auto ins = ins_of(cfg, n);
      if (!s.node(n).marked && ins && h.precedes(*ins, *me)) report(out, Category::LoopInvariant, "LI(unreachable)", {*ins, *me}, node_name(s, n));
    }
  }
}

// ---------------------------------------------------------------------------
// Step machine

Config Machine::initial(std::size_t threads) {
  Config cfg;
  cfg.locals.assign(threads, {});
  cfg.arg.assign(threads, Value::unit());
  cfg.res.assign(threads, Value::unit());
  return cfg;
}

void Machine::begin(Config& cfg, ThreadId t, const Call& call) {
  if (call.op != Op::Insert && call.op != Op::Remove && call.op != Op::Contains) {
    throw std::invalid_argument("optset does not support " + std::string(op_name(call.op)));
  }
  if (!call.arg.is_int()) throw std::invalid_argument("optset arguments are integers");
  auto& l = cfg.locals[t];
  l = {};
  l.op = call.op;
  l.v = call.arg.as_int();
  restart(l);
}

std::size_t Machine::arity(const Config& cfg, ThreadId t) { return cfg.locals[t].pc == Pc::Idle ? 0 : 1; }

StepStatus Machine::step(Config& cfg, ThreadId t, std::size_t, const Mutations& mut, Violations& out) {
  auto& l = cfg.locals[t];
  switch (l.pc) {
    case Pc::Idle:
      throw Blocked("thread is idle");

    case Pc::ReadHead:
    case Pc::Traverse: {
      // curr := prev.next. The first read also carries the contains
      // commitment, for lists whose first node already ends the search.
      if (l.pc == Pc::Traverse) l.prev = l.curr;
      l.curr = cfg.state.node(l.prev).next;
      if (!arrived(cfg, l)) {
        l.pc = Pc::Traverse;
        return StepStatus::Running;
      }
      if (l.op == Op::Contains) {
        commit_contains(cfg, t, out);
        return StepStatus::Finished;
      }
      l.pc = Pc::Validate;
      return StepStatus::Running;
    }

    case Pc::Validate: {
      const Node& p = cfg.state.node(l.prev);
      if (!mut.set_skip_validation && (p.next != l.curr || p.marked)) {
        restart(l);
        return StepStatus::Retry;
      }
      const EventId me = my_eid(cfg, t);
      const NodeId c = l.curr;
      const bool present = cfg.state.node(c).val == l.v;
      const bool ok = l.op == Op::Insert ? !present : present;
      CommitAction<NodeId> act;
      act.complete(me, Value::boolean(ok));
      if (ok) act.ghost(me, l.op == Op::Insert ? node_of_event(me) : c);
      act.then(order_ins_rem(cfg, me, l.v));
      apply_commit(cfg, t, act);
      if (ok && l.op == Op::Insert) {
        cfg.state.allocate(node_of_event(me), l.v, c);
        cfg.state.node(l.prev).next = node_of_event(me);
      } else if (ok) {
        cfg.state.node(c).marked = true;
        cfg.state.node(l.prev).next = cfg.state.node(c).next;
      }
      cfg.res[t] = Value::boolean(ok);
      l = {};
      return StepStatus::Finished;
    }
  }
  return StepStatus::Running;
}

void Machine::check_transition(const Config& before, const Config& after, ThreadId t, Violations& out) {
  if (before.locals[t].op == Op::Contains && before.locals[t].pc != Pc::Idle && !(before.state == after.state)) {
    report(out, Category::Transition, "contains-read-only", {}, "contains modified the list");
  }
}

}  // namespace polarize::optset

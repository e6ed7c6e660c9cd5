#include "polarize/hwqueue.hpp"

#include <algorithm>

namespace polarize::hw {
namespace {

bool in(const std::vector<EventId>& xs, EventId x) { return std::find(xs.begin(), xs.end(), x) != xs.end(); }

void report(Violations& out, Category c, std::string rule, std::vector<EventId> ids, std::string detail = {}) {
  out.push_back({c, std::move(rule), std::move(ids), std::move(detail)});
}

void restart(Locals& l) {
  l.pc = Pc::ReadBack;
  l.k = 0;
  l.n = 0;
}

}  // namespace

Phases hw_sets(const Config& cfg) {
  Phases out;
  for (const auto& [id, slot] : cfg.ghost) {
    if (!cfg.history.contains(id)) continue;
    const Event& e = cfg.history.event(id);
    if (e.op != Op::Enq) continue;
    const auto cell = cfg.state.cell(slot);
    if (!e.completed()) {
      if (!cell) out.with_slot.push_back(id);
    } else if (!cell) {
      out.taken.push_back(id);
    } else if (Value::integer(*cell) == e.arg) {
      out.untaken.push_back(id);
    }
  }
  return out;
}

std::optional<EventId> enq_at(const Config& cfg, Slot k) {
  for (const auto& [id, slot] : cfg.ghost) {
    if (slot == k) return id;
  }
  return std::nullopt;
}

void check_hw_inv(const Config& cfg, Violations& out) {
  const History& h = cfg.history;
  const auto sets = hw_sets(cfg);

  // INV_ORD: completed dequeues precede uncompleted ones.
  for (const auto& d : h.events()) {
    if (d.op != Op::Deq || !d.completed()) continue;
    for (const auto& d2 : h.events()) {
      if (d2.op == Op::Deq && !d2.completed() && !h.precedes(d.id, d2.id)) {
        report(out, Category::Invariant, "INV_ORD", {d.id, d2.id});
      }
    }
  }
  // INV_ALG: untaken enqueues are ordered only along the array.
  for (auto e1 : sets.untaken) {
    for (auto e2 : sets.untaken) {
      if (h.precedes(e1, e2) && !(cfg.ghost.at(e1) < cfg.ghost.at(e2))) {
        report(out, Category::Invariant, "INV_ALG", {e1, e2},
               "slots " + std::to_string(cfg.ghost.at(e1)) + " and " + std::to_string(cfg.ghost.at(e2)));
      }
    }
  }
  // INV_WF(a): slots belong to known events and lie below back.
  for (const auto& [id, slot] : cfg.ghost) {
    if (!h.contains(id) || h.event(id).op != Op::Enq || !(slot < cfg.state.back)) {
      report(out, Category::Invariant, "INV_WF(a)", {id}, "slot " + std::to_string(slot));
    }
  }
  // INV_WF(b): G_slot is injective.
  for (auto a = cfg.ghost.begin(); a != cfg.ghost.end(); ++a) {
    for (auto b = std::next(a); b != cfg.ghost.end(); ++b) {
      if (a->second == b->second) report(out, Category::Invariant, "INV_WF(b)", {a->first, b->first});
    }
  }
  // INV_WF(c, d): a cell is non-NULL exactly when an untaken enqueue owns it;
  // NULL cells are beyond back, unassigned, taken or awaiting their value.
  const auto cells = std::max<std::size_t>(cfg.state.array.size(), cfg.state.back);
  for (Slot k = 0; k < cells; ++k) {
    const auto owner = enq_at(cfg, k);
    const bool untaken = owner && in(sets.untaken, *owner);
    if (cfg.state.cell(k).has_value() != untaken) {
      report(out, Category::Invariant, "INV_WF(c)", owner ? std::vector<EventId>{*owner} : std::vector<EventId>{},
             "slot " + std::to_string(k));
    }
    if (!cfg.state.cell(k)) {
      const bool explained = cfg.state.back <= k || !owner || in(sets.taken, *owner) || in(sets.with_slot, *owner);
      if (!explained) report(out, Category::Invariant, "INV_WF(d)", {*owner}, "slot " + std::to_string(k));
    }
  }
  // Dequeues only ever return values.
  for (const auto& e : h.events()) {
    if (e.op == Op::Deq && e.completed() && !e.result->is_int()) {
      report(out, Category::Invariant, "deq-result", {e.id}, "dequeue completed without a value");
    }
  }
}

void check_hw_loop_inv(const Config& cfg, ThreadId t, Violations& out) {
  const auto& l = cfg.locals[t];
  if (l.pc != Pc::Swap) return;
  const auto me = current_event(cfg.history, t);
  if (!me) return;
  const History& h = cfg.history;
  const auto sets = hw_sets(cfg);
  const auto slot = [&](EventId e) { return cfg.ghost.at(e); };

  // (1) nothing already swept precedes an untaken enqueue still ahead (slots
  // k..n-1, 0-based).
  for (auto e : sets.untaken) {
    if (!(slot(e) < l.k)) continue;
    for (auto e2 : sets.untaken) {
      if (l.k <= slot(e2) && slot(e2) < l.n && h.precedes(e, e2)) {
        report(out, Category::LoopInvariant, "LI(1)", {e, e2});
      }
    }
    // (2) nor the dequeue itself.
    if (h.precedes(e, *me)) report(out, Category::LoopInvariant, "LI(2)", {e, *me});
  }
  // (3)
  if (!(l.n <= cfg.state.back)) report(out, Category::LoopInvariant, "LI(3)", {*me});

  // The enqueue about to be removed is minimal among untaken enqueues.
  if (cfg.state.cell(l.k)) {
    if (const auto enq = enq_at(cfg, l.k)) {
      for (auto e : sets.untaken) {
        if (h.precedes(e, *enq)) report(out, Category::LoopInvariant, "enq-minimal", {e, *enq});
      }
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
  auto& l = cfg.locals[t];
  l = {};
  if (call.op == Op::Enq) {
    l.pc = Pc::GetSlot;
  } else if (call.op == Op::Deq) {
    restart(l);
  } else {
    throw std::invalid_argument("hwqueue does not support " + std::string(op_name(call.op)));
  }
}

std::size_t Machine::arity(const Config& cfg, ThreadId t) { return cfg.locals[t].pc == Pc::Idle ? 0 : 1; }

StepStatus Machine::step(Config& cfg, ThreadId t, std::size_t, const Mutations& mut, Violations&) {
  auto& l = cfg.locals[t];
  const EventId me = my_eid(cfg, t);

  // The emptiness check of the original algorithm: give up after a sweep
  // that found nothing. Only reachable as a mutation.
  const auto swept_empty = [&] {
    if (mut.hw_emptiness) {
      apply_commit(cfg, t, CommitAction<Slot>{}.complete(me, Value::unit()));
      cfg.res[t] = Value::unit();
      l = {};
      return StepStatus::Finished;
    }
    restart(l);
    return StepStatus::Retry;
  };

  switch (l.pc) {
    case Pc::Idle:
      throw Blocked("thread is idle");

    case Pc::GetSlot: {
      l.k = cfg.state.back++;
      if (cfg.state.array.size() < cfg.state.back) cfg.state.array.resize(cfg.state.back);
      apply_commit(cfg, t, CommitAction<Slot>{}.ghost(me, l.k));
      l.pc = Pc::Insert;
      return StepStatus::Running;
    }

    case Pc::Insert: {
      CommitAction<Slot> act;
      if (!mut.hw_no_insert_order) {
        // Enqueues whose values were already taken precede this one.
        std::vector<Edge> edges;
        for (auto e : hw_sets(cfg).taken) edges.emplace_back(e, me);
        act.edges(std::move(edges));
      }
      cfg.state.array[l.k] = cfg.arg[t].as_int();
      apply_commit(cfg, t, act.complete(me, Value::unit()));
      cfg.res[t] = Value::unit();
      l = {};
      return StepStatus::Finished;
    }

    case Pc::ReadBack:
      l.n = cfg.state.back;
      l.k = 0;
      if (l.n == 0) return swept_empty();
      l.pc = Pc::Swap;
      return StepStatus::Running;

    case Pc::Swap: {
      const auto res = cfg.state.cell(l.k);
      if (res) cfg.state.array[l.k].reset();
      if (!res) {
        if (++l.k < l.n) return StepStatus::Running;
        return swept_empty();
      }
      const auto enq = enq_at(cfg, l.k);
      if (!enq) throw std::logic_error("slot " + std::to_string(l.k) + " has no enqueue");
      const Value v = Value::integer(*res);
      std::vector<Edge> edges{{*enq, me}};
      for (auto e : hw_sets(cfg).untaken) edges.emplace_back(*enq, e);
      for (const auto& d : cfg.history.events()) {
        if (d.op == Op::Deq && !d.completed() && d.id != me) edges.emplace_back(me, d.id);
      }
      apply_commit(cfg, t, CommitAction<Slot>{}.complete(me, v).edges(std::move(edges)));
      cfg.res[t] = v;
      l = {};
      return StepStatus::Finished;
    }
  }
  return StepStatus::Running;
}

}  // namespace polarize::hw

#include "polarize/tsqueue.hpp"

#include <algorithm>
#include <unordered_map>

namespace polarize::ts {
namespace {

bool in(const std::vector<EventId>& xs, EventId x) { return std::binary_search(xs.begin(), xs.end(), x); }

std::string ts_text(const Timestamp& t) { return t.to_string(); }

void report(Violations& out, Category c, std::string rule, std::vector<EventId> ids, std::string detail = {}) {
  out.push_back({c, std::move(rule), std::move(ids), std::move(detail)});
}

std::vector<EventId> uncompleted_dequeues(const History& h) {
  std::vector<EventId> out;
  for (const auto& e : h.events()) {
    if (e.op == Op::Deq && !e.completed()) out.push_back(e.id);
  }
  return out;
}

void reset_attempt(Locals& l) {
  l.pc = Pc::NewTs;
  l.gen = {};
  l.has_start = false;
  l.start_ts = {};
  l.cand_pid = kNull;
  l.cand_ts = Timestamp::max();
  l.cand_tid = 0;
  l.cand.reset();
  l.k = 0;
  l.iterations = 0;
  l.visited = 0;
}

}  // namespace

std::string Timestamp::to_string() const {
  if (top) return "⊤";
  return "(" + std::to_string(s) + "," + std::to_string(e) + ")";
}

bool ts_lt(const Timestamp& a, const Timestamp& b) {
  if (a.top) return false;
  if (b.top) return true;
  return a.e < b.s;
}

PoolId pool_insert(Shared& s, ThreadId t, std::int64_t v) {
  const PoolId p = (PoolId{t} << 32) | ++s.inserted.at(t);
  s.pools.at(t).push_back({p, v, Timestamp::max()});
  return p;
}

void pool_set_timestamp(Shared& s, ThreadId t, PoolId p, const Timestamp& ts) {
  for (auto& entry : s.pools.at(t)) {
    if (entry.pid == p) entry.ts = ts;
  }
}

Oldest pool_get_oldest(const Shared& s, ThreadId t) {
  const auto& pool = s.pools.at(t);
  if (pool.empty()) return {};
  return {pool.front().pid, pool.front().ts};
}

std::optional<std::int64_t> pool_remove(Shared& s, ThreadId t, PoolId p) {
  auto& pool = s.pools.at(t);
  const auto it = std::find_if(pool.begin(), pool.end(), [&](const PoolEntry& e) { return e.pid == p; });
  if (it == pool.end()) return std::nullopt;
  const auto v = it->value;
  pool.erase(it);
  return v;
}

bool TimestampGen::step(std::int64_t& counter) {
  switch (pc) {
    case Pc::Read:
      old = counter;
      pc = Pc::Cas;
      return false;
    case Pc::Cas:
      if (counter == old) {
        counter = old + 1;
        result = Timestamp::interval(old, old);
        pc = Pc::Done;
        return true;
      }
      pc = Pc::Reread;
      return false;
    case Pc::Reread:
      result = Timestamp::interval(old, counter - 1);
      pc = Pc::Done;
      return true;
    case Pc::Done:
      return true;
  }
  return true;
}

std::optional<EventId> enq_of(const History& h, const Config::Ghost& g, ThreadId t, const Timestamp& ts) {
  for (const auto& [id, value] : g) {
    if (value != ts || !h.contains(id)) continue;
    const Event& e = h.event(id);
    if (e.thread == t && e.op == Op::Enq) return id;
  }
  return std::nullopt;
}

std::vector<EventId> in_queue(const Config& cfg) {
  std::vector<EventId> out;
  for (ThreadId t = 0; t < cfg.state.pools.size(); ++t) {
    for (const auto& entry : cfg.state.pools[t]) {
      if (auto id = enq_of(cfg.history, cfg.ghost, t, entry.ts)) out.push_back(*id);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

std::vector<EventId> seen_with(const Config& cfg, EventId d, const Locals& l, const std::vector<EventId>& queued) {
  std::vector<EventId> out;
  if (!l.has_start) return out;
  for (auto e : queued) {
    const Event& ev = cfg.history.event(e);
    if (!ev.completed() || !cfg.history.precedes(e, d)) continue;
    if (ts_lt(l.start_ts, cfg.ghost.at(e))) continue;
    if (!(l.visited >> ev.thread & 1)) continue;
    out.push_back(e);
  }
  return out;
}

// The running dequeue of t past its start timestamp, if any.
std::optional<EventId> scanning_dequeue(const Config& cfg, ThreadId t) {
  const auto& l = cfg.locals[t];
  if (!l.dequeue || !l.has_start || (l.pc != Pc::DeqScan && l.pc != Pc::DeqRemove)) return std::nullopt;
  return current_event(cfg.history, t);
}

}  // namespace

std::vector<EventId> seen(const Config& cfg, EventId d) {
  if (!cfg.history.contains(d)) return {};
  const ThreadId t = cfg.history.event(d).thread;
  if (t >= cfg.locals.size() || scanning_dequeue(cfg, t) != d) return {};
  return seen_with(cfg, d, cfg.locals[t], in_queue(cfg));
}

void check_ts_inv(const Config& cfg, Violations& out) {
  const History& h = cfg.history;
  const auto queued = in_queue(cfg);

  // INV_ORD(i): completed dequeues precede uncompleted ones.
  for (const auto& i : h.events()) {
    if (i.op != Op::Deq || !i.completed()) continue;
    for (const auto& j : h.events()) {
      if (j.op == Op::Deq && !j.completed() && !h.precedes(i.id, j.id)) {
        report(out, Category::Invariant, "INV_ORD(i)", {i.id, j.id});
      }
    }
  }
  // INV_ORD(ii): enqueues of dequeued values precede enqueues still in the pools.
  for (const auto& i : h.events()) {
    if (i.op != Op::Enq || !i.completed() || in(queued, i.id)) continue;
    for (auto j : queued) {
      if (!h.precedes(i.id, j)) report(out, Category::Invariant, "INV_ORD(ii)", {i.id, j});
    }
  }
  // INV_ALG(i): in-pool enqueues are ordered only if their timestamps are.
  for (auto i : queued) {
    for (auto j : queued) {
      if (h.precedes(i, j) && !ts_lt(cfg.ghost.at(i), cfg.ghost.at(j))) {
        report(out, Category::Invariant, "INV_ALG(i)", {i, j},
               ts_text(cfg.ghost.at(i)) + " vs " + ts_text(cfg.ghost.at(j)));
      }
    }
  }
  // INV_ALG(ii): pool order agrees with the order of the inserting enqueues;
  // plus the pool's own shape (unique ids, ascending timestamps).
  std::vector<PoolId> pids;
  for (ThreadId t = 0; t < cfg.state.pools.size(); ++t) {
    const auto& pool = cfg.state.pools[t];
    for (std::size_t a = 0; a < pool.size(); ++a) {
      pids.push_back(pool[a].pid);
      for (std::size_t b = a + 1; b < pool.size(); ++b) {
        const auto ia = enq_of(h, cfg.ghost, t, pool[a].ts);
        const auto ib = enq_of(h, cfg.ghost, t, pool[b].ts);
        if (ia && ib && !h.precedes(*ia, *ib)) report(out, Category::Invariant, "INV_ALG(ii)", {*ia, *ib});
        if (!pool[b].ts.top && !ts_lt(pool[a].ts, pool[b].ts) && !pool[a].ts.top) {
          report(out, Category::Invariant, "pool-order", {}, "pool " + std::to_string(t));
        }
      }
    }
  }
  std::sort(pids.begin(), pids.end());
  if (std::adjacent_find(pids.begin(), pids.end()) != pids.end()) {
    report(out, Category::Invariant, "pool-ids", {}, "duplicate pool id");
  }
  // INV_ALG(iii): assigned timestamps are below the counter.
  for (const auto& [i, ts] : cfg.ghost) {
    if (!ts.top && !(ts.e < cfg.state.counter)) {
      report(out, Category::Invariant, "INV_ALG(iii)", {i}, ts_text(ts));
    }
    if (!ts.top && ts.s > ts.e) report(out, Category::Invariant, "timestamp-shape", {i}, ts_text(ts));
  }
  // INV_WF(i): the ghost map only covers enqueue events.
  for (const auto& [i, ts] : cfg.ghost) {
    if (!h.contains(i) || h.event(i).op != Op::Enq) report(out, Category::Invariant, "INV_WF(i)", {i});
  }
  // INV_WF(ii): every pool value has its enqueue event.
  for (ThreadId t = 0; t < cfg.state.pools.size(); ++t) {
    for (const auto& entry : cfg.state.pools[t]) {
      const auto id = enq_of(h, cfg.ghost, t, entry.ts);
      if (!id || h.event(*id).arg != Value::integer(entry.value)) {
        report(out, Category::Invariant, "INV_WF(ii)", {}, "pool " + std::to_string(t) + " pid " + std::to_string(entry.pid));
      }
    }
  }
  // INV_WF(iii): per-thread ghost timestamps are distinct.
  for (auto a = cfg.ghost.begin(); a != cfg.ghost.end(); ++a) {
    for (auto b = std::next(a); b != cfg.ghost.end(); ++b) {
      if (a->second == b->second && h.contains(a->first) && h.contains(b->first) &&
          h.event(a->first).thread == h.event(b->first).thread) {
        report(out, Category::Invariant, "INV_WF(iii)", {a->first, b->first});
      }
    }
  }
  // INV_WF(iv): an enqueue is uncompleted iff its ghost timestamp is absent or ⊤.
  for (const auto& e : h.events()) {
    if (e.op != Op::Enq) continue;
    const auto it = cfg.ghost.find(e.id);
    const bool pending_ts = it == cfg.ghost.end() || it->second.top;
    if (e.completed() == pending_ts) report(out, Category::Invariant, "INV_WF(iv)", {e.id});
  }
}

void check_ts_loop_inv(const Config& cfg, ThreadId t, Violations& out) {
  const auto& l = cfg.locals[t];
  const History& h = cfg.history;

  // newTS: a generated enqueue timestamp exceeds those of in-pool enqueues
  // that precede the enqueue.
  if (!l.dequeue && l.pc == Pc::EnqSetTs) {
    const auto me = current_event(h, t);
    if (!me) return;
    for (auto i : in_queue(cfg)) {
      if (h.precedes(i, *me) && !ts_lt(cfg.ghost.at(i), l.timestamp)) {
        report(out, Category::LoopInvariant, "newTS", {i, *me},
               ts_text(cfg.ghost.at(i)) + " vs " + ts_text(l.timestamp));
      }
    }
    return;
  }

  const auto d = scanning_dequeue(cfg, t);
  if (!d) return;
  const auto queued = in_queue(cfg);
  const auto s = seen_with(cfg, *d, l, queued);

  if (l.cand_pid == kNull) {
    // noCand
    if (!s.empty()) report(out, Category::LoopInvariant, "noCand", s, "seen set not empty without a candidate");
    return;
  }
  // isCand
  const auto cand = enq_of(h, cfg.ghost, l.cand_tid, l.cand_ts);
  if (!cand) {
    report(out, Category::LoopInvariant, "isCand", {*d}, "no enqueue for the candidate timestamp");
    return;
  }
  if (l.cand != cand) report(out, Category::LoopInvariant, "isCand", {*cand, *d}, "ghost CAND is stale");
  for (auto e : s) {
    if (ts_lt(cfg.ghost.at(e), cfg.ghost.at(*cand))) {
      report(out, Category::LoopInvariant, "minTS", {e, *cand}, ts_text(cfg.ghost.at(e)) + " below candidate");
    }
  }
  if (in(queued, *cand)) {
    if (!in(s, *cand)) report(out, Category::LoopInvariant, "isCand", {*cand, *d}, "candidate in pools but unseen");
    // Minimality of CAND among in-pool enqueues of visited threads.
    for (auto e : queued) {
      if ((l.visited >> h.event(e).thread & 1) && h.precedes(e, *cand)) {
        report(out, Category::LoopInvariant, "cand-minimal", {e, *cand});
      }
    }
  }
}

void check_ts_transition(const Config& before, const Config& after, ThreadId actor, Violations& out) {
  std::optional<std::vector<EventId>> queued_before, queued_after;
  for (ThreadId t = 0; t < after.locals.size(); ++t) {
    if (t == actor) continue;
    const auto d = scanning_dequeue(before, t);
    if (!d || scanning_dequeue(after, t) != d) continue;
    if (!queued_before) {
      queued_before = in_queue(before);
      queued_after = in_queue(after);
    }
    const auto s0 = seen_with(before, *d, before.locals[t], *queued_before);
    const auto s1 = seen_with(after, *d, after.locals[t], *queued_after);
    for (auto e : s1) {
      if (!in(s0, e)) report(out, Category::Transition, "seen-monotone", {e, *d}, "environment step grew seen set");
    }
  }
}

void check_ts_same_data(const Config& cfg, Violations& out) {
  std::vector<std::int64_t> pooled;
  for (const auto& pool : cfg.state.pools) {
    for (const auto& entry : pool) {
      if (!entry.ts.top) pooled.push_back(entry.value);
    }
  }
  std::sort(pooled.begin(), pooled.end());

  // Keyed by the completed history and pool contents; the same pair recurs
  // across many explored configurations.
  static thread_local std::unordered_map<Fingerprint, bool, FingerprintHash> cache;
  Hasher key;
  hash_into(key, floor(cfg.history));
  hash_into(key, pooled);
  const auto fp = key.finish();
  auto it = cache.find(fp);
  if (it == cache.end()) {
    bool ok = true;
    if (std::popcount(cfg.history.completed_mask()) <= 16) {
      for (auto st : final_states(cfg.history, queue_spec())) {
        std::sort(st.begin(), st.end());
        if (st != pooled) ok = false;
      }
    }
    if (cache.size() > (1u << 20)) cache.clear();
    it = cache.emplace(fp, ok).first;
  }
  if (!it->second) report(out, Category::Invariant, "same_data", {}, "queue contents differ from completed pool values");
}

// ---------------------------------------------------------------------------
// Step machine

Config Machine::initial(std::size_t threads) {
  Config cfg;
  cfg.state.pools.assign(threads, {});
  cfg.state.inserted.assign(threads, 0);
  cfg.locals.assign(threads, {});
  cfg.arg.assign(threads, Value::unit());
  cfg.res.assign(threads, Value::unit());
  return cfg;
}

void Machine::begin(Config& cfg, ThreadId t, const Call& call) {
  auto& l = cfg.locals[t];
  l = {};
  if (call.op == Op::Enq) {
    l.pc = Pc::EnqInsert;
  } else if (call.op == Op::Deq) {
    l.dequeue = true;
    reset_attempt(l);
  } else {
    throw std::invalid_argument("tsqueue does not support " + std::string(op_name(call.op)));
  }
}

std::size_t Machine::arity(const Config& cfg, ThreadId t) {
  const auto& l = cfg.locals[t];
  if (l.pc == Pc::Idle) return 0;
  if (l.pc == Pc::DeqScan && l.iterations == 0) return cfg.state.pools.size();
  return 1;
}

StepStatus Machine::step(Config& cfg, ThreadId t, std::size_t branch, const Mutations& mut, Violations& out) {
  auto& l = cfg.locals[t];
  const EventId me = my_eid(cfg, t);
  switch (l.pc) {
    case Pc::Idle:
      throw Blocked("thread is idle");

    case Pc::EnqInsert: {
      l.node = pool_insert(cfg.state, t, cfg.arg[t].as_int());
      CommitAction<Timestamp> act;
      act.ghost(me, Timestamp::max());
      if (!mut.ts_no_insert_order) {
        // Enqueues whose values were already dequeued precede this one.
        std::vector<Edge> edges;
        for (const auto& e : cfg.history.events()) {
          if (e.op != Op::Enq || !e.completed() || e.id == me) continue;
          const auto g = cfg.ghost.find(e.id);
          const bool queued = g != cfg.ghost.end() && [&] {
            const auto& pool = cfg.state.pools[e.thread];
            return std::any_of(pool.begin(), pool.end(), [&](const PoolEntry& p) { return p.ts == g->second; });
          }();
          if (!queued) edges.emplace_back(e.id, me);
        }
        act.edges(std::move(edges));
      }
      apply_commit(cfg, t, act);
      l.pc = Pc::NewTs;
      return StepStatus::Running;
    }

    case Pc::NewTs:
      if (l.gen.step(cfg.state.counter)) {
        if (l.dequeue) {
          l.has_start = true;
          l.start_ts = l.gen.result;
          l.cand_pid = kNull;
          l.cand_ts = Timestamp::max();
          l.pc = Pc::DeqScan;
        } else {
          l.timestamp = l.gen.result;
          l.pc = Pc::EnqSetTs;
        }
      }
      return StepStatus::Running;

    case Pc::EnqSetTs: {
      pool_set_timestamp(cfg.state, t, l.node, l.timestamp);
      CommitAction<Timestamp> act;
      act.ghost(me, l.timestamp).complete(me, Value::unit());
      apply_commit(cfg, t, act);
      cfg.res[t] = Value::unit();
      l = {};
      return StepStatus::Finished;
    }

    case Pc::DeqScan: {
      const auto n = static_cast<std::uint32_t>(cfg.state.pools.size());
      if (l.iterations == 0) l.k = static_cast<std::uint32_t>(branch);
      const ThreadId k = l.k;
      const auto oldest = pool_get_oldest(cfg.state, k);
      if (!mut.ts_no_scan_edges) {
        std::vector<Edge> edges;
        if (mut.ts_scan_all_pools) {
          for (auto e : in_queue(cfg)) {
            if (cfg.history.event(e).completed() && !ts_lt(l.start_ts, cfg.ghost.at(e))) edges.emplace_back(e, me);
          }
        } else {
          for (const auto& entry : cfg.state.pools[k]) {
            const auto e = enq_of(cfg.history, cfg.ghost, k, entry.ts);
            if (e && cfg.history.event(*e).completed() && !ts_lt(l.start_ts, entry.ts)) edges.emplace_back(*e, me);
          }
        }
        apply_commit(cfg, t, CommitAction<Timestamp>{}.edges(std::move(edges)));
      }
      if (oldest.pid != kNull && ts_lt(*oldest.ts, l.cand_ts) &&
          (mut.ts_skip_startts_guard || !ts_lt(l.start_ts, *oldest.ts))) {
        l.cand_pid = oldest.pid;
        l.cand_ts = *oldest.ts;
        l.cand_tid = k;
        l.cand = enq_of(cfg.history, cfg.ghost, k, *oldest.ts);
        if (!l.cand) out.push_back({Category::Invariant, "enqOf", {me}, "candidate has no enqueue event"});
      }
      l.visited |= std::uint64_t{1} << k;
      l.k = (l.k + 1) % n;
      if (++l.iterations < n) return StepStatus::Running;
      if (l.cand_pid != kNull) {
        l.pc = Pc::DeqRemove;
        return StepStatus::Running;
      }
      reset_attempt(l);
      return StepStatus::Retry;
    }

    case Pc::DeqRemove: {
      const auto ret = pool_remove(cfg.state, l.cand_tid, l.cand_pid);
      if (!ret) {
        reset_attempt(l);
        return StepStatus::Retry;
      }
      const Value v = Value::integer(*ret);
      CommitAction<Timestamp> act;
      act.complete(me, v);
      std::vector<Edge> edges;
      if (l.cand && !mut.ts_no_scan_edges) {
        for (auto e : in_queue(cfg)) edges.emplace_back(*l.cand, e);
      }
      for (auto d : uncompleted_dequeues(cfg.history)) {
        if (d != me) edges.emplace_back(me, d);
      }
      act.edges(std::move(edges));
      apply_commit(cfg, t, act);
      cfg.res[t] = v;
      l = {};
      return StepStatus::Finished;
    }
  }
  return StepStatus::Running;
}

}  // namespace polarize::ts

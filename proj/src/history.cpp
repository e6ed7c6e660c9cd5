#include "polarize/history.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

#include "polarize/seqspec.hpp"

namespace polarize {
namespace {

constexpr std::uint64_t bit(std::size_t i) { return std::uint64_t{1} << i; }

// Inserts a zero bit at position p, shifting higher bits up.
std::uint64_t insert_bit(std::uint64_t mask, std::size_t p) {
  const std::uint64_t low = mask & (bit(p) - 1);
  const std::uint64_t high = mask & ~(bit(p) - 1);
  return low | (high << 1);
}

template <class F>
void for_each_bit(std::uint64_t mask, F&& f) {
  while (mask != 0) {
    const auto i = static_cast<std::size_t>(std::countr_zero(mask));
    f(i);
    mask &= mask - 1;
  }
}

}  // namespace

std::string to_string(const Event& e) {
  std::ostringstream out;
  out << e.id << ":" << e.thread << ":" << op_name(e.op) << "(" << (e.arg.is_unit() ? "" : e.arg.to_string())
      << "):" << (e.result ? e.result->to_string() : "todo");
  return out.str();
}

// ---------------------------------------------------------------------------
// History

EventId History::add_event(ThreadId thread, Op op, Value arg) {
  if (events_.size() >= kMaxEvents) throw std::length_error("history exceeds 64 events");
  const EventId id = next_id_++;
  events_.push_back(Event{id, thread, op, arg, std::nullopt});
  succ_.push_back(0);
  return id;
}

void History::insert_event_raw(const Event& e) {
  if (events_.size() >= kMaxEvents) throw std::length_error("history exceeds 64 events");
  auto it = std::lower_bound(events_.begin(), events_.end(), e.id,
                             [](const Event& a, EventId id) { return a.id < id; });
  if (it != events_.end() && it->id == e.id) {
    throw std::invalid_argument("duplicate event id " + std::to_string(e.id));
  }
  const auto p = static_cast<std::size_t>(it - events_.begin());
  events_.insert(it, e);
  for (auto& m : succ_) m = insert_bit(m, p);
  succ_.insert(succ_.begin() + static_cast<std::ptrdiff_t>(p), 0);
  next_id_ = std::max(next_id_, e.id + 1);
}

void History::add_order_raw(EventId a, EventId b) { succ_[require(a)] |= bit(require(b)); }

void History::close_raw() {
  const auto n = succ_.size();
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (succ_[i] & bit(k)) succ_[i] |= succ_[k];
    }
  }
}

void History::add_edges(std::span<const Edge> edges) {
  std::vector<std::uint64_t> work = succ_;
  for (const auto& [a, b] : edges) {
    const auto pa = require(a);
    const auto pb = require(b);
    if (pa == pb) throw CycleError("self edge on " + std::to_string(a), {a, b});
    if (!events_[pa].completed()) {
      throw SourceUncompleted("edge leaves uncompleted event " + std::to_string(a), {a, b});
    }
    if (work[pb] & bit(pa)) {
      throw CycleError("edge " + std::to_string(a) + "->" + std::to_string(b) + " closes a cycle", {a, b});
    }
    const std::uint64_t add = bit(pb) | work[pb];
    for (std::size_t i = 0; i < work.size(); ++i) {
      if (i == pa || (work[i] & bit(pa))) work[i] |= add;
    }
  }
  succ_ = std::move(work);
}

void History::complete(EventId id, Value result) {
  auto& e = events_[require(id)];
  if (e.completed()) throw AlreadyCompleted("event " + std::to_string(id) + " already completed", {id});
  e.result = result;
}

const Event& History::event(EventId id) const { return events_[require(id)]; }

bool History::precedes(EventId a, EventId b) const {
  const auto pa = position(a);
  const auto pb = position(b);
  return pa && pb && (succ_[*pa] & bit(*pb));
}

std::vector<Edge> History::order() const {
  std::vector<Edge> out;
  for (std::size_t i = 0; i < succ_.size(); ++i) {
    for_each_bit(succ_[i], [&](std::size_t j) { out.emplace_back(events_[i].id, events_[j].id); });
  }
  return out;
}

std::size_t History::order_size() const {
  std::size_t n = 0;
  for (auto m : succ_) n += static_cast<std::size_t>(std::popcount(m));
  return n;
}

std::optional<EventId> History::last_of(ThreadId t) const {
  std::uint64_t mine = 0;
  for (std::size_t i = 0; i < events_.size(); ++i) {
    if (events_[i].thread == t) mine |= bit(i);
  }
  std::optional<EventId> best;
  for_each_bit(mine, [&](std::size_t i) {
    if ((succ_[i] & mine) == 0) best = events_[i].id;
  });
  return best;
}

std::optional<std::size_t> History::position(EventId id) const {
  auto it = std::lower_bound(events_.begin(), events_.end(), id,
                             [](const Event& a, EventId x) { return a.id < x; });
  if (it == events_.end() || it->id != id) return std::nullopt;
  return static_cast<std::size_t>(it - events_.begin());
}

std::uint64_t History::predecessors(std::size_t pos) const {
  std::uint64_t out = 0;
  for (std::size_t i = 0; i < succ_.size(); ++i) {
    if (succ_[i] & bit(pos)) out |= bit(i);
  }
  return out;
}

std::uint64_t History::completed_mask() const {
  std::uint64_t out = 0;
  for (std::size_t i = 0; i < events_.size(); ++i) {
    if (events_[i].completed()) out |= bit(i);
  }
  return out;
}

std::size_t History::require(EventId id) const {
  const auto p = position(id);
  if (!p) throw UnknownEvent("unknown event id " + std::to_string(id), {id});
  return *p;
}

void hash_into(Hasher& h, const Value& v) {
  h.mix(static_cast<std::uint64_t>(v.kind()));
  h.mix(static_cast<std::uint64_t>(v.raw()));
}

void hash_into(Hasher& h, const Event& e) {
  h.mix(e.id);
  h.mix(e.thread);
  h.mix(static_cast<std::uint64_t>(e.op));
  hash_into(h, e.arg);
  h.mix(e.result);
}

void hash_into(Hasher& h, const History& hist) {
  hash_into(h, hist.events_);
  hash_into(h, hist.succ_);
}

// ---------------------------------------------------------------------------
// Well-formedness

std::string_view rule_name(WfRule rule) {
  switch (rule) {
    case WfRule::Irreflexive:
      return "irreflexive";
    case WfRule::Transitive:
      return "transitive";
    case WfRule::ThreadTotal:
      return "thread-total";
    case WfRule::UncompletedMaximal:
      return "uncompleted-maximal";
    case WfRule::IntervalOrder:
      return "interval-order";
  }
  return "?";
}

std::vector<WfViolation> check_wf(const History& h) {
  // Order pairs over unknown ids cannot be represented: the order is stored
  // per event position, and add_order_raw rejects unknown ids.
  std::vector<WfViolation> out;
  const auto& ev = h.events();
  const auto n = ev.size();
  auto id = [&](std::size_t i) { return ev[i].id; };

  for (std::size_t i = 0; i < n; ++i) {
    if (h.successors(i) & bit(i)) out.push_back({WfRule::Irreflexive, {id(i)}});
  }
  for (std::size_t i = 0; i < n; ++i) {
    for_each_bit(h.successors(i), [&](std::size_t j) {
      const std::uint64_t missing = h.successors(j) & ~h.successors(i);
      if (missing != 0) {
        const auto k = static_cast<std::size_t>(std::countr_zero(missing));
        out.push_back({WfRule::Transitive, {id(i), id(j), id(k)}});
      }
    });
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (ev[i].thread != ev[j].thread) continue;
      if (!(h.successors(i) & bit(j)) && !(h.successors(j) & bit(i))) {
        out.push_back({WfRule::ThreadTotal, {id(i), id(j)}});
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!ev[i].completed() && h.successors(i) != 0) {
      const auto j = static_cast<std::size_t>(std::countr_zero(h.successors(i)));
      out.push_back({WfRule::UncompletedMaximal, {id(i), id(j)}});
    }
  }
  // i1 ≺ i2 ∧ i3 ≺ i4 ⇒ i1 ≺ i4 ∨ i3 ≺ i2, quantified over all pairs (i2, i4)
  // by comparing predecessor sets.
  std::vector<std::uint64_t> pred(n);
  for (std::size_t i = 0; i < n; ++i) pred[i] = h.predecessors(i);
  for (std::size_t i2 = 0; i2 < n; ++i2) {
    for (std::size_t i4 = i2 + 1; i4 < n; ++i4) {
      const std::uint64_t only2 = pred[i2] & ~pred[i4];
      const std::uint64_t only4 = pred[i4] & ~pred[i2];
      if (only2 != 0 && only4 != 0) {
        const auto i1 = static_cast<std::size_t>(std::countr_zero(only2));
        const auto i3 = static_cast<std::size_t>(std::countr_zero(only4));
        out.push_back({WfRule::IntervalOrder, {id(i1), id(i2), id(i3), id(i4)}});
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Relations between histories

History add_edges(const History& h, std::span<const Edge> edges) {
  History out = h;
  out.add_edges(edges);
  return out;
}

History complete_event(const History& h, EventId id, Value result) {
  History out = h;
  out.complete(id, result);
  return out;
}

History floor(const History& h) {
  History out;
  for (const auto& e : h.events()) {
    if (e.completed()) out.insert_event_raw(e);
  }
  for (const auto& [a, b] : h.order()) {
    if (out.contains(a) && out.contains(b)) out.add_order_raw(a, b);
  }
  return out;
}

bool refines(const History& h1, const History& h2) {
  if (h1.events() != h2.events()) return false;
  for (std::size_t i = 0; i < h1.size(); ++i) {
    if ((h1.successors(i) & ~h2.successors(i)) != 0) return false;
  }
  return true;
}

std::vector<Edge> transitive_reduction(const History& h) {
  const auto n = h.size();
  std::vector<std::uint64_t> pred(n);
  for (std::size_t i = 0; i < n; ++i) pred[i] = h.predecessors(i);
  std::vector<Edge> out;
  for (std::size_t i = 0; i < n; ++i) {
    for_each_bit(h.successors(i), [&](std::size_t j) {
      if ((h.successors(i) & pred[j]) == 0) out.emplace_back(h.events()[i].id, h.events()[j].id);
    });
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Linear extensions

namespace {

struct ExtensionWalk {
  const History& h;
  const std::function<bool(const SeqHistory&)>& visit;
  const SeqSpec* spec;
  std::vector<std::uint64_t> pred;
  SeqHistory prefix;
  ExtensionSummary summary;

  // Returns false when the visitor asked to stop.
  bool walk(std::uint64_t placed, const std::vector<SpecState>& states) {
    const std::uint64_t all = h.size() == 64 ? ~std::uint64_t{0} : bit(h.size()) - 1;
    if (placed == all) {
      ++summary.yielded;
      if (!visit(prefix)) {
        summary.stopped = true;
        return false;
      }
      return true;
    }
    std::uint64_t ready = 0;
    for_each_bit(all & ~placed, [&](std::size_t i) {
      if ((pred[i] & ~placed) == 0) ready |= bit(i);
    });
    bool go_on = true;
    for_each_bit(ready, [&](std::size_t i) {
      if (!go_on) return;
      const Event& e = h.events()[i];
      std::vector<SpecState> next;
      if (spec != nullptr) {
        next = replay_step(states, e, *spec);
        if (next.empty()) {
          summary.rejected_any = true;
          return;
        }
      }
      prefix.push_back(e);
      go_on = walk(placed | bit(i), next);
      prefix.pop_back();
    });
    return go_on;
  }
};

}  // namespace

ExtensionSummary for_each_linear_extension(const History& h,
                                           const std::function<bool(const SeqHistory&)>& visit,
                                           const SeqSpec* prune) {
  ExtensionWalk w{h, visit, prune, {}, {}, {}};
  w.pred.resize(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) w.pred[i] = h.predecessors(i);
  std::vector<SpecState> states;
  if (prune != nullptr) states.push_back(prune->initial());
  w.walk(0, states);
  return w.summary;
}

std::vector<SeqHistory> linear_extensions(const History& h, const SeqSpec* prune) {
  std::vector<SeqHistory> out;
  for_each_linear_extension(
      h,
      [&](const SeqHistory& s) {
        out.push_back(s);
        return true;
      },
      prune);
  return out;
}

History to_history(const SeqHistory& seq) {
  History out;
  for (const auto& e : seq) out.insert_event_raw(e);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    for (std::size_t j = i + 1; j < seq.size(); ++j) out.add_order_raw(seq[i].id, seq[j].id);
  }
  return out;
}

}  // namespace polarize

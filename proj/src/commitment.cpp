#include "polarize/commitment.hpp"

#include <algorithm>
#include <bit>
#include <unordered_set>

#include "polarize/violation.hpp"

namespace polarize {

std::string_view category_name(Category c) {
  switch (c) {
    case Category::WellFormedness:
      return "well-formedness";
    case Category::HistoryUpdate:
      return "history-update";
    case Category::CommitRejected:
      return "commit-rejected";
    case Category::Invariant:
      return "invariant";
    case Category::LoopInvariant:
      return "loop-invariant";
    case Category::Transition:
      return "transition";
    case Category::Abstraction:
      return "abstraction";
    case Category::Discrepancy:
      return "discrepancy";
  }
  return "?";
}

bool validate_hupd(const History& before, const History& after) {
  if (before.size() != after.size()) return false;
  for (std::size_t i = 0; i < before.size(); ++i) {
    const Event& a = before.events()[i];
    const Event& b = after.events()[i];
    if (a.id != b.id || a.thread != b.thread || a.op != b.op || a.arg != b.arg) return false;
    if (a.result && a.result != b.result) return false;
    if ((before.successors(i) & ~after.successors(i)) != 0) return false;
  }
  return true;
}

std::optional<EventId> current_event(const History& h, ThreadId t) {
  const auto last = h.last_of(t);
  if (!last || h.event(*last).completed()) return std::nullopt;
  return last;
}

EventId invoke_history_event(History& h, ThreadId t, Op op, Value arg, std::optional<EventId> given) {
  if (current_event(h, t)) {
    throw PendingEvent("thread " + std::to_string(t) + " already has an uncompleted event");
  }
  std::vector<EventId> done;
  for (const auto& e : h.events()) {
    if (e.completed()) done.push_back(e.id);
  }
  EventId id;
  if (given) {
    id = *given;
    h.insert_event_raw(Event{id, t, op, arg, std::nullopt});
  } else {
    id = h.add_event(t, op, arg);
  }
  std::vector<Edge> edges;
  edges.reserve(done.size());
  for (auto j : done) edges.emplace_back(j, id);
  h.add_edges(edges);
  return id;
}

namespace {

constexpr std::uint64_t bit(std::size_t i) { return std::uint64_t{1} << i; }

class AbsSearch {
 public:
  AbsSearch(const History& h, const SeqSpec& spec) : h_(h), spec_(spec), pred_(h.size()) {
    for (std::size_t i = 0; i < h.size(); ++i) pred_[i] = h.predecessors(i);
    all_ = h.size() == 64 ? ~std::uint64_t{0} : bit(h.size()) - 1;
  }

  // Returns false once a rejected extension has been recorded in `witness`.
  bool explore(std::uint64_t placed, const std::vector<SpecState>& states) {
    if (placed == all_) return true;
    Hasher key;
    key.mix(placed);
    hash_into(key, states);
    if (!seen_.insert(key.finish()).second) return true;

    for (std::size_t i = 0; i < h_.size(); ++i) {
      if ((placed & bit(i)) || (pred_[i] & ~placed)) continue;
      const Event& e = h_.events()[i];
      auto next = replay_step(states, e, spec_);
      prefix_.push_back(e);
      if (next.empty()) {
        finish_witness(placed | bit(i));
        return false;
      }
      if (!explore(placed | bit(i), next)) return false;
      prefix_.pop_back();
    }
    return true;
  }

  SeqHistory witness() const { return prefix_; }

 private:
  // Extends the failing prefix to a full linear extension.
  void finish_witness(std::uint64_t placed) {
    while (placed != all_) {
      for (std::size_t i = 0; i < h_.size(); ++i) {
        if ((placed & bit(i)) || (pred_[i] & ~placed)) continue;
        prefix_.push_back(h_.events()[i]);
        placed |= bit(i);
        break;
      }
    }
  }

  const History& h_;
  const SeqSpec& spec_;
  std::vector<std::uint64_t> pred_;
  std::uint64_t all_ = 0;
  std::unordered_set<Fingerprint, FingerprintHash> seen_;
  SeqHistory prefix_;
};

void collect_finals(const History& h, const SeqSpec& spec, const std::vector<std::uint64_t>& pred, std::uint64_t all,
                    std::uint64_t placed, const std::vector<SpecState>& states,
                    std::unordered_set<Fingerprint, FingerprintHash>& seen, std::vector<SpecState>& out) {
  if (placed == all) {
    for (const auto& st : states) {
      if (std::find(out.begin(), out.end(), st) == out.end()) out.push_back(st);
    }
    return;
  }
  Hasher key;
  key.mix(placed);
  hash_into(key, states);
  if (!seen.insert(key.finish()).second) return;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if ((placed & bit(i)) || (pred[i] & ~placed)) continue;
    auto next = replay_step(states, h.events()[i], spec);
    if (!next.empty()) collect_finals(h, spec, pred, all, placed | bit(i), next, seen, out);
  }
}

}  // namespace

std::vector<SpecState> final_states(const History& h, const SeqSpec& spec) {
  const History done = floor(h);
  std::vector<std::uint64_t> pred(done.size());
  for (std::size_t i = 0; i < done.size(); ++i) pred[i] = done.predecessors(i);
  const std::uint64_t all = done.size() == 64 ? ~std::uint64_t{0} : bit(done.size()) - 1;
  std::unordered_set<Fingerprint, FingerprintHash> seen;
  std::vector<SpecState> out;
  collect_finals(done, spec, pred, all, 0, {spec.initial()}, seen, out);
  return out;
}

AbsVerdict check_abs(const History& h, const SeqSpec& spec, std::size_t max_events) {
  const History done = floor(h);
  if (done.size() > max_events) {
    throw SizeLimit("abstract history has " + std::to_string(done.size()) + " completed events, cap is " +
                    std::to_string(max_events));
  }
  AbsSearch search(done, spec);
  if (search.explore(0, {spec.initial()})) return {};
  return {false, search.witness()};
}

}  // namespace polarize

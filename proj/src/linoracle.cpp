#include "polarize/linoracle.hpp"

#include <algorithm>
#include <unordered_set>

namespace polarize {
namespace {

constexpr std::uint64_t bit(std::size_t i) { return std::uint64_t{1} << i; }

struct Placement {
  std::size_t pos;
  std::optional<Value> ret;  // set for pending events that were placed
};

class Search {
 public:
  Search(const History& h, const SeqSpec& spec, const std::vector<Value>& retvals)
      : h_(h), spec_(spec), retvals_(retvals), pred_(h.size()) {
    for (std::size_t i = 0; i < h.size(); ++i) pred_[i] = h.predecessors(i);
    all_ = h.size() == 64 ? ~std::uint64_t{0} : bit(h.size()) - 1;
  }

  bool run() { return explore(0, {spec_.initial()}); }

  std::size_t explored() const { return failed_.size(); }

  History completion() const {
    History out;
    std::uint64_t kept = 0;
    for (const auto& p : path_) kept |= bit(p.pos);
    for (const auto& p : path_) {
      Event e = h_.events()[p.pos];
      if (p.ret) e.result = p.ret;
      out.insert_event_raw(e);
    }
    for (std::size_t i = 0; i < h_.size(); ++i) {
      if (!(kept & bit(i))) continue;
      for (std::size_t j = 0; j < h_.size(); ++j) {
        if ((kept & bit(j)) && (h_.successors(i) & bit(j))) out.add_order_raw(h_.events()[i].id, h_.events()[j].id);
      }
    }
    return out;
  }

  SeqHistory witness() const {
    SeqHistory seq;
    for (const auto& p : path_) {
      Event e = h_.events()[p.pos];
      if (p.ret) e.result = p.ret;
      seq.push_back(e);
    }
    return seq;
  }

 private:
  // `done` holds placed and dropped events; a pending event may be dropped at
  // any time, which also discards its outgoing order constraints.
  bool explore(std::uint64_t done, const std::vector<SpecState>& states) {
    if (done == all_) return true;
    Hasher key;
    key.mix(done);
    hash_into(key, states);
    const auto fp = key.finish();
    if (failed_.contains(fp)) return false;

    for (std::size_t i = 0; i < h_.size(); ++i) {
      if (done & bit(i)) continue;
      const Event& e = h_.events()[i];
      if (!e.completed()) {
        if (explore(done | bit(i), states)) return true;
      }
      if (pred_[i] & ~done) continue;
      if (e.completed()) {
        auto next = replay_step(states, e, spec_);
        if (next.empty()) continue;
        path_.push_back({i, std::nullopt});
        if (explore(done | bit(i), next)) return true;
        path_.pop_back();
      } else {
        for (const auto& r : retvals_) {
          Event filled = e;
          filled.result = r;
          auto next = replay_step(states, filled, spec_);
          if (next.empty()) continue;
          path_.push_back({i, r});
          if (explore(done | bit(i), next)) return true;
          path_.pop_back();
        }
      }
    }
    failed_.insert(fp);
    return false;
  }

  const History& h_;
  const SeqSpec& spec_;
  const std::vector<Value>& retvals_;
  std::vector<std::uint64_t> pred_;
  std::uint64_t all_ = 0;
  std::unordered_set<Fingerprint, FingerprintHash> failed_;
  std::vector<Placement> path_;
};

}  // namespace

LinVerdict is_linearizable(const History& h, const SeqSpec& spec, const std::vector<Value>& retvals,
                           std::size_t max_events) {
  if (h.size() > max_events) {
    throw SizeLimit("history has " + std::to_string(h.size()) + " events, oracle cap is " +
                    std::to_string(max_events));
  }
  Search search(h, spec, retvals);
  LinVerdict v;
  v.linearizable = search.run();
  v.explored = search.explored();
  if (v.linearizable) {
    v.completion = search.completion();
    v.witness = search.witness();
  }
  return v;
}

std::vector<Value> default_retvals(const SeqSpec& spec, const History& h) {
  std::vector<Value> out;
  if (spec.name() == "set") return {Value::boolean(false), Value::boolean(true)};
  for (const auto& e : h.events()) {
    if (e.op == Op::Enq && std::find(out.begin(), out.end(), e.arg) == out.end()) out.push_back(e.arg);
  }
  out.push_back(Value::unit());
  return out;
}

bool crosscheck(bool method_passed, const History& concrete, const SeqSpec& spec, std::size_t max_events) {
  if (!method_passed) return true;
  return is_linearizable(concrete, spec, default_retvals(spec, concrete), max_events).linearizable;
}

}  // namespace polarize

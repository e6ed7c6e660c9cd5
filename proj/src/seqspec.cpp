#include "polarize/seqspec.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace polarize {

std::vector<SpecOutcome> QueueSpec::apply(const SpecState& st, Op op, Value arg) const {
  switch (op) {
    case Op::Enq: {
      if (!arg.is_int()) return {};
      SpecState next = st;
      next.push_back(arg.as_int());
      return {{std::move(next), Value::unit()}};
    }
    case Op::Deq: {
      if (st.empty() || !arg.is_unit()) return {};
      SpecState next(st.begin() + 1, st.end());
      return {{std::move(next), Value::integer(st.front())}};
    }
    default:
      return {};
  }
}

std::vector<SpecOutcome> SetSpec::apply(const SpecState& st, Op op, Value arg) const {
  if (!arg.is_int()) return {};
  const auto v = arg.as_int();
  const auto it = std::lower_bound(st.begin(), st.end(), v);
  const bool present = it != st.end() && *it == v;
  switch (op) {
    case Op::Insert: {
      if (present) return {{st, Value::boolean(false)}};
      SpecState next = st;
      next.insert(next.begin() + (it - st.begin()), v);
      return {{std::move(next), Value::boolean(true)}};
    }
    case Op::Remove: {
      if (!present) return {{st, Value::boolean(false)}};
      SpecState next = st;
      next.erase(next.begin() + (it - st.begin()));
      return {{std::move(next), Value::boolean(true)}};
    }
    case Op::Contains:
      return {{st, Value::boolean(present)}};
    default:
      return {};
  }
}

const QueueSpec& queue_spec() {
  static const QueueSpec spec;
  return spec;
}

const SetSpec& set_spec() {
  static const SetSpec spec;
  return spec;
}

const SeqSpec& spec_by_name(std::string_view name) {
  if (name == "queue") return queue_spec();
  if (name == "set") return set_spec();
  throw std::invalid_argument("unknown specification '" + std::string(name) + "'");
}

std::vector<SpecState> replay_step(const std::vector<SpecState>& states, const Event& e, const SeqSpec& spec) {
  std::vector<SpecState> next;
  if (!e.result) return next;
  for (const auto& st : states) {
    for (auto& out : spec.apply(st, e.op, e.arg)) {
      if (out.ret == *e.result && std::find(next.begin(), next.end(), out.state) == next.end()) {
        next.push_back(std::move(out.state));
      }
    }
  }
  return next;
}

bool member(std::span<const Event> seq, const SeqSpec& spec) {
  std::vector<SpecState> states{spec.initial()};
  for (const auto& e : seq) {
    states = replay_step(states, e, spec);
    if (states.empty()) return false;
  }
  return true;
}

}  // namespace polarize

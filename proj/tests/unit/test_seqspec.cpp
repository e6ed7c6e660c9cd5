#include <deque>
#include <random>
#include <set>

#include "doctest.h"
#include "polarize/seqspec.hpp"

using namespace polarize;

namespace {

Event ev(EventId id, Op op, Value arg, Value res) { return Event{id, 0, op, arg, res}; }
Event enq(EventId id, std::int64_t v) { return ev(id, Op::Enq, Value::integer(v), Value::unit()); }
Event deq(EventId id, std::int64_t v) { return ev(id, Op::Deq, Value::unit(), Value::integer(v)); }

// Direct replay against std::deque / std::set.
bool naive_queue(const std::vector<Event>& seq) {
  std::deque<std::int64_t> q;
  for (const auto& e : seq) {
    if (e.op == Op::Enq) {
      if (!e.result->is_unit()) return false;
      q.push_back(e.arg.as_int());
    } else {
      if (q.empty() || !e.result->is_int() || q.front() != e.result->as_int()) return false;
      q.pop_front();
    }
  }
  return true;
}

bool naive_set(const std::vector<Event>& seq) {
  std::set<std::int64_t> s;
  for (const auto& e : seq) {
    const auto v = e.arg.as_int();
    bool expect = false;
    if (e.op == Op::Insert) expect = s.insert(v).second;
    if (e.op == Op::Remove) expect = s.erase(v) == 1;
    if (e.op == Op::Contains) expect = s.count(v) == 1;
    if (*e.result != Value::boolean(expect)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("queue apply") {
  const auto& q = queue_spec();
  auto out = q.apply({}, Op::Enq, Value::integer(4));
  REQUIRE(out.size() == 1);
  CHECK(out[0] == SpecOutcome{{4}, Value::unit()});
  out = q.apply({4, 5}, Op::Deq, Value::unit());
  REQUIRE(out.size() == 1);
  CHECK(out[0] == SpecOutcome{{5}, Value::integer(4)});
  CHECK(q.apply({}, Op::Deq, Value::unit()).empty());
}

TEST_CASE("set apply") {
  const auto& s = set_spec();
  CHECK(s.apply({}, Op::Insert, Value::integer(3))[0] == SpecOutcome{{3}, Value::boolean(true)});
  CHECK(s.apply({3}, Op::Insert, Value::integer(3))[0] == SpecOutcome{{3}, Value::boolean(false)});
  CHECK(s.apply({1, 3}, Op::Insert, Value::integer(2))[0].state == SpecState{1, 2, 3});
  CHECK(s.apply({3}, Op::Remove, Value::integer(3))[0] == SpecOutcome{{}, Value::boolean(true)});
  CHECK(s.apply({}, Op::Remove, Value::integer(3))[0].ret == Value::boolean(false));
  CHECK(s.apply({3}, Op::Contains, Value::integer(3))[0] == SpecOutcome{{3}, Value::boolean(true)});
}

TEST_CASE("membership of the queue examples") {
  CHECK(member(std::vector{enq(0, 2), enq(1, 1), enq(2, 3), deq(3, 2)}, queue_spec()));
  CHECK_FALSE(member(std::vector{enq(0, 1), enq(1, 2), enq(2, 3), deq(3, 2)}, queue_spec()));
  CHECK(member(std::vector<Event>{}, queue_spec()));
  CHECK_FALSE(member(std::vector{ev(0, Op::Deq, Value::unit(), Value::unit())}, queue_spec()));
}

TEST_CASE("lookup by name") {
  CHECK(spec_by_name("queue").name() == "queue");
  CHECK(spec_by_name("set").name() == "set");
  CHECK_THROWS_AS(spec_by_name("stack"), std::invalid_argument);
}

TEST_CASE("random queue sequences agree with a deque") {
  std::mt19937_64 rng(3);
  int accepted = 0;
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<Event> seq;
    const int n = 1 + static_cast<int>(rng() % 8);
    for (int i = 0; i < n; ++i) {
      const auto v = static_cast<std::int64_t>(1 + rng() % 3);
      seq.push_back(rng() % 2 ? enq(i, v) : deq(i, v));
    }
    CAPTURE(trial);
    CHECK(member(seq, queue_spec()) == naive_queue(seq));
    accepted += naive_queue(seq);
  }
  CHECK(accepted > 20);
}

TEST_CASE("random set sequences agree with std::set") {
  std::mt19937_64 rng(5);
  const Op ops[] = {Op::Insert, Op::Remove, Op::Contains};
  int accepted = 0;
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<Event> seq;
    const int n = 1 + static_cast<int>(rng() % 7);
    for (int i = 0; i < n; ++i) {
      seq.push_back(ev(i, ops[rng() % 3], Value::integer(1 + rng() % 2), Value::boolean(rng() % 2)));
    }
    CAPTURE(trial);
    CHECK(member(seq, set_spec()) == naive_set(seq));
    accepted += naive_set(seq);
  }
  CHECK(accepted > 20);
}

TEST_CASE("replay_step filters by result") {
  const std::vector<SpecState> from{{1, 2}, {2, 1}};
  const auto next = replay_step(from, deq(0, 2), queue_spec());
  REQUIRE(next.size() == 1);
  CHECK(next[0] == SpecState{1});
}

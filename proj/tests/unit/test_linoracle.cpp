#include <random>

#include "../common/oracles.hpp"
#include "doctest.h"
#include "polarize/linoracle.hpp"

using namespace polarize;

namespace {

Value I(std::int64_t v) { return Value::integer(v); }

// Enq(1) ≺ Enq(3), Enq(2) concurrent with both, Deq after all three.
History intro(Value deq_result) {
  History h;
  for (std::int64_t v : {1, 2, 3}) h.complete(h.add_event(static_cast<ThreadId>(v - 1), Op::Enq, I(v)), Value::unit());
  const auto d = h.add_event(3, Op::Deq, Value::unit());
  h.complete(d, deq_result);
  const std::vector<Edge> e{{0, 2}, {0, d}, {1, d}, {2, d}};
  h.add_edges(e);
  return h;
}

}  // namespace

TEST_CASE("dequeue after the three enqueues") {
  for (std::int64_t v : {1, 2}) {
    const auto r = is_linearizable(intro(I(v)), queue_spec(), default_retvals(queue_spec(), intro(I(v))));
    CHECK(r.linearizable);
    REQUIRE(r.witness);
    CHECK(oracle::replay_queue(*r.witness));
  }
  const auto h = intro(I(3));
  const auto r = is_linearizable(h, queue_spec(), default_retvals(queue_spec(), h));
  CHECK_FALSE(r.linearizable);
  CHECK(r.explored > 0);
}

TEST_CASE("pending events may be dropped or completed") {
  History h;
  const auto e = h.add_event(0, Op::Enq, I(5));
  const auto d = h.add_event(1, Op::Deq, Value::unit());
  h.complete(d, I(5));
  auto r = is_linearizable(h, queue_spec(), default_retvals(queue_spec(), h));
  CHECK(r.linearizable);
  REQUIRE(r.completion);
  CHECK(r.completion->event(e).completed());

  History lonely;
  lonely.add_event(0, Op::Deq, Value::unit());
  CHECK(is_linearizable(lonely, queue_spec(), default_retvals(queue_spec(), lonely)).linearizable);
}

TEST_CASE("removing order edges never loses linearizability") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const auto h = oracle::random_history(rng, "queue", 5);
    if (!is_linearizable(h, queue_spec(), default_retvals(queue_spec(), h)).linearizable) continue;
    History weaker;
    for (const auto& e : h.events()) weaker.insert_event_raw(e);
    CAPTURE(trial);
    CHECK(is_linearizable(weaker, queue_spec(), default_retvals(queue_spec(), weaker)).linearizable);
  }
}

TEST_CASE("agrees with the permutation oracle") {
  std::mt19937_64 rng(29);
  int yes = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const auto spec = trial % 2 ? "set" : "queue";
    const auto h = oracle::random_history(rng, spec, 5);
    const auto rv = default_retvals(spec_by_name(spec), h);
    CAPTURE(trial);
    const bool got = is_linearizable(h, spec_by_name(spec), rv).linearizable;
    CHECK(got == oracle::linearizable(h, spec, rv));
    yes += got;
  }
  CHECK(yes > 30);
  CHECK(yes < 290);
}

TEST_CASE("crosscheck is one-sided") {
  const auto bad = intro(I(3));
  CHECK(crosscheck(false, bad, queue_spec()));
  CHECK_FALSE(crosscheck(true, bad, queue_spec()));
  CHECK(crosscheck(true, intro(I(2)), queue_spec()));
}

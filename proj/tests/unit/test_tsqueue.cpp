#include <algorithm>

#include "doctest.h"
#include "polarize/tsqueue.hpp"
#include "support.hpp"

using namespace polarize;
using namespace polarize::ts;
using polarize::test::describe;
using polarize::test::explore_all;
using polarize::test::workload;

namespace {

bool has(const Violations& vs, std::string_view rule) {
  return std::any_of(vs.begin(), vs.end(), [&](const Violation& v) { return v.rule == rule; });
}

Timestamp iv(std::int64_t s, std::int64_t e) { return Timestamp::interval(s, e); }

}  // namespace

TEST_CASE("ts_lt") {
  CHECK(ts_lt(iv(1, 1), iv(2, 2)));
  CHECK_FALSE(ts_lt(iv(1, 3), iv(2, 5)));
  CHECK_FALSE(ts_lt(iv(2, 5), iv(1, 3)));
  CHECK(ts_lt(iv(2, 2), Timestamp::max()));
  CHECK_FALSE(ts_lt(Timestamp::max(), Timestamp::max()));
  CHECK_FALSE(ts_lt(Timestamp::max(), iv(2, 2)));
  CHECK_FALSE(ts_lt(iv(3, 3), iv(3, 3)));
}

TEST_CASE("SP pools") {
  Shared s;
  s.pools.assign(2, {});
  s.inserted.assign(2, 0);
  const auto empty = pool_get_oldest(s, 0);
  CHECK(empty.pid == kNull);
  CHECK_FALSE(empty.ts.has_value());

  const auto p = pool_insert(s, 0, 7);
  CHECK(p != kNull);
  REQUIRE(s.pools[0].size() == 1);
  CHECK(s.pools[0][0] == PoolEntry{p, 7, Timestamp::max()});
  pool_set_timestamp(s, 0, p, iv(3, 3));
  const auto q = pool_insert(s, 0, 8);
  CHECK(q != p);

  const auto oldest = pool_get_oldest(s, 0);
  CHECK(oldest.pid == p);
  CHECK(oldest.ts == iv(3, 3));
  CHECK(pool_remove(s, 1, p) == std::nullopt);  // wrong pool
  CHECK(pool_remove(s, 0, p) == 7);
  CHECK(pool_remove(s, 0, p) == std::nullopt);
  CHECK(pool_get_oldest(s, 0).pid == q);
}

TEST_CASE("timestamp generator") {
  SUBCASE("solo") {
    std::int64_t counter = 1;
    TimestampGen g;
    while (!g.step(counter)) {
    }
    CHECK(g.result == iv(1, 1));
    CHECK(counter == 2);
  }
  SUBCASE("CAS failure") {
    std::int64_t counter = 1;
    TimestampGen g;
    CHECK_FALSE(g.step(counter));  // reads 1
    counter = 3;                   // environment moves the counter twice
    CHECK_FALSE(g.step(counter));  // CAS fails
    CHECK(g.step(counter));
    CHECK(g.result == iv(1, 2));
    CHECK(counter == 3);
  }
}

TEST_CASE("enq_of and in_queue") {
  auto cfg = Machine::initial(1);
  CHECK(in_queue(cfg).empty());
  const auto e = cfg.history.add_event(0, Op::Enq, Value::integer(7));
  cfg.history.complete(e, Value::unit());
  cfg.ghost[e] = iv(3, 3);
  cfg.state.pools[0].push_back({1, 7, iv(3, 3)});
  cfg.state.counter = 4;
  CHECK(enq_of(cfg.history, cfg.ghost, 0, iv(3, 3)) == e);
  CHECK_FALSE(enq_of(cfg.history, cfg.ghost, 0, iv(4, 4)).has_value());
  CHECK(in_queue(cfg) == std::vector<EventId>{e});
  Violations out;
  check_ts_inv(cfg, out);
  CHECK(out.empty());
}

TEST_CASE("INV_ALG(i): ordered in-pool enqueues need ordered timestamps") {
  auto cfg = Machine::initial(2);
  Violations out;
  check_ts_inv(cfg, out);
  CHECK(out.empty());

  const auto e1 = cfg.history.add_event(0, Op::Enq, Value::integer(1));
  cfg.history.complete(e1, Value::unit());
  const auto e2 = cfg.history.add_event(1, Op::Enq, Value::integer(2));
  cfg.history.complete(e2, Value::unit());
  const std::vector<Edge> edge{{e1, e2}};
  cfg.history.add_edges(edge);
  cfg.ghost[e1] = iv(1, 2);
  cfg.ghost[e2] = iv(2, 2);
  cfg.state.pools[0].push_back({1, 1, iv(1, 2)});
  cfg.state.pools[1].push_back({2, 2, iv(2, 2)});
  cfg.state.counter = 3;
  check_ts_inv(cfg, out);
  CHECK(has(out, "INV_ALG(i)"));

  out.clear();
  cfg.ghost[e1] = iv(1, 1);
  cfg.state.pools[0][0].ts = iv(1, 1);
  check_ts_inv(cfg, out);
  CHECK(out.empty());
}

TEST_CASE("a running dequeue has seen nothing before its first iteration") {
  Runner<Machine> runner(workload({{"Enq(1)"}, {"Deq()"}}), {});
  auto s = runner.start();
  CHECK(runner.apply(s, {0, 0}).empty());
  CHECK(runner.apply(s, {1, 0}).empty());
  CHECK(seen(s.cfg, runner.event_id(1, 0)).empty());
}

TEST_CASE("removing 2 orders Enq(2) before the enqueues still queued") {
  // Enq(1);Enq(3) on one thread, Enq(2);Deq() on another, Deq() on a third.
  const auto w = workload({{"Enq(1)", "Enq(3)"}, {"Enq(2)", "Deq()"}, {"Deq()"}});
  Runner<Machine> runner(w, {});
  const EventId enq1 = runner.event_id(0, 0), enq3 = runner.event_id(0, 1), enq2 = runner.event_id(1, 0);
  std::size_t witnessed = 0;
  for (std::uint64_t seed = 0; seed < 400 && witnessed < 5; ++seed) {
    const auto r = random_run(runner, seed);
    auto s = runner.start();
    for (const auto& c : r.schedule) {
      const History before = s.cfg.history;
      if (!runner.apply(s, c).empty()) break;
      const auto& h = s.cfg.history;
      const auto fresh = std::find_if(h.events().begin(), h.events().end(), [&](const Event& e) {
        return e.op == Op::Deq && e.completed() && !before.event(e.id).completed();
      });
      if (fresh == h.events().end()) continue;
      const bool first_removal = std::none_of(before.events().begin(), before.events().end(),
                                              [](const Event& e) { return e.op == Op::Deq && e.completed(); });
      if (first_removal && fresh->result == Value::integer(2) && before.contains(enq1) && before.event(enq1).completed() &&
          !before.precedes(enq2, enq1) && !before.precedes(enq1, enq2)) {
        ++witnessed;
        CHECK(h.precedes(enq2, enq1));
        if (before.contains(enq3) && before.event(enq3).completed()) CHECK(h.precedes(enq2, enq3));
        for (const auto& d : h.events()) {
          if (d.op == Op::Deq && !d.completed()) CHECK(h.precedes(fresh->id, d.id));
        }
      }
      break;
    }
  }
  CHECK(witnessed > 0);
}

TEST_CASE("small TS workloads pass every check") {
  for (const auto& scripts : std::vector<std::vector<std::vector<std::string>>>{
           {{"Enq(1)"}, {"Enq(2)"}, {"Deq()"}},
           {{"Enq(1)", "Enq(2)"}, {"Deq()"}},
           {{"Enq(1)", "Enq(2)"}, {"Enq(3)", "Deq()"}},
       }) {
    auto tally = explore_all<Machine>(workload(scripts));
    for (auto& f : tally.failures) MESSAGE(describe(f));
    CHECK(tally.stats.runs > 0);
    CHECK(tally.stats.failing_runs == 0);
  }
}

TEST_CASE("TS mutations are caught where the unmutated queue passes") {
  const auto w = workload({{"Enq(1)"}, {"Enq(2)"}, {"Deq()"}});
  CHECK(explore_all<Machine>(w).stats.failing_runs == 0);
  for (const char* name : {"ts-skip-startts-guard", "ts-no-scan-edges"}) {
    CheckOptions opts;
    opts.mutations = *mutation_by_name(name);
    CAPTURE(name);
    CHECK(explore_all<Machine>(w, opts, Reduction::StateCache, 1).stats.failing_runs > 0);
  }
}

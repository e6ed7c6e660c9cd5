// Acceptance gate: one PASS/FAIL line per criterion, with details indented
// underneath. Exit status is 0 iff every failing criterion is listed in
// --known-failures (so ctest tracks regressions without hiding the FAILs).

#include <chrono>
#include <cstdio>
#include <future>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "../common/oracles.hpp"
#include "polarize/driver.hpp"

using namespace polarize;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Criterion {
  std::string id;
  bool pass = false;
  std::string summary;
  std::vector<std::string> details;
};

Workload make(std::vector<std::vector<std::string>> scripts, std::vector<std::string> prelude = {}, std::size_t retries = 2) {
  Workload w;
  for (const auto& s : scripts) {
    auto& calls = w.scripts.emplace_back();
    for (const auto& c : s) calls.push_back(parse_call(c));
  }
  for (const auto& c : prelude) w.prelude.push_back(parse_call(c));
  w.bounds.max_retries = retries;
  return w;
}

std::string label(const Workload& w) {
  std::string s;
  if (!w.prelude.empty()) {
    s += "{";
    for (std::size_t i = 0; i < w.prelude.size(); ++i) s += (i ? "," : "") + std::to_string(w.prelude[i].arg.as_int());
    s += "} ";
  }
  for (std::size_t t = 0; t < w.scripts.size(); ++t) {
    s += t ? " | " : "";
    for (std::size_t i = 0; i < w.scripts[t].size(); ++i) s += (i ? ";" : "") + to_string(w.scripts[t][i]);
  }
  return s;
}

struct Explored {
  ExploreStats stats;
  std::map<std::string, std::size_t> rules;
  std::string example;
  double seconds = 0;
};

template <StepMachine M>
Explored explore_one(const Workload& w, const CheckOptions& opts) {
  const auto t0 = Clock::now();
  Runner<M> runner(w, opts);
  ExhaustiveExplorer<M> ex(runner, Reduction::StateCache);
  Explored out;
  out.stats = ex.run([&](const RunResult<M>& r) {
    std::set<std::string> rules;
    for (const auto& v : r.violations) rules.insert(v.rule);
    for (const auto& rule : rules) ++out.rules[rule];
    if (!r.ok() && out.example.empty()) out.example = schedule_to_string(r.schedule);
    return true;
  });
  out.seconds = since(t0);
  return out;
}

std::string rules_text(const std::map<std::string, std::size_t>& rules) {
  std::string s;
  for (const auto& [rule, n] : rules) s += (s.empty() ? "" : ", ") + rule + " x" + std::to_string(n);
  return s;
}

// Explores every workload concurrently (each exploration is sequential).
template <StepMachine M>
bool catalogue(const char* name, const std::vector<Workload>& ws, double budget, std::vector<std::string>& details,
               std::string& summary) {
  const auto t0 = Clock::now();
  std::vector<std::future<Explored>> jobs;
  for (const auto& w : ws) jobs.push_back(std::async(std::launch::async, [&w] { return explore_one<M>(w, {}); }));
  std::size_t runs = 0, failing = 0, clean = 0;
  for (std::size_t i = 0; i < ws.size(); ++i) {
    const auto r = jobs[i].get();
    runs += r.stats.runs;
    failing += r.stats.failing_runs;
    clean += r.stats.failing_runs == 0;
    std::ostringstream line;
    line << name << " " << label(ws[i]) << ": " << r.stats.runs << " runs, " << r.stats.failing_runs << " failing, "
         << r.stats.states << " states, " << r.seconds << "s";
    if (!r.rules.empty()) line << " [" << rules_text(r.rules) << "] e.g. schedule \"" << r.example << "\"";
    details.push_back(line.str());
  }
  const double secs = since(t0);
  std::ostringstream s;
  s << name << ": " << clean << "/" << ws.size() << " workloads clean, " << failing << " of " << runs << " runs failing, "
    << secs << "s (budget " << budget << "s)";
  summary += (summary.empty() ? "" : "; ") + s.str();
  return failing == 0 && secs < budget;
}

// ---------------------------------------------------------------------------

History intro_enqueues() {
  History h;
  for (std::int64_t v : {1, 2, 3}) h.complete(h.add_event(static_cast<ThreadId>(v - 1), Op::Enq, Value::integer(v)), Value::unit());
  const std::vector<Edge> e{{0, 2}};
  h.add_edges(e);
  return h;
}

Criterion ac1() {
  Criterion c{"AC1"};
  const auto t0 = Clock::now();
  const auto exts = linear_extensions(intro_enqueues());
  std::set<std::int64_t> allowed;
  for (const auto& seq : exts) {
    SpecState st = queue_spec().initial();
    for (const auto& e : seq) st = queue_spec().apply(st, e.op, e.arg).at(0).state;
    for (const auto& o : queue_spec().apply(st, Op::Deq, Value::unit())) allowed.insert(o.ret.as_int());
  }
  const double secs = since(t0);
  c.pass = exts.size() == 3 && allowed == std::set<std::int64_t>{1, 2} && secs < 1.0;
  std::string a;
  for (auto v : allowed) a += (a.empty() ? "" : ",") + std::to_string(v);
  c.summary = std::to_string(exts.size()) + " extensions; Deq may return {" + a + "}; " + std::to_string(secs) + "s";
  return c;
}

Criterion ac2() {
  Criterion c{"AC2"};
  auto ev = [](EventId id, Op op, std::int64_t arg, Value res) {
    return Event{id, 0, op, op == Op::Deq ? Value::unit() : Value::integer(arg), res};
  };
  const std::vector<Event> yes{ev(0, Op::Enq, 2, Value::unit()), ev(1, Op::Enq, 1, Value::unit()),
                               ev(2, Op::Enq, 3, Value::unit()), ev(3, Op::Deq, 0, Value::integer(2))};
  const std::vector<Event> no{ev(0, Op::Enq, 1, Value::unit()), ev(1, Op::Enq, 2, Value::unit()),
                              ev(2, Op::Enq, 3, Value::unit()), ev(3, Op::Deq, 0, Value::integer(2))};
  const bool a = member(yes, queue_spec()), b = member(no, queue_spec());
  c.pass = a && !b;
  c.summary = std::string("[Enq(2);Enq(1);Enq(3);Deq():2] ") + (a ? "member" : "not member") +
              ", [Enq(1);Enq(2);Enq(3);Deq():2] " + (b ? "member" : "not member");
  return c;
}

const std::vector<Workload>& ts_catalogue() {
  static const std::vector<Workload> ws{
      make({{"Enq(1)"}, {"Enq(2)"}, {"Deq()"}}),
      make({{"Enq(1)", "Enq(2)"}, {"Deq()"}}),
      make({{"Enq(1)", "Deq()"}, {"Enq(2)"}}),
      make({{"Enq(1)", "Enq(2)"}, {"Enq(3)", "Deq()"}}),
      make({{"Enq(1)", "Deq()"}, {"Enq(2)", "Deq()"}}),
      make({{"Enq(1)", "Enq(3)"}, {"Enq(2)"}, {"Deq()"}}),
      make({{"Enq(1)", "Enq(2)"}, {"Deq()", "Enq(3)"}}),
      make({{"Enq(1)", "Enq(2)", "Enq(3)"}, {"Deq()", "Deq()"}}),
      make({{"Enq(1)", "Enq(2)"}, {"Deq()"}, {"Deq()"}}, {}, 1),
      make({{"Enq(1)", "Deq()"}, {"Enq(2)"}, {"Enq(3)"}}, {}, 1),
      make({{"Enq(1)", "Enq(3)"}, {"Enq(2)", "Deq()"}, {"Deq()"}}, {}, 1),
  };
  return ws;
}

const std::vector<Workload>& hw_catalogue() {
  static const std::vector<Workload> ws{
      make({{"Enq(1)"}, {"Enq(2)"}, {"Deq()"}}),
      make({{"Enq(1)", "Enq(2)"}, {"Deq()"}}),
      make({{"Enq(1)", "Deq()"}, {"Enq(2)"}}),
      make({{"Enq(1)", "Enq(2)"}, {"Enq(3)", "Deq()"}}),
      make({{"Enq(1)", "Deq()"}, {"Enq(2)", "Deq()"}}),
      make({{"Enq(1)", "Enq(3)"}, {"Enq(2)"}, {"Deq()"}}),
      make({{"Enq(1)", "Enq(2)"}, {"Deq()", "Enq(3)"}}),
      make({{"Enq(1)", "Enq(2)", "Enq(3)"}, {"Deq()", "Deq()"}}),
      make({{"Enq(1)", "Enq(2)"}, {"Deq()"}, {"Deq()"}}, {}, 1),
      make({{"Enq(1)", "Deq()"}, {"Enq(2)"}, {"Enq(3)"}}),
      make({{"Enq(1)", "Enq(3)"}, {"Enq(2)", "Deq()"}, {"Deq()"}}),
  };
  return ws;
}

const std::vector<Workload>& set_catalogue() {
  static const std::vector<Workload> ws{
      make({{"Ins(1)"}, {"Rem(1)"}, {"Con(1)"}}),
      make({{"Ins(2)"}, {"Rem(1)"}, {"Con(1)"}}, {"Ins(1)"}),
      make({{"Ins(1)", "Rem(1)"}, {"Ins(1)", "Con(1)"}}),
      make({{"Con(2)"}, {"Rem(2)"}, {"Ins(2)"}}, {"Ins(1)", "Ins(2)"}),
      make({{"Ins(1)", "Ins(2)"}, {"Rem(1)", "Con(2)"}}),
      make({{"Ins(3)"}, {"Rem(2)"}, {"Con(3)", "Con(2)"}}, {"Ins(1)", "Ins(2)"}),
      make({{"Ins(1)", "Rem(2)"}, {"Ins(2)", "Con(1)"}, {"Rem(1)", "Con(2)"}}),
      make({{"Rem(1)", "Rem(2)"}, {"Con(2)", "Ins(3)"}, {"Con(3)"}}, {"Ins(1)", "Ins(2)", "Ins(4)"}, 1),
  };
  return ws;
}

Criterion ac3() {
  Criterion c{"AC3"};
  c.pass = catalogue<ts::Machine>("tsqueue", ts_catalogue(), 300, c.details, c.summary);
  return c;
}

Criterion ac4() {
  Criterion c{"AC4"};
  const bool hw = catalogue<hw::Machine>("hwqueue", hw_catalogue(), 300, c.details, c.summary);
  const bool set = catalogue<optset::Machine>("optset", set_catalogue(), 300, c.details, c.summary);

  // The example execution of the set reproduces the stated linearization.
  Runner<optset::Machine> runner(
      make({{"Rem(1)", "Rem(2)"}, {"Con(2)", "Ins(3)"}, {"Con(3)"}}, {"Ins(1)", "Ins(2)", "Ins(4)"}), {});
  const auto r = runner.replay(parse_schedule("1.0 1.0 2.0 2.0 0.0 0.0 0.0 0.0 0.0 0.0 1.0 1.0 1.0 1.0 2.0 2.0"));
  const std::string stated =
      "Ins(1):true Ins(2):true Ins(4):true Rem(1):true Con(2):true Rem(2):true Con(3):false Ins(3):true";
  bool found = false, all_member = true;
  const auto exts = linear_extensions(r.final.cfg.history);
  for (const auto& x : exts) {
    std::string s;
    for (const auto& e : x) s += (s.empty() ? "" : " ") + std::string(op_name(e.op)) + "(" + e.arg.to_string() + "):" + e.result->to_string();
    found |= s == stated;
    all_member &= oracle::replay_set(x);
  }
  const bool figure = r.ok() && found && all_member;
  c.details.push_back(std::string("set figure: run ") + (r.ok() ? "clean" : "violating") + ", " + std::to_string(exts.size()) +
                      " extensions all members: " + (all_member ? "yes" : "no") + ", stated linearization present: " +
                      (found ? "yes" : "no"));
  c.pass = hw && set && figure;
  return c;
}

Criterion ac5() {
  Criterion c{"AC5"};
  // Each generator is a step sequence; a schedule is a word over {0,1}.
  std::size_t sequential = 0, ordered = 0, overlapping = 0, incomparable = 0;
  std::vector<int> word;
  std::function<void(ts::TimestampGen, ts::TimestampGen, std::int64_t)> go = [&](ts::TimestampGen a, ts::TimestampGen b,
                                                                               std::int64_t counter) {
    const bool a_done = a.pc == ts::TimestampGen::Pc::Done, b_done = b.pc == ts::TimestampGen::Pc::Done;
    if (a_done && b_done) {
      // Non-overlapping iff one call's steps all precede the other's.
      const auto first_b = std::find(word.begin(), word.end(), 1) - word.begin();
      const auto last_a = word.rend() - std::find(word.rbegin(), word.rend(), 0) - 1;
      const auto first_a = std::find(word.begin(), word.end(), 0) - word.begin();
      const auto last_b = word.rend() - std::find(word.rbegin(), word.rend(), 1) - 1;
      if (last_a < first_b || last_b < first_a) {
        ++sequential;
        const auto& [x, y] = last_a < first_b ? std::pair(a.result, b.result) : std::pair(b.result, a.result);
        ordered += ts::ts_lt(x, y);
      } else {
        ++overlapping;
        incomparable += !ts::ts_lt(a.result, b.result) && !ts::ts_lt(b.result, a.result);
      }
      return;
    }
    if (!a_done) {
      auto a2 = a;
      auto ctr = counter;
      a2.step(ctr);
      word.push_back(0);
      go(a2, b, ctr);
      word.pop_back();
    }
    if (!b_done) {
      auto b2 = b;
      auto ctr = counter;
      b2.step(ctr);
      word.push_back(1);
      go(a, b2, ctr);
      word.pop_back();
    }
  };
  go({}, {}, 1);
  c.pass = sequential > 0 && ordered == sequential && incomparable > 0;
  c.summary = std::to_string(sequential) + " non-overlapping interleavings, " + std::to_string(ordered) + " ts_lt-ordered; " +
              std::to_string(overlapping) + " overlapping, " + std::to_string(incomparable) + " incomparable";
  return c;
}

template <StepMachine M>
std::pair<bool, std::string> detect(const char* mutation, const Workload& w) {
  CheckOptions opts;
  opts.mutations = *mutation_by_name(mutation);
  const auto base = explore_one<M>(w, {});
  const auto mut = explore_one<M>(w, opts);
  std::ostringstream s;
  s << mutation << " on " << label(w) << ": " << mut.stats.failing_runs << " of " << mut.stats.runs << " runs flagged ["
    << rules_text(mut.rules) << "], " << mut.seconds << "s; unmutated " << base.stats.failing_runs << " failing";
  if (!mut.example.empty()) s << "; witness \"" << mut.example << "\"";
  return {mut.stats.failing_runs > 0 && mut.seconds < 300, s.str()};
}

Criterion ac6() {
  Criterion c{"AC6"};
  const auto three = make({{"Enq(1)"}, {"Enq(2)"}, {"Deq()"}});
  const std::vector<std::pair<bool, std::string>> rs{
      detect<hw::Machine>("hw-emptiness", make({{"Enq(1)"}, {"Deq()"}})),
      detect<ts::Machine>("ts-skip-startts-guard", three),
      detect<ts::Machine>("ts-no-scan-edges", three),
      detect<optset::Machine>("set-skip-validation", make({{"Ins(1)"}, {"Rem(1)"}, {"Ins(1)"}})),
  };
  std::size_t hits = 0;
  for (const auto& [ok, text] : rs) {
    hits += ok;
    c.details.push_back(text);
  }
  c.pass = hits == rs.size();
  c.summary = std::to_string(hits) + "/" + std::to_string(rs.size()) + " mutations detected";
  return c;
}

Criterion ac7() {
  Criterion c{"AC7"};
  std::mt19937_64 rng(2024);
  std::size_t agree = 0, yes = 0;
  const std::size_t total = 200;
  for (std::size_t i = 0; i < total; ++i) {
    const char* spec = i % 2 ? "set" : "queue";
    const auto h = oracle::random_history(rng, spec, 5);
    const auto rv = default_retvals(spec_by_name(spec), h);
    const bool got = is_linearizable(h, spec_by_name(spec), rv).linearizable;
    const bool want = oracle::linearizable(h, spec, rv);
    agree += got == want;
    yes += want;
    if (got != want) c.details.push_back(std::string("disagreement on ") + spec + " history " + history_to_json(h).dump());
  }
  c.pass = agree == total;
  c.summary = std::to_string(agree) + "/" + std::to_string(total) + " agree (" + std::to_string(yes) + " linearizable)";
  return c;
}

template <StepMachine M>
std::pair<std::size_t, std::size_t> replay_check(const Workload& w, std::uint64_t seed, std::size_t count) {
  Runner<M> runner(w, {});
  std::size_t same = 0, n = 0;
  const RunVisitor<M> visit = [&](const RunResult<M>& r) {
    ++n;
    const auto again = runner.replay(r.schedule);
    same += again.schedule == r.schedule && again.violations == r.violations && again.status == r.status &&
            again.final.key() == r.final.key() && again.final.concrete == r.final.concrete &&
            history_to_json(again.final.cfg.history).dump() == history_to_json(r.final.cfg.history).dump();
    return true;
  };
  explore_random(runner, seed, count, default_workers(), visit);
  return {same, n};
}

Criterion ac8() {
  Criterion c{"AC8"};
  const std::vector<std::pair<std::string, std::pair<std::size_t, std::size_t>>> rs{
      {"tsqueue", replay_check<ts::Machine>(make({{"Enq(1)", "Deq()"}, {"Enq(2)", "Deq()"}, {"Enq(3)"}}), 1, 100)},
      {"hwqueue", replay_check<hw::Machine>(make({{"Enq(1)", "Deq()"}, {"Enq(2)", "Deq()"}, {"Enq(3)"}}), 2, 100)},
      {"optset", replay_check<optset::Machine>(make({{"Ins(1)", "Rem(2)"}, {"Ins(2)", "Con(1)"}, {"Rem(1)"}}), 3, 100)},
  };
  c.pass = true;
  for (const auto& [name, r] : rs) {
    c.pass &= r.first == r.second && r.second == 100;
    c.summary += (c.summary.empty() ? "" : "; ") + name + " " + std::to_string(r.first) + "/" + std::to_string(r.second);
  }
  c.summary += " random runs replay identically";
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<std::string> known;
  std::vector<std::string> only;
  app.add_option("--known-failures", known, "criteria whose FAIL does not affect the exit status")->delimiter(',');
  app.add_option("--only", only, "run just these criteria")->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, Criterion (*)()>> all{{"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4},
                                                                 {"AC5", ac5}, {"AC6", ac6}, {"AC7", ac7}, {"AC8", ac8}};
  std::size_t passed = 0, ran = 0;
  bool unexpected = false;
  for (const auto& [id, fn] : all) {
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto t0 = Clock::now();
    const auto c = fn();
    ++ran;
    passed += c.pass;
    const bool excused = std::find(known.begin(), known.end(), id) != known.end();
    if (!c.pass && !excused) unexpected = true;
    std::printf("%s %s  %s (%.1fs)%s\n", c.id.c_str(), c.pass ? "PASS" : "FAIL", c.summary.c_str(), since(t0),
                !c.pass && excused ? "  [known failure]" : "");
    for (const auto& d : c.details) std::printf("    %s\n", d.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria pass\n", passed, ran);
  return unexpected ? 1 : 0;
}

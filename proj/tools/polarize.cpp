// polarize: explore, replay and export abstract-history checks of the TS
// queue, the Herlihy-Wing queue and the optimistic set.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "polarize/driver.hpp"
#include "polarize/linoracle.hpp"

using namespace polarize;

namespace {

struct RunFlags {
  std::string config;
  std::string mode;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> count;
  std::string cadence;
  std::optional<std::size_t> max_events;
  std::string out;
  std::vector<std::string> mutations;
  bool all_runs = false;
};

RunConfig configure(const RunFlags& f) {
  auto c = load_config(f.config);
  if (!f.mode.empty()) {
    if (f.mode == "exhaustive") {
      c.mode.kind = ExploreMode::Kind::Exhaustive;
    } else if (f.mode == "random") {
      c.mode.kind = ExploreMode::Kind::Random;
    } else {
      throw ConfigError("--mode must be exhaustive or random");
    }
  }
  if (f.seed) c.mode.seed = *f.seed;
  if (f.count) c.mode.count = *f.count;
  if (!f.cadence.empty()) {
    const auto cad = cadence_by_name(f.cadence);
    if (!cad) throw ConfigError("--cadence must be end, on-complete or paranoid");
    c.checks.cadence = *cad;
  }
  if (f.max_events) {
    if (*f.max_events == 0) throw ConfigError("--max-events must be positive");
    c.checks.max_events = *f.max_events;
  }
  if (!f.mutations.empty()) {
    c.mutations = f.mutations;
    std::string joined;
    for (const auto& m : f.mutations) joined += (joined.empty() ? "" : ",") + m;
    const auto mut = mutation_by_name(joined);
    if (!mut) throw ConfigError("unknown mutation in '" + joined + "'");
    c.checks.mutations = *mut;
  }
  if (!f.out.empty()) c.report_path = f.out;
  if (f.all_runs) c.report_all_runs = true;
  return c;
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& err) {
    throw ConfigError(path + ": " + err.what());
  }
}

// The schedule of run `index` in a JSON-lines report.
std::string schedule_from_report(const std::string& path, std::size_t index) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw ConfigError(path + ": unparsable line");
    if (j.value("type", "") == "run" && j.value("index", std::size_t{0}) == index && j.contains("schedule")) {
      return j.at("schedule").get<std::string>();
    }
  }
  throw ConfigError(path + " has no run with index " + std::to_string(index));
}

void print_violations(const Violations& vs) {
  for (const auto& v : vs) {
    std::cout << "  " << category_name(v.category) << " " << v.rule << " {";
    for (auto id : v.witness) std::cout << " " << id;
    std::cout << " }";
    if (!v.detail.empty()) std::cout << " " << v.detail;
    std::cout << "\n";
  }
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out);
  if (!f) throw ConfigError("cannot write " + out);
  f << text;
}

int cmd_run(const RunFlags& flags) {
  const auto c = configure(flags);
  std::ofstream file;
  std::ostream* report = nullptr;
  if (c.report_path) {
    file.open(*c.report_path, std::ios::app);
    if (!file) throw ConfigError("cannot write " + *c.report_path);
    report = &file;
  }
  const auto s = run(c, report, default_workers());
  std::cout << c.structure << ": " << s.stats.runs << " runs, " << s.stats.failing_runs << " failing, "
            << s.stats.bound_exhausted << " bound-exhausted";
  if (c.mode.kind == ExploreMode::Kind::Exhaustive) std::cout << ", " << s.stats.states << " states";
  std::cout << "\n";
  for (const auto& [rule, n] : s.rules) std::cout << "  " << rule << ": " << n << "\n";
  std::cout << (s.exit_code == kExitPass ? "PASS" : "FAIL") << "\n";
  return s.exit_code;
}

int cmd_replay(const std::string& config, std::string schedule, const std::string& report, std::optional<std::size_t> index,
               bool as_json) {
  const auto c = load_config(config);
  if (!report.empty()) {
    if (!index) throw ConfigError("--report needs --index");
    schedule = schedule_from_report(report, *index);
  }
  const auto r = replay(c, parse_schedule(schedule));
  if (as_json) {
    std::cout << r.record.dump() << "\n";
  } else {
    std::cout << "schedule [" << schedule_to_string(r.schedule) << "] " << run_status_name(r.status) << "\n";
    print_violations(r.violations);
    std::cout << (r.ok() ? "PASS" : "FAIL") << "\n";
  }
  return r.ok() ? kExitPass : kExitViolation;
}

int cmd_export(const std::string& history, const std::string& config, const std::string& schedule, const std::string& which,
               const std::string& format, const std::string& out) {
  History h;
  if (!history.empty()) {
    h = history_from_json(read_json(history));
  } else {
    if (config.empty()) throw ConfigError("export needs --history or --config with --schedule");
    const auto r = replay(load_config(config), parse_schedule(schedule));
    if (which == "abstract") {
      h = r.abstract;
    } else if (which == "concrete") {
      h = r.concrete;
    } else {
      throw ConfigError("--which must be abstract or concrete");
    }
  }
  if (format == "dot") {
    emit(history_to_dot(h), out);
  } else if (format == "json") {
    emit(history_to_json(h).dump(2) + "\n", out);
  } else {
    throw ConfigError("--format must be dot or json");
  }
  return kExitPass;
}

int cmd_oracle(const std::string& history, const std::string& spec_name, std::size_t max_events) {
  const auto h = history_from_json(read_json(history));
  const SeqSpec* spec = nullptr;
  try {
    spec = &spec_by_name(spec_name);
  } catch (const std::invalid_argument& err) {
    throw ConfigError(err.what());
  }
  const auto v = is_linearizable(h, *spec, default_retvals(*spec, h), max_events);
  if (v.linearizable) {
    std::cout << "linearizable:";
    for (const auto& e : *v.witness) std::cout << " " << to_string(e);
    std::cout << "\n";
    return kExitPass;
  }
  std::cout << "not linearizable (" << v.explored << " search nodes exhausted)\n";
  return kExitViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Abstract-history linearizability checks for concurrent data structures"};
  app.require_subcommand(1);

  RunFlags flags;
  auto* run_cmd = app.add_subcommand("run", "explore a workload and report violations");
  run_cmd->add_option("--config", flags.config, "config file (JSON)")->required();
  run_cmd->add_option("--mode", flags.mode, "exhaustive or random");
  run_cmd->add_option("--seed", flags.seed, "random-mode seed");
  run_cmd->add_option("--count", flags.count, "random-mode run count");
  run_cmd->add_option("--cadence", flags.cadence, "end, on-complete or paranoid");
  run_cmd->add_option("--max-events", flags.max_events, "event cap for check_abs and the oracle");
  run_cmd->add_option("--out", flags.out, "JSON-lines report (appended)");
  run_cmd->add_option("--mutation", flags.mutations, "inject a registered fault (repeatable)");
  run_cmd->add_flag("--all-runs", flags.all_runs, "report passing runs too");

  std::string config, schedule, report, history, which = "abstract", format = "dot", out, spec = "queue";
  std::optional<std::size_t> index;
  bool as_json = false;
  std::size_t max_events = 24;

  auto* replay_cmd = app.add_subcommand("replay", "re-execute one recorded schedule");
  replay_cmd->add_option("--config", config, "config file (JSON)")->required();
  auto* sched_opt = replay_cmd->add_option("--schedule", schedule, "schedule as written in reports");
  auto* report_opt = replay_cmd->add_option("--report", report, "JSON-lines report to take the schedule from");
  replay_cmd->add_option("--index", index, "run index in the report");
  replay_cmd->add_flag("--json", as_json, "print the run record");
  sched_opt->excludes(report_opt);

  auto* export_cmd = app.add_subcommand("export", "render a history as DOT or JSON");
  auto* hist_opt = export_cmd->add_option("--history", history, "history file (JSON)");
  export_cmd->add_option("--config", config, "config to replay")->excludes(hist_opt);
  export_cmd->add_option("--schedule", schedule, "schedule to replay");
  export_cmd->add_option("--which", which, "abstract or concrete");
  export_cmd->add_option("--format", format, "dot or json");
  export_cmd->add_option("--out", out, "output file (default stdout)");

  auto* oracle_cmd = app.add_subcommand("oracle", "classical linearizability check of a history");
  oracle_cmd->add_option("--history", history, "history file (JSON)")->required();
  oracle_cmd->add_option("--spec", spec, "queue or set");
  oracle_cmd->add_option("--max-events", max_events, "event cap");

  auto* mutations_cmd = app.add_subcommand("mutations", "list registered mutation names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitConfig;
  }

  try {
    if (*run_cmd) return cmd_run(flags);
    if (*replay_cmd) {
      if (schedule.empty() && report.empty()) throw ConfigError("replay needs --schedule or --report");
      return cmd_replay(config, schedule, report, index, as_json);
    }
    if (*export_cmd) return cmd_export(history, config, schedule, which, format, out);
    if (*oracle_cmd) return cmd_oracle(history, spec, max_events);
    if (*mutations_cmd) {
      for (auto name : mutation_names()) std::cout << name << "\n";
      return kExitPass;
    }
  } catch (const ConfigError& err) {
    std::cerr << "polarize: " << err.what() << "\n";
    return kExitConfig;
  } catch (const FormatError& err) {
    std::cerr << "polarize: " << err.what() << "\n";
    return kExitConfig;
  } catch (const ScheduleMismatch& err) {
    std::cerr << "polarize: schedule mismatch: " << err.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& err) {
    std::cerr << "polarize: " << err.what() << "\n";
    return kExitConfig;
  } catch (const SizeLimit& err) {
    std::cerr << "polarize: " << err.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}

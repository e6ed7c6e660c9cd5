#include "polarize/config.hpp"

#include <algorithm>
#include <fstream>

namespace polarize {
namespace {

bool allowed(std::string_view structure, Op op) {
  if (structure == "optset") return op == Op::Insert || op == Op::Remove || op == Op::Contains;
  return op == Op::Enq || op == Op::Deq;
}

Call call_from(const json& j, std::string_view structure) {
  if (!j.is_string()) throw ConfigError("calls are strings like \"Enq(1)\", got " + j.dump());
  Call c;
  try {
    c = parse_call(j.get<std::string>());
  } catch (const std::invalid_argument& err) {
    throw ConfigError(err.what());
  }
  if (!allowed(structure, c.op)) {
    throw ConfigError(std::string(structure) + " does not support " + std::string(op_name(c.op)));
  }
  return c;
}

std::size_t positive(const json& caps, const char* key, std::size_t fallback) {
  if (!caps.contains(key)) return fallback;
  const auto& v = caps.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() <= 0) throw ConfigError(std::string("caps.") + key + " must be a positive integer");
  return v.get<std::size_t>();
}

}  // namespace

std::vector<std::string_view> structure_names() { return {"tsqueue", "hwqueue", "optset"}; }

std::string_view spec_for(std::string_view structure) {
  if (structure == "tsqueue" || structure == "hwqueue") return "queue";
  if (structure == "optset") return "set";
  throw ConfigError("unknown structure '" + std::string(structure) + "'");
}

RunConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  try {
    RunConfig c;
    c.structure = j.at("structure").get<std::string>();
    c.spec = j.value("spec", std::string(spec_for(c.structure)));
    if (c.spec != spec_for(c.structure)) throw ConfigError(c.structure + " is checked against the " + std::string(spec_for(c.structure)) + " spec, not " + c.spec);

    const auto& threads = j.at("threads");
    if (!threads.is_array() || threads.empty()) throw ConfigError("threads must be a non-empty array of call lists");
    for (const auto& script : threads) {
      if (!script.is_array()) throw ConfigError("each thread is an array of calls");
      auto& calls = c.workload.scripts.emplace_back();
      for (const auto& call : script) calls.push_back(call_from(call, c.structure));
    }
    for (const auto& v : j.value("initial", json::array())) {
      if (!v.is_number_integer()) throw ConfigError("initial members are integers");
      const auto x = Value::integer(v.get<std::int64_t>());
      c.workload.prelude.push_back({c.structure == "optset" ? Op::Insert : Op::Enq, x});
    }

    if (j.contains("mode")) {
      const auto& m = j.at("mode");
      const std::string kind = m.is_string() ? m.get<std::string>() : m.at("kind").get<std::string>();
      if (kind == "exhaustive") {
        c.mode.kind = ExploreMode::Kind::Exhaustive;
        if (m.is_object() && m.value("reduction", std::string("state-cache")) == "none") c.mode.reduction = Reduction::None;
      } else if (kind == "random") {
        c.mode.kind = ExploreMode::Kind::Random;
        if (m.is_object()) {
          c.mode.seed = m.value("seed", std::uint64_t{0});
          c.mode.count = m.value("count", std::size_t{100});
        }
        if (c.mode.count == 0) throw ConfigError("mode.count must be positive");
      } else {
        throw ConfigError("mode must be exhaustive or random, not " + kind);
      }
    }

    const auto cadence = cadence_by_name(j.value("cadence", std::string("on-complete")));
    if (!cadence) throw ConfigError("cadence must be end, on-complete or paranoid");
    c.checks.cadence = *cadence;
    c.checks.crosscheck = j.value("crosscheck", true);

    const auto caps = j.value("caps", json::object());
    c.checks.max_events = positive(caps, "events", c.checks.max_events);
    c.workload.bounds.max_retries = positive(caps, "retries", c.workload.bounds.max_retries);
    c.workload.bounds.max_steps = positive(caps, "steps", c.workload.bounds.max_steps);
    std::size_t total = c.workload.prelude.size();
    for (const auto& s : c.workload.scripts) total += s.size();
    if (total > History::kMaxEvents) throw ConfigError("workload has more than " + std::to_string(History::kMaxEvents) + " calls");

    if (j.contains("mutations")) {
      const auto& m = j.at("mutations");
      if (m.is_string()) {
        c.mutations.push_back(m.get<std::string>());
      } else {
        c.mutations = m.get<std::vector<std::string>>();
      }
    }
    std::string joined;
    for (const auto& name : c.mutations) joined += (joined.empty() ? "" : ",") + name;
    const auto mut = mutation_by_name(joined);
    if (!mut) throw ConfigError("unknown mutation in '" + joined + "'");
    c.checks.mutations = *mut;

    if (j.contains("output")) {
      const auto& out = j.at("output");
      if (out.contains("report")) c.report_path = out.at("report").get<std::string>();
      c.report_all_runs = out.value("all_runs", false);
    }
    return c;
  } catch (const json::exception& err) {
    throw ConfigError(std::string("malformed config: ") + err.what());
  }
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  json j;
  try {
    j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& err) {
    throw ConfigError(path.string() + ": " + err.what());
  }
  auto c = parse_config(j);
  c.source = path.string();
  return c;
}

json config_to_json(const RunConfig& c) {
  json threads = json::array();
  for (const auto& script : c.workload.scripts) {
    json calls = json::array();
    for (const auto& call : script) calls.push_back(to_string(call));
    threads.push_back(std::move(calls));
  }
  json initial = json::array();
  for (const auto& call : c.workload.prelude) initial.push_back(call.arg.as_int());
  json mode;
  if (c.mode.kind == ExploreMode::Kind::Random) {
    mode = {{"kind", "random"}, {"seed", c.mode.seed}, {"count", c.mode.count}};
  } else {
    mode = {{"kind", "exhaustive"}, {"reduction", c.mode.reduction == Reduction::None ? "none" : "state-cache"}};
  }
  json out = {{"structure", c.structure},
              {"spec", c.spec},
              {"threads", std::move(threads)},
              {"initial", std::move(initial)},
              {"mode", std::move(mode)},
              {"cadence", cadence_name(c.checks.cadence)},
              {"caps",
               {{"events", c.checks.max_events},
                {"retries", c.workload.bounds.max_retries},
                {"steps", c.workload.bounds.max_steps}}},
              {"mutations", c.mutations},
              {"crosscheck", c.checks.crosscheck}};
  if (c.report_path) out["output"] = {{"report", *c.report_path}, {"all_runs", c.report_all_runs}};
  return out;
}

}  // namespace polarize

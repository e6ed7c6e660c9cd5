#include "polarize/serialize.hpp"

#include <sstream>

namespace polarize {
namespace {

Category category_by_name(std::string_view name) {
  for (auto c : {Category::WellFormedness, Category::HistoryUpdate, Category::CommitRejected, Category::Invariant,
                 Category::LoopInvariant, Category::Transition, Category::Abstraction, Category::Discrepancy}) {
    if (category_name(c) == name) return c;
  }
  throw FormatError("unknown violation category '" + std::string(name) + "'");
}

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

json value_to_json(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::Unit:
      return nullptr;
    case Value::Kind::Bool:
      return v.as_bool();
    case Value::Kind::Int:
      return v.as_int();
  }
  return nullptr;
}

Value value_from_json(const json& j) {
  if (j.is_null()) return Value::unit();
  if (j.is_boolean()) return Value::boolean(j.get<bool>());
  if (j.is_number_integer()) return Value::integer(j.get<std::int64_t>());
  throw FormatError("not a value: " + j.dump());
}

json history_to_json(const History& h) {
  json events = json::array();
  for (const auto& e : h.events()) {
    events.push_back({{"id", e.id},
                      {"thread", e.thread},
                      {"op", op_name(e.op)},
                      {"arg", value_to_json(e.arg)},
                      {"result", e.result ? value_to_json(*e.result) : json("todo")}});
  }
  json order = json::array();
  for (const auto& [a, b] : transitive_reduction(h)) order.push_back({a, b});
  return {{"events", std::move(events)}, {"order", std::move(order)}};
}

History history_from_json(const json& j) {
  try {
    History h;
    for (const auto& je : j.at("events")) {
      Event e;
      e.id = je.at("id").get<EventId>();
      e.thread = je.at("thread").get<ThreadId>();
      const auto op = parse_op(je.at("op").get<std::string>());
      if (!op) throw FormatError("unknown op " + je.at("op").dump());
      e.op = *op;
      e.arg = value_from_json(je.value("arg", json(nullptr)));
      const auto& r = je.contains("result") ? je.at("result") : json("todo");
      if (!(r.is_string() && r.get<std::string>() == "todo")) e.result = value_from_json(r);
      h.insert_event_raw(e);
    }
    for (const auto& edge : j.value("order", json::array())) {
      const auto a = edge.at(0).get<EventId>();
      const auto b = edge.at(1).get<EventId>();
      if (!h.contains(a) || !h.contains(b)) throw FormatError("order mentions unknown event");
      if (a == b) throw FormatError("self edge on " + std::to_string(a));
      h.add_order_raw(a, b);
    }
    h.close_raw();
    for (const auto& e : h.events()) {
      if (h.precedes(e.id, e.id)) throw FormatError("order is cyclic");
    }
    return h;
  } catch (const json::exception& err) {
    throw FormatError(std::string("malformed history: ") + err.what());
  } catch (const std::invalid_argument& err) {
    throw FormatError(err.what());
  }
}

std::string history_to_dot(const History& h, std::string_view name) {
  std::ostringstream out;
  out << "digraph \"" << escape(name) << "\" {\n";
  for (const auto& e : h.events()) {
    std::ostringstream label;
    label << e.thread << ":" << op_name(e.op) << "(" << (e.arg.is_unit() ? "" : e.arg.to_string())
          << "):" << (e.result ? e.result->to_string() : "todo");
    out << "  e" << e.id << " [label=\"" << escape(label.str()) << "\"" << (e.completed() ? "" : ", style=dashed")
        << "];\n";
  }
  for (const auto& [a, b] : transitive_reduction(h)) out << "  e" << a << " -> e" << b << ";\n";
  out << "}\n";
  return out.str();
}

json violation_to_json(const Violation& v) {
  return {{"category", category_name(v.category)}, {"rule", v.rule}, {"witness", v.witness}, {"detail", v.detail}};
}

Violation violation_from_json(const json& j) {
  try {
    return {category_by_name(j.at("category").get<std::string>()), j.at("rule").get<std::string>(),
            j.value("witness", std::vector<EventId>{}), j.value("detail", std::string{})};
  } catch (const json::exception& err) {
    throw FormatError(std::string("malformed violation: ") + err.what());
  }
}

json schedule_to_json(const Schedule& s) { return schedule_to_string(s); }

}  // namespace polarize

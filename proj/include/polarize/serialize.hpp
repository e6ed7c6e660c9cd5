#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "polarize/history.hpp"
#include "polarize/simsched.hpp"
#include "polarize/violation.hpp"

namespace polarize {

using json = nlohmann::json;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Values: integers and booleans as themselves, unit as null. A pending
// result is the string "todo".
json value_to_json(const Value& v);
Value value_from_json(const json& j);

/// {"events": [{"id", "thread", "op", "arg", "result"}...], "order": [[a, b]...]}
/// with the order written as its transitive reduction.
json history_to_json(const History& h);
/// Inverse of history_to_json; also accepts a non-reduced order. Throws
/// FormatError on malformed input or a cyclic order.
History history_from_json(const json& j);

/// Digraph over "t:op(arg):res" nodes with the transitive reduction as
/// edges; uncompleted events are dashed.
std::string history_to_dot(const History& h, std::string_view name = "history");

json violation_to_json(const Violation& v);
Violation violation_from_json(const json& j);

json schedule_to_json(const Schedule& s);

}  // namespace polarize

#include "polarize/value.hpp"

#include <charconv>
#include <stdexcept>

namespace polarize {

std::string Value::to_string() const {
  switch (kind_) {
    case Kind::Unit:
      return "⊥";
    case Kind::Bool:
      return as_bool() ? "true" : "false";
    case Kind::Int:
      return std::to_string(raw_);
  }
  return "?";
}

std::string_view op_name(Op op) {
  switch (op) {
    case Op::Enq:
      return "Enq";
    case Op::Deq:
      return "Deq";
    case Op::Insert:
      return "Ins";
    case Op::Remove:
      return "Rem";
    case Op::Contains:
      return "Con";
  }
  return "?";
}

std::optional<Op> parse_op(std::string_view name) {
  if (name == "Enq" || name == "enqueue") return Op::Enq;
  if (name == "Deq" || name == "dequeue") return Op::Deq;
  if (name == "Ins" || name == "insert") return Op::Insert;
  if (name == "Rem" || name == "remove") return Op::Remove;
  if (name == "Con" || name == "contains") return Op::Contains;
  return std::nullopt;
}

std::string to_string(const Call& call) {
  std::string out(op_name(call.op));
  out += '(';
  if (!call.arg.is_unit()) out += call.arg.to_string();
  out += ')';
  return out;
}

Call parse_call(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
  };
  text = trim(text);
  const auto open = text.find('(');
  if (open == std::string_view::npos || text.back() != ')') {
    throw std::invalid_argument("malformed call '" + std::string(text) + "'");
  }
  const auto op = parse_op(trim(text.substr(0, open)));
  if (!op) throw std::invalid_argument("unknown operation in '" + std::string(text) + "'");
  const auto inner = trim(text.substr(open + 1, text.size() - open - 2));
  Call call{*op, Value::unit()};
  if (*op == Op::Deq) {
    if (!inner.empty()) throw std::invalid_argument("Deq takes no argument");
    return call;
  }
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(inner.data(), inner.data() + inner.size(), v);
  if (ec != std::errc{} || ptr != inner.data() + inner.size()) {
    throw std::invalid_argument("expected an integer argument in '" + std::string(text) + "'");
  }
  call.arg = Value::integer(v);
  return call;
}

}  // namespace polarize

#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace polarize {

using ThreadId = std::uint32_t;
using EventId = std::uint32_t;

/// Values passed to and returned from data-structure operations: the unit
/// value (written `_` in output), integers and booleans.
class Value {
 public:
  enum class Kind : std::uint8_t { Unit, Int, Bool };

  constexpr Value() = default;

  static constexpr Value unit() { return Value{}; }
  static constexpr Value integer(std::int64_t v) { return Value{Kind::Int, v}; }
  static constexpr Value boolean(bool b) { return Value{Kind::Bool, b ? 1 : 0}; }

  constexpr Kind kind() const { return kind_; }
  constexpr bool is_unit() const { return kind_ == Kind::Unit; }
  constexpr bool is_int() const { return kind_ == Kind::Int; }
  constexpr bool is_bool() const { return kind_ == Kind::Bool; }
  constexpr std::int64_t as_int() const { return raw_; }
  constexpr bool as_bool() const { return raw_ != 0; }
  constexpr std::int64_t raw() const { return raw_; }

  friend constexpr auto operator<=>(const Value&, const Value&) = default;

  std::string to_string() const;

 private:
  constexpr Value(Kind k, std::int64_t raw) : kind_(k), raw_(raw) {}

  Kind kind_ = Kind::Unit;
  std::int64_t raw_ = 0;
};

enum class Op : std::uint8_t { Enq, Deq, Insert, Remove, Contains };

std::string_view op_name(Op op);
std::optional<Op> parse_op(std::string_view name);

/// A call `Op(arg)` in a thread script, e.g. `Enq(2)`, `Deq()` or `Ins(3)`.
struct Call {
  Op op;
  Value arg;

  friend bool operator==(const Call&, const Call&) = default;
};

std::string to_string(const Call& call);
/// Parses "Enq(1)", "Deq()", "Ins(3)", "Rem(2)", "Con(4)". Throws
/// std::invalid_argument on malformed input.
Call parse_call(std::string_view text);

}  // namespace polarize

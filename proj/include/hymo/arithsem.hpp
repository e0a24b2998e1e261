#pragma once

#include <optional>
#include <string>
#include <utility>

#include <boost/multiprecision/cpp_int.hpp>

#include "hymo/semver.hpp"

namespace hymo {

using BigInt = boost::multiprecision::cpp_int;

enum class ArithKind { add, sub, mul, div, mod };

const char* arith_kind_name(ArithKind kind);
std::optional<ArithKind> arith_kind_from_name(const std::string& name);

// One fixed-width integer operation as executed by Solidity-compiled code.
// Width is arbitrary in [2, 256] so small widths stay exhaustively testable;
// the compiler version decides the division/modulo-by-zero outcome.
struct ArithOp {
  ArithKind kind = ArithKind::add;
  bool is_signed = false;
  int width = 256;
  Version solidity_version{0, 4, 24};
};

enum class BoundViolation { overflow, underflow, div_by_zero, signed_div_corner };

const char* bound_violation_name(BoundViolation v);

// In-bounds decision plus the result the contract actually observes: the
// exact value when in bounds, the wrapped/cornered/zero value when out of
// bounds, or INVALID when the compiler injects a trap.
struct ArithVerdict {
  bool in_bounds = false;
  bool is_invalid = false;  // semantic result is the INVALID trap
  BigInt value = 0;         // meaningful only when !is_invalid
  std::optional<BoundViolation> violation;
};

// Smallest / largest representable value at (is_signed, width).
BigInt range_min(bool is_signed, int width);
BigInt range_max(bool is_signed, int width);

// Reduce an exact integer into the two's-complement window of (is_signed,
// width): result is in [range_min, range_max] and congruent modulo 2^width.
BigInt wrap_to_width(const BigInt& exact, bool is_signed, int width);

// Fixed-width operation semantics at the Solidity level.
ArithVerdict check(const ArithOp& op, const BigInt& x, const BigInt& y);

// Raw 256-bit machine semantics: add/sub/mul reduce modulo 2^256,
// division/modulo by zero yield 0, and the signed division corner saturates.
BigInt evm_result(ArithKind kind, bool is_signed, const BigInt& x, const BigInt& y);

// Searches for a representable operand pair that is out of bounds for the
// operation. Exhaustive for width <= 12, corner-seeded randomized beyond.
std::optional<std::pair<BigInt, BigInt>> find_violation(const ArithOp& op);

}  // namespace hymo

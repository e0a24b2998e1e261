#include "hymo/arithsem.hpp"

#include <stdexcept>

#include "hymo/rng.hpp"

namespace hymo {

namespace {

// Version at which the compiler starts injecting INVALID for division or
// modulo by zero.
constexpr Version kTrapSince{0, 4, 0};

BigInt pow2(int bits) { return BigInt(1) << bits; }

void require_width(int width) {
  if (width < 2 || width > 256)
    throw std::invalid_argument("width must be in [2, 256], got " + std::to_string(width));
}

void require_representable(const BigInt& v, bool is_signed, int width, const char* name) {
  if (v < range_min(is_signed, width) || v > range_max(is_signed, width))
    throw std::invalid_argument(std::string(name) + " = " + v.str() +
                                " is not representable as " + (is_signed ? "int" : "uint") +
                                std::to_string(width));
}

// Exact infinite-precision result. Division truncates toward zero and the
// remainder takes the dividend's sign, which is what cpp_int's / and % do
// and what EVM SDIV/SMOD specify. Division by zero must be excluded first.
BigInt exact_result(ArithKind kind, const BigInt& x, const BigInt& y) {
  switch (kind) {
    case ArithKind::add: return x + y;
    case ArithKind::sub: return x - y;
    case ArithKind::mul: return x * y;
    case ArithKind::div: return x / y;
    case ArithKind::mod: return x % y;
  }
  throw std::logic_error("unreachable arith kind");
}

}  // namespace

const char* arith_kind_name(ArithKind kind) {
  switch (kind) {
    case ArithKind::add: return "add";
    case ArithKind::sub: return "sub";
    case ArithKind::mul: return "mul";
    case ArithKind::div: return "div";
    case ArithKind::mod: return "mod";
  }
  return "?";
}

std::optional<ArithKind> arith_kind_from_name(const std::string& name) {
  if (name == "add") return ArithKind::add;
  if (name == "sub") return ArithKind::sub;
  if (name == "mul") return ArithKind::mul;
  if (name == "div") return ArithKind::div;
  if (name == "mod") return ArithKind::mod;
  return std::nullopt;
}

const char* bound_violation_name(BoundViolation v) {
  switch (v) {
    case BoundViolation::overflow: return "overflow";
    case BoundViolation::underflow: return "underflow";
    case BoundViolation::div_by_zero: return "div_by_zero";
    case BoundViolation::signed_div_corner: return "signed_div_corner";
  }
  return "?";
}

BigInt range_min(bool is_signed, int width) {
  require_width(width);
  return is_signed ? -pow2(width - 1) : BigInt(0);
}

BigInt range_max(bool is_signed, int width) {
  require_width(width);
  return is_signed ? pow2(width - 1) - 1 : pow2(width) - 1;
}

BigInt wrap_to_width(const BigInt& exact, bool is_signed, int width) {
  require_width(width);
  const BigInt modulus = pow2(width);
  BigInt w = exact % modulus;
  if (w < 0) w += modulus;  // canonical residue in [0, 2^width)
  if (is_signed && w > range_max(true, width)) w -= modulus;
  return w;
}

ArithVerdict check(const ArithOp& op, const BigInt& x, const BigInt& y) {
  require_width(op.width);
  require_representable(x, op.is_signed, op.width, "x");
  require_representable(y, op.is_signed, op.width, "y");

  ArithVerdict verdict;

  if (op.kind == ArithKind::div || op.kind == ArithKind::mod) {
    if (y == 0) {
      verdict.in_bounds = false;
      verdict.violation = BoundViolation::div_by_zero;
      if (op.solidity_version < kTrapSince) {
        verdict.value = 0;
      } else {
        verdict.is_invalid = true;
      }
      return verdict;
    }
    if (op.kind == ArithKind::div && op.is_signed && x == range_min(true, op.width) && y == -1) {
      verdict.in_bounds = false;
      verdict.violation = BoundViolation::signed_div_corner;
      verdict.value = range_min(true, op.width);
      return verdict;
    }
    verdict.in_bounds = true;
    verdict.value = exact_result(op.kind, x, y);
    return verdict;
  }

  // add / sub / mul: in bounds iff the exact result is representable.
  const BigInt exact = exact_result(op.kind, x, y);
  if (exact >= range_min(op.is_signed, op.width) && exact <= range_max(op.is_signed, op.width)) {
    verdict.in_bounds = true;
    verdict.value = exact;
    return verdict;
  }
  verdict.in_bounds = false;
  verdict.violation = exact > range_max(op.is_signed, op.width) ? BoundViolation::overflow
                                                                : BoundViolation::underflow;
  verdict.value = wrap_to_width(exact, op.is_signed, op.width);
  return verdict;
}

BigInt evm_result(ArithKind kind, bool is_signed, const BigInt& x, const BigInt& y) {
  require_representable(x, is_signed, 256, "x");
  require_representable(y, is_signed, 256, "y");
  if (kind == ArithKind::div || kind == ArithKind::mod) {
    if (y == 0) return 0;
    if (kind == ArithKind::div && is_signed && x == range_min(true, 256) && y == -1)
      return range_min(true, 256);
    return exact_result(kind, x, y);
  }
  return wrap_to_width(exact_result(kind, x, y), is_signed, 256);
}

std::optional<std::pair<BigInt, BigInt>> find_violation(const ArithOp& op) {
  require_width(op.width);
  const BigInt lo = range_min(op.is_signed, op.width);
  const BigInt hi = range_max(op.is_signed, op.width);

  auto violates = [&](const BigInt& x, const BigInt& y) {
    return !check(op, x, y).in_bounds;
  };

  if (op.width <= 12) {
    for (BigInt x = lo; x <= hi; ++x)
      for (BigInt y = lo; y <= hi; ++y)
        if (violates(x, y)) return std::make_pair(x, y);
    return std::nullopt;
  }

  // Corner candidates first, then random probing. Seed depends only on the
  // operation so results are reproducible.
  const BigInt corners[] = {lo, hi, BigInt(0), BigInt(1), BigInt(-1), hi - 1, lo + 1};
  for (const BigInt& x : corners)
    for (const BigInt& y : corners)
      if (x >= lo && x <= hi && y >= lo && y <= hi && violates(x, y))
        return std::make_pair(x, y);

  Rng rng(0x41524954u ^ (static_cast<std::uint64_t>(op.kind) << 16) ^
          (static_cast<std::uint64_t>(op.width) << 8) ^ (op.is_signed ? 1 : 0));
  auto random_operand = [&] {
    BigInt v = 0;
    for (int b = 0; b < op.width; b += 64) {
      v <<= 64;
      v |= rng.next_u64();
    }
    v &= pow2(op.width) - 1;
    if (op.is_signed && v > hi) v -= pow2(op.width);
    return v;
  };
  for (int trial = 0; trial < 200000; ++trial) {
    BigInt x = random_operand();
    BigInt y = random_operand();
    if (violates(x, y)) return std::make_pair(x, y);
  }
  return std::nullopt;
}

}  // namespace hymo

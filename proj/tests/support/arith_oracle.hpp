#pragma once

// Brute-force reference for fixed-width integer semantics, written directly
// against the infinite-precision definitions and kept independent of the
// library's arithsem code paths. Used by the unit tests and the acceptance
// suite to cross-check check() over exhaustive operand sweeps.

#include <boost/multiprecision/cpp_int.hpp>
#include <optional>

namespace oracle {

using Big = boost::multiprecision::cpp_int;

enum class Kind { add, sub, mul, div, mod };

enum class Outcome { ok, overflow, underflow, div_by_zero, signed_div_corner };

struct Expected {
  bool in_bounds = false;
  bool invalid = false;
  Big value = 0;
  Outcome outcome = Outcome::ok;
};

inline Big two_pow(int n) {
  Big r = 1;
  return r << n;
}

inline Big lower_bound(bool is_signed, int n) { return is_signed ? -two_pow(n - 1) : Big(0); }
inline Big upper_bound(bool is_signed, int n) {
  return is_signed ? two_pow(n - 1) - 1 : two_pow(n) - 1;
}

// trap_on_zero: whether the compiler era injects INVALID for /0 and %0.
inline Expected expected(Kind kind, bool is_signed, int n, const Big& x, const Big& y,
                         bool trap_on_zero) {
  Expected e;
  if (kind == Kind::div || kind == Kind::mod) {
    if (y == 0) {
      e.in_bounds = false;
      e.outcome = Outcome::div_by_zero;
      e.invalid = trap_on_zero;
      e.value = 0;
      return e;
    }
    if (kind == Kind::div && is_signed && x == -two_pow(n - 1) && y == -1) {
      e.in_bounds = false;
      e.outcome = Outcome::signed_div_corner;
      e.value = -two_pow(n - 1);
      return e;
    }
    e.in_bounds = true;
    e.value = kind == Kind::div ? Big(x / y) : Big(x % y);
    return e;
  }

  Big exact = kind == Kind::add ? Big(x + y) : kind == Kind::sub ? Big(x - y) : Big(x * y);
  if (exact >= lower_bound(is_signed, n) && exact <= upper_bound(is_signed, n)) {
    e.in_bounds = true;
    e.value = exact;
    return e;
  }
  e.in_bounds = false;
  e.outcome = exact > upper_bound(is_signed, n) ? Outcome::overflow : Outcome::underflow;
  Big m = two_pow(n);
  Big w = exact % m;
  if (w < 0) w += m;
  if (is_signed && w >= two_pow(n - 1)) w -= m;
  e.value = w;
  return e;
}

}  // namespace oracle

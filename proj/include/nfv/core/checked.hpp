#pragma once

#include <cstdint>
#include <string>

#include "nfv/core/errors.hpp"

namespace nfv {

using Int = std::int64_t;

inline Int checked_add(Int a, Int b) {
  Int r;
  if (__builtin_add_overflow(a, b, &r))
    throw OverflowError("integer overflow in " + std::to_string(a) + " + " +
                        std::to_string(b));
  return r;
}

inline Int checked_sub(Int a, Int b) {
  Int r;
  if (__builtin_sub_overflow(a, b, &r))
    throw OverflowError("integer overflow in " + std::to_string(a) + " - " +
                        std::to_string(b));
  return r;
}

inline Int checked_mul(Int a, Int b) {
  Int r;
  if (__builtin_mul_overflow(a, b, &r))
    throw OverflowError("integer overflow in " + std::to_string(a) + " * " +
                        std::to_string(b));
  return r;
}

inline Int checked_abs(Int a) {
  if (a == INT64_MIN)
    throw OverflowError("integer overflow in abs");
  return a < 0 ? -a : a;
}

inline Int narrow(__int128 v) {
  if (v > INT64_MAX || v < INT64_MIN)
    throw OverflowError("value does not fit in 64 bits");
  return static_cast<Int>(v);
}

} // namespace nfv

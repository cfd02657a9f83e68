#pragma once

#include <compare>
#include <cstdlib>
#include <string>

namespace diraclab {

/// A half-integer stored as twice its value, so that 3/2 is `HalfInt{3}`.
/// Angular-momentum labels (l, m, s) are kept in this form to avoid
/// floating-point index arithmetic.
struct HalfInt {
  int twice = 0;

  static constexpr HalfInt from_twice(int t) { return HalfInt{t}; }
  static constexpr HalfInt integer(int n) { return HalfInt{2 * n}; }

  constexpr double value() const { return 0.5 * twice; }
  constexpr bool is_integer() const { return twice % 2 == 0; }
  constexpr HalfInt abs() const { return HalfInt{twice < 0 ? -twice : twice}; }

  constexpr HalfInt operator-() const { return HalfInt{-twice}; }
  constexpr HalfInt operator+(HalfInt o) const { return HalfInt{twice + o.twice}; }
  constexpr HalfInt operator-(HalfInt o) const { return HalfInt{twice - o.twice}; }

  constexpr auto operator<=>(const HalfInt&) const = default;

  std::string str() const {
    if (is_integer()) return std::to_string(twice / 2);
    return std::to_string(twice) + "/2";
  }
};

/// True when a and b differ by an integer.
constexpr bool same_class(HalfInt a, HalfInt b) { return ((a.twice - b.twice) % 2) == 0; }

}  // namespace diraclab

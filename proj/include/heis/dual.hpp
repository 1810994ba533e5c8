#pragma once

// Forward-mode dual numbers a + bε with ε² = 0.

#include <cmath>

namespace heis {

struct DualNumber {
  double value = 0.0;
  double deriv = 0.0;

  constexpr DualNumber() = default;
  constexpr DualNumber(double v) : value(v) {}  // NOLINT: constants promote implicitly
  constexpr DualNumber(double v, double d) : value(v), deriv(d) {}

  static constexpr DualNumber variable(double v) { return {v, 1.0}; }
};

constexpr DualNumber operator+(DualNumber a, DualNumber b) {
  return {a.value + b.value, a.deriv + b.deriv};
}
constexpr DualNumber operator-(DualNumber a, DualNumber b) {
  return {a.value - b.value, a.deriv - b.deriv};
}
constexpr DualNumber operator-(DualNumber a) { return {-a.value, -a.deriv}; }
constexpr DualNumber operator*(DualNumber a, DualNumber b) {
  return {a.value * b.value, a.deriv * b.value + a.value * b.deriv};
}
constexpr DualNumber operator/(DualNumber a, DualNumber b) {
  return {a.value / b.value, (a.deriv * b.value - a.value * b.deriv) / (b.value * b.value)};
}

// Chain rule helper: f(a) with f'(a) known. A zero inner derivative stays zero
// even where f' is infinite (e.g. √ at 0), so constants never produce NaN.
inline DualNumber chain(DualNumber a, double f, double fprime) {
  return {f, a.deriv == 0.0 ? 0.0 : fprime * a.deriv};
}

inline DualNumber sqrt(DualNumber a) {
  const double s = std::sqrt(a.value);
  return chain(a, s, 0.5 / s);
}
inline DualNumber sin(DualNumber a) { return chain(a, std::sin(a.value), std::cos(a.value)); }
inline DualNumber cos(DualNumber a) { return chain(a, std::cos(a.value), -std::sin(a.value)); }
inline DualNumber exp(DualNumber a) {
  const double e = std::exp(a.value);
  return chain(a, e, e);
}
inline DualNumber log(DualNumber a) { return chain(a, std::log(a.value), 1.0 / a.value); }
inline DualNumber acos(DualNumber a) {
  return chain(a, std::acos(a.value), -1.0 / std::sqrt(1.0 - a.value * a.value));
}
// d|x|/dx at 0 is taken as 0.
inline DualNumber abs(DualNumber a) {
  const double sgn = a.value > 0.0 ? 1.0 : (a.value < 0.0 ? -1.0 : 0.0);
  return {std::abs(a.value), sgn * a.deriv};
}
inline DualNumber pow(DualNumber a, DualNumber b) {
  const double v = std::pow(a.value, b.value);
  if (b.deriv == 0.0) {
    if (b.value == 0.0) return {1.0, 0.0};
    return chain(a, v, b.value * std::pow(a.value, b.value - 1.0));
  }
  return {v, v * (b.deriv * std::log(a.value) + b.value * a.deriv / a.value)};
}

}  // namespace heis

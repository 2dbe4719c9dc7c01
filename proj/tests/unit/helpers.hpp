#pragma once

#include <cmath>

#include "carath/field.hpp"
#include "carath/scalar_function.hpp"

namespace testing {

inline carath::FieldDescriptor linear(double a) { return {carath::expr::linear(1, 1, {a}), 1}; }

inline carath::FieldDescriptor time_times_x(carath::ScalarFunction g) {
  return {carath::expr::product(carath::expr::time(std::move(g)), carath::expr::linear(1, 1, {1.0})), 1};
}

inline carath::FieldDescriptor constant(double c) { return {carath::expr::constant(c), 1}; }

// Closed form of the ramp wave, written out independently of the library tables.
inline double ramp_wave(double t) {
  if (t < 0.0) return 0.0;
  const double n = std::floor(t / 4.0), k = n + 1.0, w = 1.0 / k, s = t - 4.0 * n;
  if (s < w) return k * s;
  if (s < 2.0 - w) return 1.0;
  if (s < 2.0 + w) return 1.0 - k * (s - (2.0 - w));
  if (s < 4.0 - w) return -1.0;
  return -1.0 + k * (s - (4.0 - w));
}

inline double step_wave(double t) {
  const double s = t - 4.0 * std::floor(t / 4.0);
  return s < 2.0 ? 1.0 : -1.0;
}

}  // namespace testing

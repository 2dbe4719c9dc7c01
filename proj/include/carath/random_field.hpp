#pragma once

#include <random>

#include "carath/field.hpp"

namespace carath {

struct RandomFieldOptions {
  int max_depth = 3;
  double p = 1.0;
  /// Allow jump discontinuities in t (step waves, discontinuous tables).
  bool allow_jumps = true;
};

/// Random scalar field on R x R built from the primitive vocabulary
/// (constants, linear maps, time functions, shifts, sums, scalings,
/// products and translations). Deterministic for a given engine state.
FieldDescriptor random_scalar_field(std::mt19937_64& rng, const RandomFieldOptions& opts = {});

}  // namespace carath

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "carath/field.hpp"

namespace carath::detail {

/// Polynomial piece in powers of (t - lo), valid on [lo, hi].
struct SegmentPiece {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> c;
};

/// Contiguous pieces covering [t0, t1].
using SegmentPoly = std::vector<SegmentPiece>;

/// A scalar expression restricted to the straight segment from (t0, xa) to
/// (t1, xb), as exact polynomial pieces in t. nullopt when some node has no
/// polynomial form (sinusoids, callbacks, matrix products, non-scalar values).
std::optional<SegmentPoly> along_segment(const ExprNode& e, double t0, double t1, std::span<const double> xa,
                                         std::span<const double> xb);

/// int |q|^p over every piece; roots are isolated exactly so the |.| kinks
/// never reach a quadrature rule.
double abs_power_integral(const SegmentPoly& q, double p);

}  // namespace carath::detail

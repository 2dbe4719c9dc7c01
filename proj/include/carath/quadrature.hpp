#pragma once

#include <functional>
#include <span>

#include "carath/field.hpp"

namespace carath {

/// Adaptive Gauss-Kronrod (15 point) integral of `phi` over [a, b], split at
/// the given interior breakpoints (ascending). Error target 1e-11 times the L1 size of the whole interval.
double integrate_split(const std::function<double(double)>& phi, double a, double b, std::span<const double> breaks);

/// |v|^p with the exact branches for p = 1, 2.
double pow_p(double v, double p);

/// Integral of |f(t, x(t))|^p over [t0, t1] along the straight segment from
/// xa (at t0) to xb (at t1). Exact (root-isolated polynomial pieces) for
/// scalar piecewise-polynomial fields; otherwise adaptive quadrature split at
/// every declared breakpoint the segment crosses.
double segment_lp_cost(const FieldDescriptor& f, double p, double t0, double t1, std::span<const double> xa,
                       std::span<const double> xb);

/// Integral over [t0, t1] of f(t, x) at frozen state x, written to `out`,
/// using `m`-point midpoint sums on every breakpoint-free piece. Signed when t1 < t0.
void midpoint_slice(const FieldDescriptor& f, double t0, double t1, std::span<const double> x, int m,
                    std::span<double> out);

}  // namespace carath

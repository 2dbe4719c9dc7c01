#pragma once

// Data-parallel inner loops. Every kernel has a serial reference and an
// OpenMP version that must produce bit-identical results; the tests compare
// them and bench/ times them against each other.

#include <cstddef>
#include <span>
#include <vector>

#include "carath/field.hpp"

namespace carath::kernels {

/// Longest-path problem over grid curves: nodes x_i = x_lo + i dx at times
/// t_k = t0 + k dt, edges between consecutive times with |i - i'| <= max_jump,
/// edge weight = integral of |f|^p along the straight segment.
struct CurveDpProblem {
  const FieldDescriptor* field = nullptr;
  double p = 1.0;
  double t0 = 0.0;
  double dt = 1.0;
  std::size_t steps = 1;
  double x_lo = 0.0;
  double dx = 0.0;
  std::size_t cells = 1;
  std::size_t max_jump = 0;

  double time(std::size_t k) const { return t0 + static_cast<double>(k) * dt; }
  double node(std::size_t i) const { return x_lo + static_cast<double>(i) * dx; }
};

double edge_cost(const CurveDpProblem& problem, std::size_t k, std::size_t from, std::size_t to);

struct CurveDpResult {
  /// Sum of edge costs along the best curve (no 1/p root).
  double best_cost = 0.0;
  /// Node index per time, steps + 1 entries.
  std::vector<std::size_t> path;
};

/// values[k] = max over `lattice` of |f(times[k], x)|.
namespace serial {
CurveDpResult curve_dp(const CurveDpProblem& problem);
std::vector<double> lattice_sup(const FieldDescriptor& f, std::span<const double> times,
                                const std::vector<std::vector<double>>& lattice);
}  // namespace serial

namespace omp {
CurveDpResult curve_dp(const CurveDpProblem& problem);
std::vector<double> lattice_sup(const FieldDescriptor& f, std::span<const double> times,
                                const std::vector<std::vector<double>>& lattice);
}  // namespace omp

}  // namespace carath::kernels

#include <algorithm>
#include <limits>

#include "carath/errors.hpp"
#include "carath/kernels.hpp"
#include "carath/quadrature.hpp"

namespace carath::kernels {

double edge_cost(const CurveDpProblem& problem, std::size_t k, std::size_t from, std::size_t to) {
  const double xa = problem.node(from), xb = problem.node(to);
  return segment_lp_cost(*problem.field, problem.p, problem.time(k), problem.time(k + 1), std::span(&xa, 1),
                         std::span(&xb, 1));
}

namespace serial {

CurveDpResult curve_dp(const CurveDpProblem& problem) {
  if (!problem.field || problem.field->dim_in() != 1) throw DimensionError("curve_dp: needs a field on R x R");
  const std::size_t n = problem.cells, jump = problem.max_jump;
  std::vector<double> value(n, 0.0), next(n);
  std::vector<std::size_t> pred(problem.steps * n);
  for (std::size_t k = 0; k < problem.steps; ++k) {
    for (std::size_t b = 0; b < n; ++b) {
      const std::size_t lo = b > jump ? b - jump : 0, hi = std::min(n - 1, b + jump);
      double best = -std::numeric_limits<double>::infinity();
      std::size_t arg = lo;
      for (std::size_t a = lo; a <= hi; ++a) {
        const double v = value[a] + edge_cost(problem, k, a, b);
        if (v > best) {
          best = v;
          arg = a;
        }
      }
      next[b] = best;
      pred[k * n + b] = arg;
    }
    value.swap(next);
  }
  CurveDpResult result;
  const auto it = std::max_element(value.begin(), value.end());
  result.best_cost = *it;
  result.path.assign(problem.steps + 1, 0);
  std::size_t cur = static_cast<std::size_t>(it - value.begin());
  for (std::size_t k = problem.steps; k > 0; --k) {
    result.path[k] = cur;
    cur = pred[(k - 1) * n + cur];
  }
  result.path[0] = cur;
  return result;
}

std::vector<double> lattice_sup(const FieldDescriptor& f, std::span<const double> times,
                                const std::vector<std::vector<double>>& lattice) {
  std::vector<double> out(times.size(), 0.0);
  for (std::size_t k = 0; k < times.size(); ++k) {
    double m = 0.0;
    for (const auto& x : lattice) m = std::max(m, f.norm_at(times[k], x));
    out[k] = m;
  }
  return out;
}

}  // namespace serial
}  // namespace carath::kernels

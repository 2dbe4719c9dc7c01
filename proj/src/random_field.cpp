#include "carath/random_field.hpp"

namespace carath {
namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int pick(std::mt19937_64& rng, int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

ScalarFunction random_time_function(std::mt19937_64& rng, bool allow_jumps) {
  switch (pick(rng, allow_jumps ? 6 : 4)) {
    case 0:
      return ScalarFunction::sinusoid(uniform(rng, -2, 2), uniform(rng, -3, 3), uniform(rng, -3, 3));
    case 1: {
      // continuous piecewise-linear table
      const int k = 1 + pick(rng, 4);
      std::vector<double> breaks;
      double t = uniform(rng, -3, -1);
      for (int i = 0; i < k; ++i) {
        breaks.push_back(t);
        t += uniform(rng, 0.3, 2.0);
      }
      std::vector<std::array<double, 4>> coeffs;
      double value = uniform(rng, -2, 2);
      double slope = uniform(rng, -1, 1);
      coeffs.push_back({value, slope, 0, 0});
      for (int i = 0; i < k; ++i) {
        const double len = i + 1 < k ? breaks[i + 1] - breaks[i] : 0.0;
        slope = uniform(rng, -2, 2);
        coeffs.push_back({value, slope, 0, 0});
        value += slope * len;
      }
      return ScalarFunction::piecewise(std::move(breaks), std::move(coeffs));
    }
    case 2:
      return ScalarFunction::ramp_integral();
    case 3:
      return ScalarFunction::polynomial({uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -0.3, 0.3), 0});
    case 4:
      return ScalarFunction::step_wave();
    default:
      return ScalarFunction::ramp_wave();
  }
}

ExprPtr random_expr(std::mt19937_64& rng, int depth, const RandomFieldOptions& opts) {
  const int choice = depth <= 0 ? pick(rng, 4) : pick(rng, 8);
  switch (choice) {
    case 0:
      return expr::constant(uniform(rng, -2, 2));
    case 1:
      return expr::linear(1, 1, {uniform(rng, -2, 2)});
    case 2:
      return expr::time(random_time_function(rng, opts.allow_jumps));
    case 3:
      return expr::shift(random_time_function(rng, opts.allow_jumps), {uniform(rng, -1, 1)});
    case 4:
      return expr::sum({random_expr(rng, depth - 1, opts), random_expr(rng, depth - 1, opts)});
    case 5:
      return expr::scale(uniform(rng, -2, 2), random_expr(rng, depth - 1, opts));
    case 6:
      return expr::product(random_expr(rng, depth - 1, opts), random_expr(rng, depth - 1, opts));
    default:
      return expr::translate(uniform(rng, -4, 4), random_expr(rng, depth - 1, opts));
  }
}

}  // namespace

FieldDescriptor random_scalar_field(std::mt19937_64& rng, const RandomFieldOptions& opts) {
  return FieldDescriptor(random_expr(rng, opts.max_depth, opts), 1, opts.p, ClassClaim::SC);
}

}  // namespace carath

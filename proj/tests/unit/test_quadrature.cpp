#include <doctest.h>

#include <cmath>
#include <random>

#include "carath/quadrature.hpp"
#include "carath/random_field.hpp"
#include "helpers.hpp"

using namespace carath;

namespace {

// Adaptive quadrature of |f|^p along the segment, split at the declared breakpoints.
double generic_cost(const FieldDescriptor& f, double p, double t0, double t1, double xa, double xb) {
  const double a[] = {xa}, b[] = {xb};
  std::vector<double> br;
  segment_breakpoints(f, t0, t1, a, b, br);
  return integrate_split(
      [&](double t) {
        const double x[] = {xa + (xb - xa) * (t - t0) / (t1 - t0)};
        return pow_p(f.evaluate(t, x)[0], p);
      },
      t0, t1, br);
}

}  // namespace

TEST_SUITE("quadrature") {
  TEST_CASE("closed forms") {
    const auto x = testing::linear(1.0);
    const double a[] = {-1.0}, b[] = {1.0};
    CHECK(segment_lp_cost(x, 1.0, 0.0, 1.0, a, b) == doctest::Approx(0.5).epsilon(1e-14));
    // int_0^1 (2t - 1)^2 dt = 1/3
    CHECK(segment_lp_cost(x, 2.0, 0.0, 1.0, a, b) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    const auto Hb = FieldDescriptor(expr::time(ScalarFunction::step_wave()), 1);
    const double z[] = {0.0};
    CHECK(segment_lp_cost(Hb, 1.0, -1.0, 3.0, z, z) == doctest::Approx(4.0).epsilon(1e-14));
  }

  TEST_CASE("exact segment integral agrees with independent quadrature on random fields") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-2.0, 2.0), len(0.05, 1.5);
    for (int i = 0; i < 200; ++i) {
      const auto f = random_scalar_field(rng);
      const double t0 = u(rng), t1 = t0 + len(rng), xa = u(rng), xb = u(rng);
      const double a[] = {xa}, b[] = {xb};
      // |f|^2 is smooth between breakpoints, so plain Gauss-Kronrod is a sound oracle.
      CHECK(segment_lp_cost(f, 2.0, t0, t1, a, b) ==
            doctest::Approx(generic_cost(f, 2.0, t0, t1, xa, xb)).epsilon(1e-9).scale(1.0));
      // |f| has kinks at sign changes: fine midpoint rule instead.
      if (i % 5 == 0) {
        const int n = 100000;
        const double h = (t1 - t0) / n;
        double m = 0.0;
        for (int k = 0; k < n; ++k) {
          const double t = t0 + (k + 0.5) * h;
          const double x[] = {xa + (xb - xa) * (t - t0) / (t1 - t0)};
          m += std::abs(f.evaluate(t, x)[0]);
        }
        CHECK(segment_lp_cost(f, 1.0, t0, t1, a, b) == doctest::Approx(m * h).epsilon(1e-6).scale(1.0));
      }
    }
  }

  TEST_CASE("sinusoidal integrand with sign changes") {
    const auto s = testing::time_times_x(ScalarFunction::sinusoid(1.0, 1.0, 0.0));
    const double one[] = {1.0};
    // int_0^{2 pi} |sin t| dt = 4
    CHECK(segment_lp_cost(s, 1.0, 0.0, 2 * M_PI, one, one) == doctest::Approx(4.0).epsilon(1e-10));
  }

  TEST_CASE("midpoint slice is exact on piecewise constants") {
    const auto Hb = FieldDescriptor(expr::time(ScalarFunction::step_wave()), 1);
    const double z[] = {0.0};
    double out[1];
    midpoint_slice(Hb, 1.0, 3.5, z, 2, out);
    CHECK(out[0] == doctest::Approx(1.0 - 1.5));
    midpoint_slice(Hb, 3.5, 1.0, z, 2, out);
    CHECK(out[0] == doctest::Approx(0.5));
  }

  TEST_CASE("pow_p") {
    CHECK(pow_p(-3.0, 1.0) == 3.0);
    CHECK(pow_p(-3.0, 2.0) == 9.0);
    CHECK(pow_p(4.0, 0.5) == doctest::Approx(2.0));
  }
}

#include <doctest.h>

#include <cmath>
#include <random>

#include "carath/bounds.hpp"
#include "carath/errors.hpp"
#include "carath/kernels.hpp"
#include "carath/random_field.hpp"
#include "helpers.hpp"

using namespace carath;

TEST_SUITE("bounds") {
  TEST_CASE("m- and l-bounds of a linear field") {
    const auto f = testing::linear(2.0);
    const auto m = optimal_m_bound(f, 1.5, {0.0, 1.0});
    for (double v : m.values) CHECK(v == doctest::Approx(3.0));
    const auto l = optimal_l_bound(f, 1.5, {0.0, 1.0});
    for (double v : l.values) CHECK(v == doctest::Approx(2.0));
    CHECK(lp_norm(m, {0.0, 1.0}) == doctest::Approx(3.0));
  }

  TEST_CASE("m-bound of sin(t) x integrates to 2r over a half period") {
    const auto f = testing::time_times_x(ScalarFunction::sinusoid(1.0, 1.0, 0.0));
    BoundGrid grid;
    grid.t_steps = 4096;
    const auto m = optimal_m_bound(f, 2.0, {0.0, M_PI}, grid);
    CHECK(lp_norm(m, {0.0, M_PI}) == doctest::Approx(4.0).epsilon(1e-4));
  }

  TEST_CASE("m-bound dominates |f| on the ball") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 10; ++i) {
      const auto f = random_scalar_field(rng);
      const auto m = optimal_m_bound(f, 1.0, {-1.0, 1.0});
      for (std::size_t k = 0; k < m.values.size(); k += 37)
        for (int s = 0; s < 5; ++s) {
          const double x[] = {u(rng)};
          CHECK(std::abs(f.evaluate(m.t_at(k), x)[0]) <= m.values[k] * (1 + 1e-9) + 1e-12);
        }
    }
  }

  TEST_CASE("equicontinuity of the constant family is delta = eps") {
    BoundGrid grid;
    grid.t_steps = 2048;
    const SampledBound fam[] = {optimal_m_bound(testing::constant(1.0), 1.0, {-1.0, 1.0}, grid)};
    const double eps[] = {0.5, 0.25, 0.125};
    const auto rows = equicontinuity_profile(fam, 1.0, eps);
    REQUIRE(rows.size() == 3);
    for (const auto& r : rows) {
      REQUIRE(r.delta.has_value());
      CHECK(*r.delta == doctest::Approx(r.eps));
    }
    CHECK(lp_bounded_sup(fam, 1.0) == doctest::Approx(2.0));
  }

  TEST_CASE("moduli from m-bounds: constant field gives theta(s) = c s, order holds") {
    const FieldDescriptor fam[] = {testing::constant(0.75)};
    const Interval I[] = {{0.0, 1.0}, {0.0, 2.0}};
    const int radii[] = {1, 2};
    ThetaGrid tg;
    tg.s_knots = 33;
    const auto set = theta_from_mbounds(fam, I, radii, tg);
    CHECK(set.entries().size() == 4);
    CHECK(set.respects_order(1e-12));
    const auto& th = set.at({{0.0, 1.0}, 1});
    CHECK(th(0.0) == 0.0);
    CHECK(th(0.5) == doctest::Approx(0.375));
    CHECK_THROWS_AS(set.at({{5.0, 6.0}, 1}), IndexError);
  }

  TEST_CASE("Modulus is nondecreasing and extends linearly") {
    const Modulus m({0.0, 1.0, 2.0}, {0.0, 1.0, 1.5});
    CHECK(m(0.5) == doctest::Approx(0.5));
    CHECK(m(3.0) == doctest::Approx(2.0));
    CHECK_THROWS_AS(Modulus({0.0, 1.0}, {0.0, -1.0}), Error);
    CHECK(Modulus::linear(2.0)(0.25) == 0.5);
  }

  TEST_CASE("lattice sup: serial and OpenMP agree bit for bit") {
    std::mt19937_64 rng(17);
    const auto lattice = ball_lattice(1, 2.0, 64);
    std::vector<double> times;
    for (int k = 0; k <= 500; ++k) times.push_back(-2.0 + 0.01 * k);
    for (int i = 0; i < 10; ++i) {
      const auto f = random_scalar_field(rng);
      CHECK(kernels::serial::lattice_sup(f, times, lattice) == kernels::omp::lattice_sup(f, times, lattice));
    }
  }
}

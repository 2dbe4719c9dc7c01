#include <doctest.h>

#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "carath/errors.hpp"
#include "carath/scalar_function.hpp"
#include "helpers.hpp"

using namespace carath;

TEST_SUITE("scalar") {
  TEST_CASE("ramp and step waves match their closed forms") {
    const auto H = ScalarFunction::ramp_wave(), Hb = ScalarFunction::step_wave();
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-8.0, 60.0);
    for (int i = 0; i < 2000; ++i) {
      const double t = u(rng);
      CHECK(H(t) == doctest::Approx(testing::ramp_wave(t)).epsilon(1e-12));
      CHECK(Hb(t) == testing::step_wave(t));
    }
    CHECK(H(-1.0) == 0.0);
    CHECK(H(1.0) == 1.0);
    CHECK(H(3.0) == -1.0);
    CHECK(H(4.0 + 0.25) == doctest::Approx(0.5));
  }

  TEST_CASE("integrals are antiderivatives of the waves") {
    const auto H = ScalarFunction::ramp_wave(), h = ScalarFunction::ramp_integral();
    const auto Hb = ScalarFunction::step_wave(), hb = ScalarFunction::step_integral();
    for (double t : {0.3, 1.0, 2.5, 4.1, 7.9, 13.37, 22.0}) {
      CHECK(h(t) == doctest::Approx(H.integral(0.0, t)).epsilon(1e-12));
      CHECK(hb(t) == doctest::Approx(Hb.integral(0.0, t)).epsilon(1e-12));
    }
    // triangle wave
    CHECK(hb(2.0) == doctest::Approx(2.0));
    CHECK(hb(4.0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(hb(5.0) == doctest::Approx(1.0));
  }

  TEST_CASE("piecewise integral against Gauss-Kronrod") {
    const auto g = ScalarFunction::piecewise({-1.0, 0.5, 2.0}, {{{1, 0, 0, 0}}, {{0, 1, 2, 0}}, {{-1, 0, 0, 3}}, {{2, -1, 0, 0}}});
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    const double pts[] = {-3.0, -1.0, 0.5, 2.0, 4.0};
    double gk = 0.0;
    for (int i = 0; i + 1 < 5; ++i) gk += GK::integrate([&](double t) { return g(t); }, pts[i], pts[i + 1], 0);
    CHECK(g.integral(-3.0, 4.0) == doctest::Approx(gk).epsilon(1e-12));
    CHECK(g.integral(4.0, -3.0) == doctest::Approx(-gk).epsilon(1e-12));
  }

  TEST_CASE("L1 distance of translated ramp and step waves") {
    const auto H = ScalarFunction::ramp_wave(), Hb = ScalarFunction::step_wave();
    // [-4, 0] sees block k - 1 of H, [0, 4] block k: each ramp zone costs w.
    for (int k = 1; k <= 20; ++k) {
      const double oracle = 2.0 / k + 2.0 / (k + 1);
      CHECK(l1_distance(H, 4.0 * k, Hb, 0.0, {-4.0, 4.0}) == doctest::Approx(oracle).epsilon(1e-12));
    }
    CHECK(l1_distance(Hb, 0.0, Hb, 4.0, {-8.0, 8.0}) == doctest::Approx(0.0));
  }

  TEST_CASE("max_abs and breakpoints") {
    const auto H = ScalarFunction::ramp_wave();
    CHECK(H.max_abs(-3.0, 0.0) == 0.0);
    CHECK(H.max_abs(0.0, 0.5) == doctest::Approx(0.5));
    std::vector<double> br;
    H.breakpoints(0.0, 4.0, br);
    CHECK(!br.empty());
    CHECK(std::is_sorted(br.begin(), br.end()));
    const auto s = ScalarFunction::sinusoid(2.0, 1.0, 0.0);
    CHECK(s(M_PI / 2) == doctest::Approx(2.0));
    CHECK(!s.is_piecewise_polynomial());
  }

  TEST_CASE("bad piecewise tables are rejected") {
    CHECK_THROWS_AS(ScalarFunction::piecewise({0.0, 1.0}, {{{1, 0, 0, 0}}}), Error);
    CHECK_THROWS_AS(ScalarFunction::piecewise({1.0, 0.0}, {{{1, 0, 0, 0}}, {{1, 0, 0, 0}}, {{1, 0, 0, 0}}}), Error);
  }
}

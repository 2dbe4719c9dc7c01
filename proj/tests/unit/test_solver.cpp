#include <doctest.h>

#include <cmath>

#include "carath/errors.hpp"
#include "carath/solver.hpp"
#include "helpers.hpp"

using namespace carath;

TEST_SUITE("solver") {
  TEST_CASE("x' = x") {
    const double x0[] = {1.0};
    const auto tr = integrate(testing::linear(1.0), x0, 0.0, 1.0);
    CHECK(tr.complete());
    CHECK(tr.x_final()[0] == doctest::Approx(std::exp(1.0)).epsilon(1e-6));
    CHECK(tr.t(tr.size() - 1) == doctest::Approx(1.0));
  }

  TEST_CASE("purely time dependent jumps are integrated exactly") {
    const FieldDescriptor f(expr::time(ScalarFunction::step_wave()), 1);
    const double x0[] = {0.25};
    StepPolicy pol;
    pol.dt = 0.3;
    const auto tr = integrate(f, x0, 0.0, 6.0, pol);
    const auto hb = ScalarFunction::step_integral();
    for (std::size_t k = 0; k < tr.size(); ++k) CHECK(tr.x_at(k)[0] == doctest::Approx(0.25 + hb(tr.t(k))).epsilon(1e-12));
  }

  TEST_CASE("backwards in time") {
    const double x0[] = {1.0};
    const auto tr = integrate(testing::linear(1.0), x0, 0.0, -1.0);
    CHECK(tr.x_final()[0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-6));
  }

  TEST_CASE("x' = x^2 blows up before t = 1") {
    const FieldDescriptor f(expr::product(expr::linear(1, 1, {1.0}), expr::linear(1, 1, {1.0})), 1);
    const double x0[] = {1.0};
    StepPolicy pol;
    pol.r_max = 1e4;
    const auto tr = integrate(f, x0, 0.0, 2.0, pol);
    CHECK(tr.status == TrajectoryStatus::truncated_blowup);
    REQUIRE(tr.exit_time.has_value());
    // exact blow-up at t = 1; detection happens within a step or two of it
    CHECK(*tr.exit_time == doctest::Approx(1.0).epsilon(0.01));
  }

  TEST_CASE("exit radius") {
    const double x0[] = {1.0};
    StepPolicy pol;
    pol.exit_radius = 2.0;
    const auto tr = integrate(testing::linear(1.0), x0, 0.0, 5.0, pol);
    CHECK(tr.status == TrajectoryStatus::truncated_exit);
    CHECK(*tr.exit_time == doctest::Approx(std::log(2.0)).epsilon(1e-2));
  }

  TEST_CASE("non-LC fields need an explicit opt in") {
    const auto f = testing::linear(1.0).with_claim(ClassClaim::SC);
    const double x0[] = {0.0};
    CHECK_THROWS_AS(integrate(f, x0, 0.0, 1.0), UnsupportedError);
    StepPolicy pol;
    pol.allow_non_lc = true;
    const auto tr = integrate(f, x0, 0.0, 1.0, pol);
    CHECK(!tr.warning.empty());
  }

  TEST_CASE("policy and dimension checks") {
    const double x0[] = {0.0, 1.0};
    CHECK_THROWS_AS(integrate(testing::linear(1.0), x0, 0.0, 1.0), DimensionError);
    StepPolicy bad;
    bad.dt = -1.0;
    CHECK_THROWS_AS(bad.validate(), Error);
  }

  TEST_CASE("orders of the averaged schemes") {
    const auto f = testing::time_times_x(ScalarFunction::sinusoid(1.0, 1.0, 0.0));
    const double x0[] = {1.0};
    for (auto [scheme, order] : {std::pair{Scheme::averaged_euler, 1.0}, std::pair{Scheme::averaged_heun, 2.0}}) {
      double err[2];
      for (int i = 0; i < 2; ++i) {
        StepPolicy pol;
        pol.scheme = scheme;
        pol.dt = i == 0 ? 1.0 / 64 : 1.0 / 128;
        err[i] = std::abs(integrate(f, x0, 0.0, 1.0, pol).x_final()[0] - std::exp(1.0 - std::cos(1.0)));
      }
      CHECK(std::log2(err[0] / err[1]) == doctest::Approx(order).epsilon(0.15));
    }
  }

  TEST_CASE("Richardson tolerance brackets the true error") {
    const double x0[] = {1.0};
    StepPolicy pol;
    pol.dt = 1.0 / 64;
    const auto tr = integrate(testing::linear(1.0), x0, 0.0, 1.0, pol);
    const double err = std::abs(tr.x_final()[0] - std::exp(1.0));
    const double tol = solver_tolerance(testing::linear(1.0), x0, 0.0, 1.0, pol);
    CHECK(tol >= 0.5 * err);
    CHECK(tol <= 2.0 * err);
  }

  TEST_CASE("triangular system y' = F y + k") {
    // x' = 0, y' = y + 1 from y0 = 0: y = e^t - 1
    const FieldDescriptor f(expr::zero({1, 1}), 1), F(expr::constant(1.0), 1), k(expr::constant(1.0), 1);
    const double x0[] = {0.0}, y0[] = {0.0};
    const auto tr = integrate_triangular(f, F, k, x0, y0, 0.0, 1.0);
    CHECK(tr.y_at(tr.size() - 1)[0] == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-6));
  }

  TEST_CASE("Picard oracle agrees with the integrator") {
    const double x0[] = {0.5};
    const auto pic = picard_oracle(testing::linear(1.0), x0, 0.0, 0.4, 400);
    CHECK(pic.converged);
    StepPolicy pol;
    pol.dt = 1e-3;
    CHECK(sup_distance(integrate(testing::linear(1.0), x0, 0.0, 0.4, pol), pic.trajectory) < 1e-6);
  }
}

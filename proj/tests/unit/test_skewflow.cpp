#include <doctest.h>

#include <cmath>

#include "carath/skewflow.hpp"
#include "carath/solver.hpp"
#include "helpers.hpp"

using namespace carath;

TEST_SUITE("skewflow") {
  TEST_CASE("Phi(0) is the identity") {
    const auto ex = ramp_example();
    const double x0[] = {0.5}, y0[] = {1.0};
    const FieldDescriptor k(expr::zero({1, 1}), 1);
    const auto p1 = phi1(0.0, ex.f, x0);
    CHECK(p1.x[0] == 0.5);
    CHECK(structurally_equal(p1.base[0], ex.f));
    const auto p2 = phi2(0.0, ex.f, ex.F, k, x0, y0);
    CHECK(p2.y[0] == 1.0);
    CHECK(structurally_equal(p2.base[1], ex.F));
  }

  TEST_CASE("the base moves by translation") {
    const auto ex = ramp_example();
    const double x0[] = {0.0};
    const auto p = phi1(1.5, ex.f, x0);
    CHECK(structurally_equal(p.base[0], translate(ex.f, 1.5)));
  }

  TEST_CASE("cocycle within twice the solver tolerance") {
    const auto f = testing::time_times_x(ScalarFunction::sinusoid(1.0, 1.0, 0.0));
    const double x0[] = {0.7};
    for (double t : {0.25, 1.0})
      for (double s : {0.5, 1.5}) {
        const auto whole = phi1(t + s, f, x0);
        const auto first = phi1(s, f, x0);
        const auto chained = phi1(t, first.base[0], first.x);
        CHECK(std::abs(whole.x[0] - chained.x[0]) <= 2.0 * solver_tolerance(f, x0, 0.0, t + s));
      }
  }

  TEST_CASE("linearized check on the ramp example") {
    const auto ex = ramp_example();
    const double x0[] = {0.0}, y0[] = {1.0};
    const double eps[] = {1e-1, 1e-2, 1e-3};
    const auto r = linearized_check(ex.f, ex.F, x0, y0, 0.0, 2.0, eps);
    CHECK(r.pass);
    CHECK(r.slope >= 0.9);
    CHECK(r.error.back() < r.error.front() / 30.0);
  }

  TEST_CASE("linearization of a linear field is exact") {
    const double x0[] = {1.0}, y0[] = {1.0};
    const double eps[] = {1e-1, 1e-2};
    const auto r = linearized_check(testing::linear(-0.5), testing::constant(-0.5), x0, y0, 0.0, 1.0, eps);
    CHECK(r.pass);
    for (double e : r.error) CHECK(e < 1e-9);
  }

  TEST_CASE("continuity along translates") {
    const auto ex = ramp_example();
    std::vector<FieldDescriptor> seq;
    for (int k = 1; k <= 6; ++k) seq.push_back(translate(ex.f, 4.0 * k));
    const std::vector<double> x0{0.0};
    const std::vector<std::vector<double>> x0s(seq.size(), x0);
    const auto r = continuity_experiment(seq, ex.g, x0s, x0, 0.0, 2.0);
    CHECK(r.pass);
    CHECK(r.error.back() < r.error.front());
  }

  TEST_CASE("log-log slope") {
    const double x[] = {1e-1, 1e-2, 1e-3}, y[] = {2e-2, 2e-4, 2e-6};
    CHECK(loglog_slope(x, y) == doctest::Approx(2.0));
  }

  TEST_CASE("hull fibers at tau = 0 match phi2") {
    const auto ex = ramp_example();
    const double taus[] = {0.0, 2.0}, x0[] = {0.0}, y0[] = {1.0};
    const auto rows = hull_linearized_flow(ex.f, ex.F, taus, 1.0, x0, y0);
    REQUIRE(rows.size() == 2);
    const auto p2 = phi2(1.0, ex.f, ex.F, FieldDescriptor(expr::zero({1, 1}), 1), x0, y0);
    CHECK(rows[0].x[0] == doctest::Approx(p2.x[0]));
    CHECK(rows[0].y[0] == doctest::Approx(p2.y[0]));
  }
}

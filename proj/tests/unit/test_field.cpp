#include <doctest.h>

#include <random>

#include "carath/errors.hpp"
#include "carath/field.hpp"
#include "carath/field_io.hpp"
#include "carath/random_field.hpp"
#include "helpers.hpp"

using namespace carath;

TEST_SUITE("field") {
  TEST_CASE("ramp example evaluates to h(t + x/3) and H(t + x/3)/3") {
    const auto ex = ramp_example();
    const auto h = ScalarFunction::ramp_integral();
    for (double t : {-1.0, 0.2, 3.3, 9.1})
      for (double x : {-2.0, 0.0, 1.5}) {
        const double xs[] = {x};
        CHECK(ex.f.evaluate(t, xs)[0] == doctest::Approx(h(t + x / 3.0)));
        CHECK(ex.F.evaluate(t, xs)[0] == doctest::Approx(testing::ramp_wave(t + x / 3.0) / 3.0));
        CHECK(ex.G.evaluate(t, xs)[0] == doctest::Approx(testing::step_wave(t + x / 3.0) / 3.0));
      }
  }

  TEST_CASE("parse(print(f)) is structurally equal to f") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 300; ++i) {
      const auto f = random_scalar_field(rng);
      const auto text = print_field(f);
      const auto g = parse_field(text);
      CHECK(structurally_equal(f, g));
      CHECK(print_field(g) == text);
    }
    const auto ex = ramp_example();
    CHECK(structurally_equal(parse_field(print_field(ex.f)), ex.f));
  }

  TEST_CASE("translation group law holds structurally") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-20.0, 20.0);
    for (int i = 0; i < 50; ++i) {
      const auto f = random_scalar_field(rng);
      const double s = u(rng), t = u(rng);
      CHECK(structurally_equal(translate(translate(f, s), t), translate(f, s + t)));
    }
  }

  TEST_CASE("translate shifts time") {
    std::mt19937_64 rng(10);
    const auto f = random_scalar_field(rng);
    const auto g = translate(f, 2.5);
    for (double t : {-1.0, 0.0, 1.7})
      for (double x : {-0.5, 0.25}) {
        const double xs[] = {x};
        CHECK(g.evaluate(t, xs)[0] == doctest::Approx(f.evaluate(t + 2.5, xs)[0]));
      }
  }

  TEST_CASE("derived Jacobian matches a centered difference") {
    const auto ex = ramp_example();
    const auto J = jacobian_field(ex.f);
    const double hstep = 1e-6;
    for (double t : {0.3, 2.6, 5.5})
      for (double x : {-1.0, 0.4}) {
        const double xp[] = {x + hstep}, xm[] = {x - hstep}, xs[] = {x};
        const double fd = (ex.f.evaluate(t, xp)[0] - ex.f.evaluate(t, xm)[0]) / (2 * hstep);
        CHECK(J.evaluate(t, xs)[0] == doctest::Approx(fd).epsilon(1e-5));
      }
    const auto sx = testing::time_times_x(ScalarFunction::sinusoid(1, 1, 0));
    const auto Js = jacobian_field(sx);
    const double one[] = {1.0};
    CHECK(Js.evaluate(0.7, one)[0] == doctest::Approx(std::sin(0.7)));
  }

  TEST_CASE("matrix shapes") {
    using namespace expr;
    const auto A = assemble(2, 2, {constant(1.0), constant(2.0), constant(3.0), constant(4.0)});
    const auto v = linear(2, 2, {1.0, 0.0, 0.0, 1.0});
    const FieldDescriptor f(matmul(A, v), 2);
    CHECK(f.shape() == Shape{2, 1});
    const double x[] = {5.0, 7.0};
    const auto y = f.evaluate(0.0, x);
    CHECK(y[0] == doctest::Approx(19.0));
    CHECK(y[1] == doctest::Approx(43.0));
    CHECK_THROWS_AS(matmul(v, A), DimensionError);
    CHECK_THROWS_AS(sum({constant(1.0), linear(2, 2, {1, 0, 0, 1})}), DimensionError);
  }

  TEST_CASE("difference") {
    const auto ex = ramp_example();
    const auto d = difference(ex.f, ex.f);
    const double xs[] = {0.3};
    CHECK(d.evaluate(1.2, xs)[0] == 0.0);
  }

  TEST_CASE("parse errors carry line and column") {
    try {
      (void)parse_field("(field\n  (in 1)\n  (expr (bogus 1)))");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
      CHECK(e.column() > 0);
    }
    CHECK_THROWS_AS(parse_field_or_expr("(linear 1 1"), ParseError);
    CHECK_THROWS_AS(parse_field_or_expr("(time (pw (breaks 0) (piece 1)))"), ParseError);
    CHECK_NOTHROW(parse_field_or_expr("(time (pw (breaks 0 1/3) (piece 0) (piece 3) (piece 0)))"));
  }
}

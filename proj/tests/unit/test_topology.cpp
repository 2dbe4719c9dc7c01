#include <doctest.h>

#include <cmath>
#include <random>

#include "carath/errors.hpp"
#include "carath/kernels.hpp"
#include "carath/random_field.hpp"
#include "carath/topology.hpp"
#include "helpers.hpp"

using namespace carath;

namespace {

double enumerate(const kernels::CurveDpProblem& pr) {
  std::vector<std::size_t> idx(pr.steps + 1, 0);
  double best = -1.0;
  while (true) {
    bool ok = true;
    for (std::size_t k = 0; k < pr.steps && ok; ++k) {
      const std::size_t a = idx[k], b = idx[k + 1];
      ok = (a > b ? a - b : b - a) <= pr.max_jump;
    }
    if (ok) {
      double s = 0.0;
      for (std::size_t k = 0; k < pr.steps; ++k) s += kernels::edge_cost(pr, k, idx[k], idx[k + 1]);
      best = std::max(best, s);
    }
    std::size_t pos = 0;
    while (pos <= pr.steps && ++idx[pos] == pr.cells) idx[pos++] = 0;
    if (pos > pr.steps) break;
  }
  return best;
}

}  // namespace

TEST_SUITE("topology") {
  TEST_CASE("TD of the ramp field at x = 0 is the L1 norm of h") {
    const auto ex = ramp_example();
    const double x[] = {0.0};
    const auto h = ScalarFunction::ramp_integral();
    // h >= 0 on [0, 4]
    CHECK(seminorm_TD(ex.f, {0.0, 4.0}, x) == doctest::Approx(h.integral(0.0, 4.0)).epsilon(1e-12));
  }

  TEST_CASE("TB of x on B_j is j |I|") {
    const auto x = testing::linear(1.0);
    CHECK(seminorm_TB(x, {0.0, 2.0}, 3) == doctest::Approx(6.0));
  }

  TEST_CASE("TTheta of x: the best curve sits on the rim") {
    const auto x = testing::linear(1.0);
    const auto v = seminorm_TTheta(x, {0.0, 2.0}, 1, Modulus::linear(2.0), {16, 21, 0});
    CHECK(v.value == doctest::Approx(2.0));
    CHECK(!v.heuristic);
    CHECK(v.curve.admissible(Modulus::linear(2.0), 1e-12));
  }

  TEST_CASE("ordering TD <= TTheta <= TB on random fields") {
    std::mt19937_64 rng(19);
    const Interval I{-1.0, 1.0};
    BoundGrid grid;
    grid.t_steps = 2048;
    grid.x_cells = 256;
    for (int i = 0; i < 5; ++i) {
      const auto f = random_scalar_field(rng);
      const double tt = seminorm_TTheta(f, I, 1, Modulus::linear(2.0), {32, 33, 0}).value;
      const double tb = seminorm_TB(f, I, 1, grid);
      CHECK(tt <= tb * 1.02 + 1e-12);
      for (const auto& x : dyadic_points(1, 5)) {
        if (std::abs(x[0]) > 1.0) continue;
        CHECK(seminorm_TD(f, I, x) <= tt + 1e-9);
      }
    }
  }

  TEST_CASE("curve DP: serial, OpenMP and enumeration agree exactly") {
    std::mt19937_64 rng(23);
    std::uniform_int_distribution<std::size_t> nt(1, 4), nx(1, 6);
    for (int i = 0; i < 20; ++i) {
      const auto f = random_scalar_field(rng);
      const auto pr = make_curve_problem(f, {0.0, 1.0}, 1, Modulus::linear(1.5), {nt(rng), nx(rng), 0});
      const auto s = kernels::serial::curve_dp(pr), o = kernels::omp::curve_dp(pr);
      CHECK(s.best_cost == o.best_cost);
      CHECK(s.path == o.path);
      CHECK(s.best_cost == enumerate(pr));
    }
  }

  TEST_CASE("curve DP: serial and OpenMP agree on larger grids") {
    std::mt19937_64 rng(29);
    for (int i = 0; i < 5; ++i) {
      const auto f = random_scalar_field(rng);
      const auto pr = make_curve_problem(f, {-1.0, 1.0}, 2, Modulus::linear(2.0), {32, 41, 1});
      const auto s = kernels::serial::curve_dp(pr), o = kernels::omp::curve_dp(pr);
      CHECK(s.best_cost == o.best_cost);
      CHECK(s.path == o.path);
    }
  }

  TEST_CASE("dyadic points start with the integers then halves") {
    const auto d = dyadic_points(1, 7);
    const double expected[] = {0.0, -1.0, 1.0, -0.5, 0.5, -1.5, 1.5};
    REQUIRE(d.size() == 7);
    for (int i = 0; i < 7; ++i) CHECK(d[i][0] == expected[i]);
    CHECK(dyadic_points(2, 9).size() == 9);
  }

  TEST_CASE("metric: zero on the diagonal, symmetric, triangle inequality, capped at 1") {
    std::mt19937_64 rng(31);
    MetricConfig cfg;
    cfg.n_max = 2;
    cfg.j_max = 2;
    for (int i = 0; i < 4; ++i) {
      const auto f = random_scalar_field(rng), g = random_scalar_field(rng), h = random_scalar_field(rng);
      for (auto kind : {SeminormKind::TD, SeminormKind::TB}) {
        const double fg = metric(f, g, cfg, kind), gf = metric(g, f, cfg, kind);
        CHECK(metric(f, f, cfg, kind) == 0.0);
        CHECK(fg == doctest::Approx(gf).epsilon(1e-12));
        CHECK(fg <= metric(f, h, cfg, kind) + metric(h, g, cfg, kind) + 1e-9);
        CHECK(fg <= 1.0);
      }
    }
  }

  TEST_CASE("convergence diagnostic on translates of the ramp field") {
    const auto ex = ramp_example();
    std::vector<FieldDescriptor> seq;
    for (int k = 1; k <= 5; ++k) seq.push_back(translate(ex.F, 4.0 * k));
    MetricConfig cfg;
    cfg.n_max = 2;
    cfg.j_max = 1;
    const auto t = convergence_diagnostic(seq, ex.G, cfg, SeminormKind::TD);
    REQUIRE(t.distance.size() == 5);
    CHECK(t.ratio < 1.0);
    CHECK(t.trend >= 0.75);
  }

  TEST_CASE("modulus set lookup") {
    ModulusSet set;
    set.insert({{0.0, 1.0}, 1}, Modulus::linear(2.0));
    const auto x = testing::linear(1.0);
    CHECK_NOTHROW(seminorm_TTheta(x, {0.0, 1.0}, 1, set, {8, 9, 0}));
    CHECK_THROWS_AS(seminorm_TTheta(x, {0.0, 2.0}, 1, set), IndexError);
  }
}

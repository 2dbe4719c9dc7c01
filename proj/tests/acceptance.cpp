// Prints one PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "carath/bounds.hpp"
#include "carath/field.hpp"
#include "carath/kernels.hpp"
#include "carath/random_field.hpp"
#include "carath/scalar_function.hpp"
#include "carath/skewflow.hpp"
#include "carath/solver.hpp"
#include "carath/topology.hpp"

using namespace carath;

namespace {

int failures = 0;

struct Verdict {
  bool pass = false;
  std::string detail;
};

void run(int id, const char* title, double time_limit, const std::function<Verdict()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (time_limit > 0.0 && secs > time_limit) {
    v.pass = false;
    v.detail += " [over time limit]";
  }
  if (!v.pass) ++failures;
  std::printf("%s %2d %s: %s (%.2fs)\n", v.pass ? "PASS" : "FAIL", id, title, v.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

FieldDescriptor linear_field(double a) { return FieldDescriptor(expr::linear(1, 1, {a}), 1); }

FieldDescriptor time_times_x(ScalarFunction g) {
  return FieldDescriptor(expr::product(expr::time(std::move(g)), expr::linear(1, 1, {1.0})), 1);
}

FieldDescriptor sin_x() { return time_times_x(ScalarFunction::sinusoid(1.0, 1.0, 0.0)); }
FieldDescriptor t_x() { return time_times_x(ScalarFunction::polynomial({0.0, 1.0, 0.0, 0.0})); }

// d_k from the block structure: on [4n, 4n+4) the ramps of width 1/(n+1)
// contribute 4 triangles of area w/2, so each block gives 2/(n+1).
double block_oracle(int k) { return 2.0 / k + 2.0 / (k + 1); }

Verdict criterion1() {
  const auto H = ScalarFunction::ramp_wave();
  const auto Hb = ScalarFunction::step_wave();
  std::vector<double> d;
  double worst = 0.0;
  for (int k = 1; k <= 20; ++k) {
    d.push_back(l1_distance(H, 4.0 * k, Hb, 0.0, {-4.0, 4.0}));
    worst = std::max(worst, std::abs(d.back() - block_oracle(k)));
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < d.size(); ++i) decreasing = decreasing && d[i] < d[i - 1];
  const bool pass = decreasing && d.back() < d.front() / 4.0 && worst < 1e-12;
  return {pass, fmt("d_1=%.6g d_20=%.6g strictly decreasing=%d max |d_k - oracle|=%.2g", d.front(), d.back(),
                    int(decreasing), worst)};
}

double f4k_minus_g(int k, const Resolution& res) {
  const auto ex = ramp_example();
  return seminorm_TTheta(difference(translate(ex.F, 4.0 * k), ex.G), {0.0, 4.0}, 3, Modulus::linear(2.0), res).value;
}

Verdict criterion2() {
  std::vector<double> d;
  for (int k = 1; k <= 10; ++k) d.push_back(f4k_minus_g(k, {64, 61, 0}));
  bool decreasing = true;
  for (std::size_t i = 1; i < d.size(); ++i) decreasing = decreasing && d[i] <= d[i - 1];
  const double ratio = d.back() / d.front();
  return {decreasing && ratio < 0.5,
          fmt("T_Theta(F_4k - G): k=1 %.5g, k=10 %.5g, ratio %.4f, nonincreasing=%d", d.front(), d.back(), ratio,
              int(decreasing))};
}

void slack_info() {
  const double a = f4k_minus_g(1, {64, 61, 1}), b = f4k_minus_g(10, {64, 61, 1});
  std::printf("INFO    with one cell of DP slack the same ratio is %.4f (k=1 %.5g, k=10 %.5g)\n", b / a, a, b);
}

Verdict criterion3() {
  const auto ex = ramp_example();
  const double x0[] = {0.0}, y0[] = {1.0};
  const auto ladder = default_eps_ladder();
  const auto r = linearized_check(ex.f, ex.F, x0, y0, 0.0, 2.0, ladder);
  const double first = r.error.front(), last = r.error.back();
  const bool pass = r.slope >= 0.9 && last < first / 30.0;
  return {pass, fmt("slope %.4f, err(1e-1)=%.3g, err(1e-3)=%.3g", r.slope, first, last)};
}

Verdict criterion4() {
  std::mt19937_64 rng(20261016);
  const Interval intervals[] = {{-1.0, 1.0}, {0.0, 2.0}, {-2.0, 2.0}};
  const auto points = dyadic_points(1, 7);
  BoundGrid grid;
  grid.t_steps = 2048;
  grid.x_cells = 256;
  std::size_t checks = 0, bad_lower = 0, bad_upper = 0;
  double worst_upper = 0.0;
  for (int inst = 0; inst < 20; ++inst) {
    const auto f = random_scalar_field(rng);
    for (const auto& I : intervals)
      for (int j : {1, 2}) {
        const Resolution res{32, static_cast<std::size_t>(16 * j + 1), 0};
        const double tt = seminorm_TTheta(f, I, j, Modulus::linear(2.0), res).value;
        const double tb = seminorm_TB(f, I, j, grid);
        ++checks;
        if (tt > tb * 1.02 + 1e-12) ++bad_upper;
        if (tb > 0.0) worst_upper = std::max(worst_upper, tt / tb);
        for (const auto& x : points) {
          if (std::abs(x[0]) > j) continue;
          ++checks;
          if (seminorm_TD(f, I, x) > tt + 1e-9) ++bad_lower;
        }
      }
  }
  return {bad_lower == 0 && bad_upper == 0,
          fmt("%zu comparisons, TD > TTheta: %zu, TTheta > 1.02 TB: %zu, max TTheta/TB %.5f", checks, bad_lower,
              bad_upper, worst_upper)};
}

// Sum of edge costs over every curve, accumulated left to right like the DP.
double brute_force(const kernels::CurveDpProblem& pr) {
  const std::size_t n = pr.cells;
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
    while (pos <= pr.steps && ++idx[pos] == n) idx[pos++] = 0;
    if (pos > pr.steps) break;
  }
  return best;
}

Verdict criterion5() {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::size_t> nt(1, 5), nx(1, 7);
  std::uniform_real_distribution<double> slope(0.0, 3.0), lo(-2.0, 1.0), len(0.25, 2.0);
  int mismatches = 0;
  for (int inst = 0; inst < 50; ++inst) {
    const auto f = random_scalar_field(rng);
    const double a = lo(rng);
    const Interval I{a, a + len(rng)};
    const int j = inst % 2 + 1;
    const Resolution res{nt(rng), nx(rng), 0};
    const auto pr = make_curve_problem(f, I, j, Modulus::linear(slope(rng)), res);
    const double dp_serial = kernels::serial::curve_dp(pr).best_cost;
    const double dp_omp = kernels::omp::curve_dp(pr).best_cost;
    const double bf = brute_force(pr);
    if (dp_serial != bf || dp_omp != bf) ++mismatches;
  }
  return {mismatches == 0, fmt("50 instances, %d bitwise mismatches (serial and OpenMP DP vs enumeration)", mismatches)};
}

Verdict criterion6() {
  const auto ex = ramp_example();
  struct Case {
    const char* name;
    FieldDescriptor f;
  };
  std::mt19937_64 rng(6);
  RandomFieldOptions smooth;
  smooth.allow_jumps = false;
  std::vector<Case> cases{{"x", linear_field(1.0)},
                          {"h(t+x/3)", ex.f},
                          {"H(t+x/3)/3", ex.F},
                          {"hbar(t+x/3)", ex.g},
                          {"sin(t) x", sin_x()},
                          {"t x", t_x()},
                          {"x^2", FieldDescriptor(expr::product(expr::linear(1, 1, {1.0}), expr::linear(1, 1, {1.0})), 1)},
                          {"random A", random_scalar_field(rng, smooth)},
                          {"random B", random_scalar_field(rng, smooth)}};
  const Interval I{0.0, 4.0};
  const int j = 2;
  BoundGrid grid;
  grid.t_steps = 4096;
  grid.x_cells = 256;
  double worst = 0.0;
  std::string worst_name;
  for (const auto& c : cases) {
    const double tb = seminorm_TB(c.f, I, j, grid);
    const double dp = seminorm_TTheta(c.f, I, j, Modulus::linear(1e9), {128, 81, 0}).value;
    const double rel = tb > 0.0 ? std::abs(tb - dp) / tb : std::abs(dp);
    if (rel > worst) {
      worst = rel;
      worst_name = c.name;
    }
  }
  return {worst <= 0.01, fmt("%zu fields, worst |TB - DP|/TB = %.4g (%s)", cases.size(), worst, worst_name.c_str())};
}

double max_error(const Trajectory& tr, const std::function<double(double)>& exact) {
  double e = 0.0;
  for (std::size_t k = 0; k < tr.size(); ++k) e = std::max(e, std::abs(tr.x_at(k)[0] - exact(tr.t(k))));
  return e;
}

Verdict criterion7() {
  const double x0[] = {1.0};
  StepPolicy heun;
  const auto lin = linear_field(1.0);
  const double e_rel = std::abs(integrate(lin, x0, 0.0, 1.0, heun).x_final()[0] - std::exp(1.0)) / std::exp(1.0);

  // x' = sin(t) x, x = exp(1 - cos t).
  const auto sx = sin_x();
  auto exact_sin = [](double t) { return std::exp(1.0 - std::cos(t)); };
  auto exact_lin = [](double t) { return std::exp(t); };
  auto order = [&](Scheme s, const FieldDescriptor& f, const std::function<double(double)>& exact) {
    std::vector<double> dts, errs;
    for (int q = 5; q <= 9; ++q) {
      StepPolicy p;
      p.scheme = s;
      p.dt = std::ldexp(1.0, -q);
      dts.push_back(p.dt);
      errs.push_back(max_error(integrate(f, x0, 0.0, 1.0, p), exact));
    }
    return loglog_slope(dts, errs);
  };
  const double eu_lin = order(Scheme::averaged_euler, lin, exact_lin);
  const double eu_sin = order(Scheme::averaged_euler, sx, exact_sin);
  const double he_lin = order(Scheme::averaged_heun, lin, exact_lin);
  const double he_sin = order(Scheme::averaged_heun, sx, exact_sin);

  const auto ex = ramp_example();
  double picard_gap = 0.0;
  for (const auto* f : {&lin, &ex.f}) {
    const double start[] = {0.5};
    const auto pic = picard_oracle(*f, start, 0.0, 0.4, 2000);
    StepPolicy p;
    p.dt = 2e-4;
    const auto tr = integrate(*f, start, 0.0, 0.4, p);
    picard_gap = std::max(picard_gap, sup_distance(tr, pic.trajectory));
  }
  const bool pass = e_rel < 1e-4 && std::abs(eu_lin - 1.0) <= 0.3 && std::abs(eu_sin - 1.0) <= 0.3 &&
                    std::abs(he_lin - 2.0) <= 0.3 && std::abs(he_sin - 2.0) <= 0.3 && picard_gap < 1e-6;
  return {pass, fmt("|x(1)-e|/e=%.3g; euler order %.3f/%.3f, heun order %.3f/%.3f; picard gap %.3g", e_rel, eu_lin,
                    eu_sin, he_lin, he_sin, picard_gap)};
}

Verdict criterion8() {
  const auto ex = ramp_example();
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  StepPolicy p;
  p.dt = 1.0 / 1024.0;
  int violations = 0;
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double a[] = {u(rng)}, b[] = {u(rng)};
    const auto ta = integrate(ex.f, a, 0.0, 2.0, p), tb = integrate(ex.f, b, 0.0, 2.0, p);
    const double d0 = std::abs(a[0] - b[0]);
    for (std::size_t k = 0; k < ta.size(); ++k) {
      const double bound = d0 * std::exp(ta.t(k) / 3.0);
      const double d = std::abs(ta.x_at(k)[0] - tb.x_at(k)[0]);
      if (bound > 0.0) worst = std::max(worst, d / bound);
      if (d > bound * (1.0 + 1e-3)) ++violations;
    }
  }
  return {violations == 0, fmt("50 pairs, %d violations, max |dx| / (|dx0| e^{t/3}) = %.5f", violations, worst)};
}

Verdict criterion9() {
  const auto ex = ramp_example();
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-50.0, 50.0);

  // group law: (f_s)_t and f_{s+t} are the same descriptor.
  int group_bad = 0;
  for (int i = 0; i < 200; ++i) {
    const double s = u(rng), t = u(rng);
    if (!structurally_equal(translate(translate(ex.f, s), t), translate(ex.f, s + t))) ++group_bad;
  }

  // identity at t = 0
  const double x0[] = {0.5}, y0[] = {1.0};
  const auto k0 = FieldDescriptor(expr::zero({1, 1}), 1);
  const auto id1 = phi1(0.0, ex.f, x0);
  const auto id2 = phi2(0.0, ex.f, ex.F, k0, x0, y0);
  const bool identity = id1.x[0] == x0[0] && structurally_equal(id1.base[0], ex.f) && id2.x[0] == x0[0] &&
                        id2.y[0] == y0[0] && structurally_equal(id2.base[1], ex.F);

  // cocycle on a (t, s) grid
  const double grid[] = {0.25, 0.5, 1.0, 1.5};
  double worst_ratio = 0.0;
  const auto sx = sin_x();
  for (const auto* f : {&ex.f, &sx}) {
    const FieldDescriptor J = jacobian_field(*f);
    for (double t : grid)
      for (double s : grid) {
        const double tol1 = solver_tolerance(*f, x0, 0.0, t + s);
        const auto whole = phi1(t + s, *f, x0);
        const auto first = phi1(s, *f, x0);
        const auto chained = phi1(t, first.base[0], first.x);
        worst_ratio = std::max(worst_ratio, std::abs(whole.x[0] - chained.x[0]) / (2.0 * tol1));

        const double tol2 = solver_tolerance(*f, J, k0, x0, y0, 0.0, t + s);
        const auto w2 = phi2(t + s, *f, J, k0, x0, y0);
        const auto f2 = phi2(s, *f, J, k0, x0, y0);
        const auto c2 = phi2(t, f2.base[0], f2.base[1], f2.base[2], f2.x, f2.y);
        const double dev2 = std::max(std::abs(w2.x[0] - c2.x[0]), std::abs(w2.y[0] - c2.y[0]));
        worst_ratio = std::max(worst_ratio, dev2 / (2.0 * tol2));
      }
  }
  const bool pass = group_bad == 0 && identity && worst_ratio <= 1.0;
  return {pass, fmt("group law mismatches %d/200, identity exact=%d, max cocycle deviation / (2 tol) = %.3g", group_bad,
                    int(identity), worst_ratio)};
}

SampledBound sampled(Interval w, std::size_t steps, const std::function<double(double)>& m) {
  SampledBound b;
  b.window = w;
  b.steps = steps;
  b.radius = 1.0;
  for (std::size_t k = 0; k <= steps; ++k) b.values.push_back(m(b.t_at(k)));
  return b;
}

Verdict criterion10() {
  const Interval w{-1.0, 1.0};
  const std::size_t steps = 2048;
  const double dt = w.length() / steps;

  const std::vector<SampledBound> ones{sampled(w, steps, [](double) { return 1.0; })};
  const double eps_ones[] = {1.0 / 16, 1.0 / 8, 1.0 / 4, 1.0 / 2};
  bool exact = true;
  for (const auto& row : equicontinuity_profile(ones, 1.0, eps_ones)) exact = exact && row.delta && *row.delta == row.eps;

  // n 1_[0,1/n] up to n = 1/dt, the narrowest spike the grid resolves.
  std::vector<SampledBound> spikes;
  for (int n = 1; n <= static_cast<int>(1.0 / dt); ++n)
    spikes.push_back(sampled(w, steps, [n](double t) { return t >= 0.0 && t <= 1.0 / n ? double(n) : 0.0; }));
  const double half[] = {0.5};
  const bool spikes_fail = !equicontinuity_profile(spikes, 1.0, half).front().delta.has_value();

  // sqrt(n) 1_[0,1/n]: bounded in L^2 (norm 1), so equicontinuous by Hoelder.
  std::vector<SampledBound> l2;
  for (int n = 1; n <= 64; ++n) {
    l2.push_back(sampled(w, steps, [n](double t) { return t >= 0.0 && t <= 1.0 / n ? std::sqrt(double(n)) : 0.0; }));
    l2.back().p = 2.0;
  }
  const double S = std::sqrt(lp_bounded_sup(l2, 1.0));
  const double eps_l2[] = {0.5, 0.25, 0.125};
  bool hoelder = true;
  for (const auto& row : equicontinuity_profile(l2, 1.0, eps_l2))
    hoelder = hoelder && row.delta && *row.delta >= (row.eps / S) * (row.eps / S) - dt;
  return {exact && spikes_fail && hoelder,
          fmt("{m=1}: delta(eps)=eps exactly %d; spikes fail at 0.5 %d; L^2 family (sup norm %.4f) meets the Hoelder "
              "delta %d",
              int(exact), int(spikes_fail), S, int(hoelder))};
}

Verdict criterion11() {
  const auto ex = ramp_example();
  const std::vector<std::vector<double>> probes{{0.0}, {1.0}, {-1.0}};
  const double eps[] = {0.5, 0.1, 0.05};
  const auto rs = hull_compactness_test(sin_x(), probes, 4.0, eps);
  const auto rf = hull_compactness_test(ex.f, probes, 4.0, eps);
  const auto rt = hull_compactness_test(t_x(), probes, 4.0, eps);
  const bool pass = rs.pass() && rf.pass() && !rt.bounded;
  return {pass, fmt("sin(t)x %s, h(t+x/3) %s, t x %s (bounded=%d)", rs.pass() ? "PASS" : "FAIL",
                    rf.pass() ? "PASS" : "FAIL", rt.pass() ? "PASS" : "FAIL", int(rt.bounded))};
}

}  // namespace

int main() {
  run(1, "ramp-wave L1 convergence", 1.0, criterion1);
  run(2, "T_Theta convergence of F_4k to G", 60.0, criterion2);
  slack_info();
  run(3, "linearization error ladder", 30.0, criterion3);
  run(4, "seminorm ordering TD <= TTheta <= TB", 0.0, criterion4);
  run(5, "DP equals exhaustive enumeration", 0.0, criterion5);
  run(6, "TB matches large-theta DP", 0.0, criterion6);
  run(7, "solver accuracy, order and Picard agreement", 0.0, criterion7);
  run(8, "Gronwall audit", 0.0, criterion8);
  run(9, "flow laws", 0.0, criterion9);
  run(10, "equicontinuity detector", 0.0, criterion10);
  run(11, "hull compactness probe", 0.0, criterion11);
  return failures == 0 ? 0 : 1;
}

#include "carath/topology.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "parallel.hpp"
#include "carath/errors.hpp"
#include "carath/linalg.hpp"
#include "carath/quadrature.hpp"

namespace carath {

const char* to_string(SeminormKind k) {
  switch (k) {
    case SeminormKind::TB:
      return "tb";
    case SeminormKind::TD:
      return "td";
    case SeminormKind::TTheta:
      return "ttheta";
  }
  return "?";
}

bool AdmissibleCurve::admissible(const Modulus& theta, double slack) const {
  const std::size_t n = size();
  std::vector<double> d(dim);
  for (std::size_t a = 0; a < n; ++a) {
    if (euclidean_norm(at(a)) > radius * (1.0 + 1e-12)) return false;
    for (std::size_t b = a + 1; b < n; ++b) {
      for (std::size_t i = 0; i < dim; ++i) d[i] = at(b)[i] - at(a)[i];
      if (euclidean_norm(d) > theta(static_cast<double>(b - a) * dt) + slack) return false;
    }
  }
  return true;
}

namespace {

double root_p(double cost, double p) { return p == 1.0 ? cost : std::pow(cost, 1.0 / p); }

void check_index(Interval I, int j) {
  if (!(I.hi > I.lo)) throw RangeError("seminorm: empty interval");
  if (j < 1) throw RangeError("seminorm: radius must be >= 1");
}

double curve_cost(const FieldDescriptor& f, double p, const AdmissibleCurve& c) {
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < c.size(); ++k) {
    const double t = c.t0 + static_cast<double>(k) * c.dt;
    total += segment_lp_cost(f, p, t, t + c.dt, c.at(k), c.at(k + 1));
  }
  return total;
}

void project_to_ball(std::span<double> x, double r) {
  const double n = euclidean_norm(x);
  if (n > r)
    for (double& v : x) v *= r / n;
}

// Random admissible curves in B_j (steps bounded by theta(dt)) refined by
// single-node perturbations; the constant curve at the origin is a seed.
SeminormValue search_curves(const FieldDescriptor& f, Interval I, int j, const Modulus& theta, const Resolution& res,
                            const SearchOptions& opts) {
  const std::size_t dim = f.dim_in(), n = res.n_t + 1;
  const double dt = I.length() / static_cast<double>(res.n_t);
  const double step = theta(dt), r = j;
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unit;

  auto step_ok = [&](const AdmissibleCurve& c, std::size_t k) {
    std::vector<double> d(dim);
    auto gap_ok = [&](std::size_t a) {
      for (std::size_t i = 0; i < dim; ++i) d[i] = c.at(a + 1)[i] - c.at(a)[i];
      return euclidean_norm(d) <= step * (1.0 + 1e-12);
    };
    return (k == 0 || gap_ok(k - 1)) && (k + 1 == n || gap_ok(k));
  };
  auto random_vec = [&](double len) {
    std::vector<double> v(dim);
    for (double& x : v) x = gauss(rng);
    const double nv = euclidean_norm(v);
    const double scale = nv > 0.0 ? len * unit(rng) / nv : 0.0;
    for (double& x : v) x *= scale;
    return v;
  };

  SeminormValue best;
  best.heuristic = true;
  best.curve = {I.lo, dt, dim, std::vector<double>(n * dim, 0.0), r};
  double best_cost = curve_cost(f, f.p(), best.curve);

  for (std::size_t restart = 0; restart < opts.restarts; ++restart) {
    AdmissibleCurve c{I.lo, dt, dim, std::vector<double>(n * dim), r};
    auto start = random_vec(r);
    std::copy(start.begin(), start.end(), c.nodes.begin());
    for (std::size_t k = 1; k < n; ++k) {
      auto d = random_vec(step);
      std::span<double> x(c.nodes.data() + k * dim, dim);
      for (std::size_t i = 0; i < dim; ++i) x[i] = c.nodes[(k - 1) * dim + i] + d[i];
      project_to_ball(x, r);
    }
    double cost = curve_cost(f, f.p(), c);
    for (std::size_t it = 0; it < opts.iterations; ++it) {
      const std::size_t k = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
      std::span<double> x(c.nodes.data() + k * dim, dim);
      const std::vector<double> saved(x.begin(), x.end());
      auto d = random_vec(step);
      for (std::size_t i = 0; i < dim; ++i) x[i] += d[i];
      project_to_ball(x, r);
      if (step_ok(c, k)) {
        const double trial = curve_cost(f, f.p(), c);
        if (trial > cost) {
          cost = trial;
          continue;
        }
      }
      std::copy(saved.begin(), saved.end(), x.begin());
    }
    if (cost > best_cost) {
      best_cost = cost;
      best.curve = std::move(c);
    }
  }
  best.value = root_p(best_cost, f.p());
  return best;
}

}  // namespace

double seminorm_TD(const FieldDescriptor& f, Interval I, std::span<const double> x) {
  if (x.size() != f.dim_in()) throw DimensionError("seminorm_TD: point has the wrong dimension");
  if (I.hi <= I.lo) return 0.0;
  return root_p(segment_lp_cost(f, f.p(), I.lo, I.hi, x, x), f.p());
}

double seminorm_TB(const FieldDescriptor& f, Interval I, int j, const BoundGrid& grid) {
  check_index(I, j);
  return lp_norm(optimal_m_bound(f, j, I, grid), I);
}

kernels::CurveDpProblem make_curve_problem(const FieldDescriptor& f, Interval I, int j, const Modulus& theta,
                                           const Resolution& res) {
  check_index(I, j);
  if (f.dim_in() != 1) throw DimensionError("curve problem: state dimension must be 1");
  if (res.n_t == 0 || res.n_x == 0) throw RangeError("curve problem: empty resolution");
  kernels::CurveDpProblem pb;
  pb.field = &f;
  pb.p = f.p();
  pb.t0 = I.lo;
  pb.dt = I.length() / static_cast<double>(res.n_t);
  pb.steps = res.n_t;
  pb.cells = res.n_x;
  if (res.n_x == 1) {
    pb.x_lo = 0.0;
    pb.dx = 0.0;
    pb.max_jump = 0;
  } else {
    pb.x_lo = -j;
    pb.dx = 2.0 * j / static_cast<double>(res.n_x - 1);
    const double cells =
        std::floor(theta(pb.dt) / pb.dx * (1.0 + 1e-12)) + static_cast<double>(res.slack_cells);
    pb.max_jump = static_cast<std::size_t>(std::min(cells, static_cast<double>(res.n_x - 1)));
  }
  return pb;
}

SeminormValue seminorm_TTheta(const FieldDescriptor& f, Interval I, int j, const Modulus& theta,
                              const Resolution& res, const SearchOptions& search) {
  check_index(I, j);
  if (f.dim_in() != 1) return search_curves(f, I, j, theta, res, search);
  const auto pb = make_curve_problem(f, I, j, theta, res);
  const auto dp = kernels::omp::curve_dp(pb);
  SeminormValue out;
  out.value = root_p(dp.best_cost, f.p());
  out.curve = {I.lo, pb.dt, 1, {}, static_cast<double>(j)};
  for (std::size_t i : dp.path) out.curve.nodes.push_back(pb.node(i));
  return out;
}

SeminormValue seminorm_TTheta(const FieldDescriptor& f, Interval I, int j, const ModulusSet& thetas,
                              const Resolution& res, const SearchOptions& search) {
  return seminorm_TTheta(f, I, j, thetas.at({I, j}), res, search);
}

std::vector<std::vector<double>> dyadic_points(std::size_t dim, std::size_t count) {
  std::vector<std::vector<double>> out;
  if (dim == 0) {
    if (count > 0) out.emplace_back();
    return out;
  }
  for (int level = 0; out.size() < count; ++level) {
    const double h = std::ldexp(1.0, -level);
    const long half = static_cast<long>(level + 1) << level;
    std::vector<std::vector<double>> stage;
    std::vector<long> idx(dim, -half);
    for (;;) {
      std::vector<double> x(dim);
      bool old = level > 0;
      for (std::size_t i = 0; i < dim; ++i) {
        x[i] = static_cast<double>(idx[i]) * h;
        // Present in the previous stage: even numerator and inside the smaller cube.
        if (idx[i] % 2 != 0 || std::abs(x[i]) > level) old = false;
      }
      if (!old) stage.push_back(std::move(x));
      std::size_t i = 0;
      while (i < dim && ++idx[i] > half) idx[i++] = -half;
      if (i == dim) break;
    }
    std::stable_sort(stage.begin(), stage.end(), [](const auto& a, const auto& b) {
      const double na = euclidean_norm(a), nb = euclidean_norm(b);
      if (na != nb) return na < nb;
      return a < b;
    });
    for (auto& x : stage) {
      if (out.size() == count) break;
      out.push_back(std::move(x));
    }
  }
  return out;
}

std::vector<SeminormIndex> metric_indices(const MetricConfig& cfg, SeminormKind kind, std::size_t dim) {
  std::vector<SeminormIndex> out;
  const auto points = kind == SeminormKind::TD ? dyadic_points(dim, cfg.d_count) : std::vector<std::vector<double>>{};
  for (int n = 1; n <= cfg.n_max; ++n) {
    const Interval I{-static_cast<double>(n), static_cast<double>(n)};
    if (kind == SeminormKind::TD) {
      for (const auto& x : points) out.push_back({kind, I, 1, x});
    } else {
      for (int j = 1; j <= cfg.j_max; ++j) out.push_back({kind, I, j, {}});
    }
  }
  return out;
}

double seminorm(const FieldDescriptor& f, const SeminormIndex& idx, const MetricConfig& cfg) {
  switch (idx.kind) {
    case SeminormKind::TD:
      return seminorm_TD(f, idx.interval, idx.x_point);
    case SeminormKind::TB:
      return seminorm_TB(f, idx.interval, idx.radius, cfg.bound);
    case SeminormKind::TTheta:
      if (cfg.thetas) return seminorm_TTheta(f, idx.interval, idx.radius, *cfg.thetas, cfg.resolution, cfg.search).value;
      return seminorm_TTheta(f, idx.interval, idx.radius, cfg.theta, cfg.resolution, cfg.search).value;
  }
  return 0.0;
}

double metric(const FieldDescriptor& f, const FieldDescriptor& g, const MetricConfig& cfg, SeminormKind kind) {
  if (f.dim_in() != g.dim_in() || !(f.shape() == g.shape())) throw DimensionError("metric: fields differ in shape");
  if (f.p() != g.p()) throw DimensionError("metric: fields differ in exponent");
  const FieldDescriptor d = difference(f, g);
  const auto indices = metric_indices(cfg, kind, f.dim_in());
  std::vector<double> u(indices.size());
  const std::ptrdiff_t count = static_cast<std::ptrdiff_t>(indices.size());
  detail::parallel_for(count, [&](std::ptrdiff_t k) { u[k] = seminorm(d, indices[k], cfg); });
  double total = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) total += std::ldexp(1.0, -static_cast<int>(k + 1)) * (u[k] / (1.0 + u[k]));
  return total;
}

ConvergenceTable convergence_diagnostic(std::span<const FieldDescriptor> seq, const FieldDescriptor& limit,
                                        const MetricConfig& cfg, SeminormKind kind) {
  ConvergenceTable table;
  for (const auto& f : seq) table.distance.push_back(metric(f, limit, cfg, kind));
  if (table.distance.size() >= 2) {
    std::size_t down = 0;
    for (std::size_t k = 1; k < table.distance.size(); ++k) down += table.distance[k] <= table.distance[k - 1];
    table.trend = static_cast<double>(down) / static_cast<double>(table.distance.size() - 1);
  } else {
    table.trend = 1.0;
  }
  if (!table.distance.empty() && table.distance.front() > 0.0)
    table.ratio = table.distance.back() / table.distance.front();
  return table;
}

std::vector<FieldDescriptor> hull_sample(const FieldDescriptor& f, std::span<const double> taus) {
  std::vector<FieldDescriptor> out;
  out.reserve(taus.size());
  for (double tau : taus) out.push_back(translate(f, tau));
  return out;
}

EpsNet eps_net(std::span<const FieldDescriptor> points, const MetricConfig& cfg, SeminormKind kind, double eps) {
  if (!(eps > 0.0)) throw RangeError("eps_net: eps must be positive");
  EpsNet net;
  if (points.empty()) return net;
  std::vector<double> nearest(points.size(), std::numeric_limits<double>::infinity());
  std::size_t next = 0;
  for (;;) {
    net.members.push_back(next);
    nearest[next] = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i)
      if (nearest[i] > 0.0) nearest[i] = std::min(nearest[i], metric(points[i], points[next], cfg, kind));
    const auto far = std::max_element(nearest.begin(), nearest.end());
    net.radius = *far;
    if (*far <= eps) break;
    next = static_cast<std::size_t>(far - nearest.begin());
  }
  return net;
}

HullReport hull_compactness_test(const FieldDescriptor& f, const std::vector<std::vector<double>>& probes, double r,
                                 std::span<const double> eps_list, const HullOptions& opts) {
  if (!(r > 0.0) || !(opts.horizon > 0.0) || !(opts.tau_step > 0.0)) throw RangeError("hull test: bad window");
  const Interval window{-r, r};
  const auto steps = static_cast<long>(std::llround(opts.horizon / opts.tau_step));
  std::vector<double> taus;
  for (long k = -steps; k <= steps; ++k) taus.push_back(static_cast<double>(k) * opts.tau_step);

  HullReport report;
  report.bounded = report.uniformly_continuous = true;
  for (const auto& x : probes) {
    HullProbeReport pr;
    pr.probe = x;
    std::vector<double> norms(taus.size());
    const std::ptrdiff_t count = static_cast<std::ptrdiff_t>(taus.size());
    detail::parallel_for(count, [&](std::ptrdiff_t k) { norms[k] = seminorm_TD(translate(f, taus[k]), window, x); });
    for (std::size_t k = 0; k < taus.size(); ++k) {
      pr.sup_full = std::max(pr.sup_full, norms[k]);
      if (std::abs(taus[k]) <= 0.5 * opts.horizon) pr.sup_half = std::max(pr.sup_half, norms[k]);
    }
    pr.bounded = pr.sup_full <= 1.25 * pr.sup_half + 1e-12;

    // omega(delta), computed from the widest delta down until every eps is met.
    for (double eps : eps_list) pr.delta.push_back({eps, std::nullopt});
    double delta = opts.delta0;
    for (int level = 0; level < opts.delta_levels; ++level, delta *= 0.5) {
      bool open = false;
      for (const auto& row : pr.delta) open = open || !row.delta;
      if (!open) break;
      std::vector<double> omega(taus.size(), 0.0);
      detail::parallel_for(count, [&](std::ptrdiff_t k) {
        const FieldDescriptor base = translate(f, taus[k]);
        double w = 0.0;
        for (int q = 1; q <= 4; ++q)
          for (double sign : {-1.0, 1.0}) {
            const double sigma = sign * q * delta / 4.0;
            w = std::max(w, seminorm_TD(difference(translate(f, taus[k] + sigma), base), window, x));
          }
        omega[k] = w;
      });
      const double w = *std::max_element(omega.begin(), omega.end());
      for (auto& row : pr.delta)
        if (!row.delta && w < row.eps) row.delta = delta;
    }
    pr.uniformly_continuous = std::all_of(pr.delta.begin(), pr.delta.end(), [](const auto& row) { return row.delta.has_value(); });
    report.bounded = report.bounded && pr.bounded;
    report.uniformly_continuous = report.uniformly_continuous && pr.uniformly_continuous;
    report.probes.push_back(std::move(pr));
  }
  return report;
}

}  // namespace carath

#include "carath/bounds.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <random>

#include "small_buffer.hpp"

#include "parallel.hpp"
#include "carath/errors.hpp"
#include "carath/kernels.hpp"
#include "carath/linalg.hpp"

namespace carath {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

std::optional<double> node_sup(const ExprNode& n, double t, double r, std::size_t dim) {
  if (n.dim_in == 0) {
    detail::SmallBuffer x(dim), v(n.shape.size());
    // Time-only subtree: the sup over the ball is the value itself.
    evaluate_expr(n, t, x, v);
    return value_norm(v, n.shape);
  }
  return std::visit(overloaded{
                        [&](const node::LinearInX& l) -> std::optional<double> {
                          return r * operator_norm(l.a, n.shape.rows, dim);
                        },
                        [&](const node::ShiftCompose& s) -> std::optional<double> {
                          const double reach = r * euclidean_norm(s.a);
                          return s.g.max_abs(t - reach, t + reach);
                        },
                        [&](const node::ScalarScale& s) -> std::optional<double> {
                          auto v = node_sup(*s.e, t, r, dim);
                          if (!v) return std::nullopt;
                          return std::abs(s.c) * *v;
                        },
                        [&](const node::Translate& tr) { return node_sup(*tr.e, t + tr.tau, r, dim); },
                        [&](const auto&) -> std::optional<double> { return std::nullopt; },
                    },
                    n.data);
}

std::optional<double> node_lipschitz(const ExprNode& n, double t, double r, std::size_t dim) {
  if (n.dim_in == 0) return 0.0;
  return std::visit(overloaded{
                        [&](const node::LinearInX& l) -> std::optional<double> {
                          return operator_norm(l.a, n.shape.rows, dim);
                        },
                        [&](const node::ShiftCompose& s) -> std::optional<double> {
                          auto d = s.g.derivative();
                          if (!d) return std::nullopt;
                          const double na = euclidean_norm(s.a);
                          return na * d->max_abs(t - r * na, t + r * na);
                        },
                        [&](const node::ScalarScale& s) -> std::optional<double> {
                          auto v = node_lipschitz(*s.e, t, r, dim);
                          if (!v) return std::nullopt;
                          return std::abs(s.c) * *v;
                        },
                        [&](const node::Translate& tr) { return node_lipschitz(*tr.e, t + tr.tau, r, dim); },
                        [&](const auto&) -> std::optional<double> { return std::nullopt; },
                    },
                    n.data);
}

void check_grid(double radius, Interval window, const BoundGrid& grid) {
  if (!(radius > 0.0)) throw RangeError("bound: radius must be positive");
  if (!(window.hi > window.lo)) throw RangeError("bound: empty window");
  if (grid.t_steps == 0 || grid.x_cells == 0) throw RangeError("bound: grids must be nonempty");
}

std::vector<double> time_grid(Interval window, std::size_t steps) {
  std::vector<double> times(steps + 1);
  const double dt = window.length() / static_cast<double>(steps);
  for (std::size_t k = 0; k <= steps; ++k) times[k] = window.lo + static_cast<double>(k) * dt;
  return times;
}

// Cumulative integral of the interpolant of value^power from window.lo to t.
class Cumulative {
 public:
  Cumulative(const SampledBound& b, double power) : b_(b), dt_(b.dt()), v_(b.values.size()), prefix_(b.values.size()) {
    for (std::size_t k = 0; k < v_.size(); ++k) v_[k] = power == 1.0 ? b.values[k] : std::pow(b.values[k], power);
    prefix_[0] = 0.0;
    for (std::size_t k = 1; k < v_.size(); ++k) prefix_[k] = prefix_[k - 1] + 0.5 * dt_ * (v_[k - 1] + v_[k]);
  }

  double at(double t) const {
    const double pos = (t - b_.window.lo) / dt_;
    if (pos <= 0.0) return 0.0;
    const std::size_t last = v_.size() - 1;
    if (pos >= static_cast<double>(last)) return prefix_[last];
    const auto k = static_cast<std::size_t>(pos);
    const double u = pos - static_cast<double>(k);
    if (u == 0.0) return prefix_[k];
    return prefix_[k] + dt_ * (v_[k] * u + 0.5 * (v_[k + 1] - v_[k]) * u * u);
  }
  double at_index(std::size_t k) const { return prefix_[k]; }

 private:
  const SampledBound& b_;
  double dt_;
  std::vector<double> v_;
  std::vector<double> prefix_;
};

bool covers(const SampledBound& b, double a, double c) {
  const double slack = 1e-12 * std::max(1.0, b.window.length());
  return a >= b.window.lo - slack && c <= b.window.hi + slack;
}

}  // namespace

std::optional<double> structural_sup(const FieldDescriptor& f, double t, double radius) {
  return node_sup(*f.expr(), t, radius, f.dim_in());
}

std::optional<double> structural_lipschitz(const FieldDescriptor& f, double t, double radius) {
  return node_lipschitz(*f.expr(), t, radius, f.dim_in());
}

std::vector<std::vector<double>> ball_lattice(std::size_t dim, double radius, std::size_t cells) {
  std::vector<std::vector<double>> points;
  const double h = 2.0 * radius / static_cast<double>(cells);
  std::vector<std::size_t> idx(dim, 0);
  for (;;) {
    std::vector<double> x(dim);
    for (std::size_t i = 0; i < dim; ++i) x[i] = -radius + static_cast<double>(idx[i]) * h;
    if (dim == 1 || euclidean_norm(x) <= radius * (1.0 + 1e-12)) points.push_back(std::move(x));
    std::size_t i = 0;
    while (i < dim && ++idx[i] > cells) idx[i++] = 0;
    if (i == dim) break;
  }
  return points;
}

SampledBound optimal_m_bound(const FieldDescriptor& f, double radius, Interval window, const BoundGrid& grid) {
  check_grid(radius, window, grid);
  SampledBound b{window, grid.t_steps, {}, f.p(), radius};
  const auto times = time_grid(window, grid.t_steps);
  if (structural_sup(f, times[0], radius)) {
    b.values.resize(times.size());
    for (std::size_t k = 0; k < times.size(); ++k) b.values[k] = *structural_sup(f, times[k], radius);
  } else {
    b.values = kernels::omp::lattice_sup(f, times, ball_lattice(f.dim_in(), radius, grid.x_cells));
  }
  return b;
}

SampledBound optimal_l_bound(const FieldDescriptor& f, double radius, Interval window, const BoundGrid& grid) {
  if (f.class_claim() != ClassClaim::LC) throw UnsupportedError("optimal_l_bound: field does not claim class LC");
  check_grid(radius, window, grid);
  SampledBound b{window, grid.t_steps, {}, f.p(), radius};
  const auto times = time_grid(window, grid.t_steps);
  b.values.resize(times.size());
  if (structural_lipschitz(f, times[0], radius)) {
    for (std::size_t k = 0; k < times.size(); ++k) b.values[k] = *structural_lipschitz(f, times[k], radius);
    return b;
  }
  const std::size_t dim = f.dim_in();
  const auto lattice = ball_lattice(dim, radius, grid.x_cells);
  const double h = 2.0 * radius / static_cast<double>(grid.x_cells);
  const std::ptrdiff_t count = static_cast<std::ptrdiff_t>(times.size());
  detail::parallel_for(count, [&](std::ptrdiff_t k) {
    const double t = times[k];
    std::vector<double> fx(f.dim_out()), fy(f.dim_out()), diff(f.dim_out()), y(dim), dxy(dim);
    double best = 0.0;
    auto quotient = [&](std::span<const double> x, std::span<const double> yy) {
      for (std::size_t i = 0; i < dim; ++i) dxy[i] = x[i] - yy[i];
      const double dist = euclidean_norm(dxy);
      if (dist == 0.0) return;
      f.evaluate_into(t, x, fx);
      f.evaluate_into(t, yy, fy);
      for (std::size_t i = 0; i < fx.size(); ++i) diff[i] = fx[i] - fy[i];
      best = std::max(best, value_norm(diff, f.shape()) / dist);
    };
    // Neighbouring lattice points along each axis.
    for (const auto& x : lattice)
      for (std::size_t axis = 0; axis < dim; ++axis) {
        y.assign(x.begin(), x.end());
        y[axis] += h;
        if (euclidean_norm(y) <= radius * (1.0 + 1e-12) || (dim == 1 && y[0] <= radius * (1.0 + 1e-12)))
          quotient(x, y);
      }
    // Seeded random pairs; the stream depends only on (seed, k).
    std::mt19937_64 rng(grid.seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(k));
    std::uniform_real_distribution<double> u(-radius, radius);
    auto sample = [&](std::vector<double>& z) {
      do {
        for (auto& zi : z) zi = u(rng);
      } while (euclidean_norm(z) > radius);
    };
    std::vector<double> a(dim), c(dim);
    for (std::size_t s = 0; s < grid.pair_samples; ++s) {
      sample(a);
      sample(c);
      quotient(a, c);
    }
    b.values[static_cast<std::size_t>(k)] = best;
  });
  return b;
}

double bound_integral(const SampledBound& b, double a, double c, double power) {
  if (!covers(b, a, c) || c < a) throw RangeError("bound_integral: interval outside the sampled window");
  const Cumulative cum(b, power);
  return cum.at(c) - cum.at(a);
}

double lp_norm(const SampledBound& b, Interval sub) {
  if (!covers(b, sub.lo, sub.hi) || sub.hi < sub.lo) throw RangeError("lp_norm: sub-interval outside the window");
  const double integral = bound_integral(b, sub.lo, sub.hi, b.p);
  return b.p == 1.0 ? integral : std::pow(integral, 1.0 / b.p);
}

double lp_bounded_sup(std::span<const SampledBound> family, double r) {
  double sup = 0.0;
  for (const auto& b : family) {
    if (b.p != family[0].p) throw DimensionError("lp_bounded_sup: family mixes exponents");
    if (!covers(b, -r, r)) throw RangeError("lp_bounded_sup: bound does not cover [-r, r]");
    sup = std::max(sup, bound_integral(b, -r, r, b.p));
  }
  return sup;
}

std::vector<EquicontinuityRow> equicontinuity_profile(std::span<const SampledBound> family, double r,
                                                      std::span<const double> eps_list) {
  std::vector<EquicontinuityRow> rows;
  if (family.empty()) {
    for (double e : eps_list) rows.push_back({e, std::numeric_limits<double>::infinity()});
    return rows;
  }
  const SampledBound& ref = family[0];
  for (const auto& b : family) {
    if (!(b.window == ref.window) || b.steps != ref.steps)
      throw DimensionError("equicontinuity_profile: family members must share one time grid");
    if (!covers(b, -r, r)) throw RangeError("equicontinuity_profile: bound does not cover [-r, r]");
  }
  const double dt = ref.dt();
  const auto k_lo = static_cast<std::size_t>(std::max(0.0, std::ceil((-r - ref.window.lo) / dt - 1e-9)));
  const auto k_hi = std::min(ref.steps, static_cast<std::size_t>(std::floor((r - ref.window.lo) / dt + 1e-9)));
  const std::size_t span_steps = k_hi - k_lo;

  std::vector<Cumulative> cums;
  cums.reserve(family.size());
  for (const auto& b : family) cums.emplace_back(b, 1.0);

  // Largest window integral over windows of `len` grid steps, nondecreasing in len.
  auto widest = [&](std::size_t len) {
    double w = 0.0;
    for (const auto& c : cums)
      for (std::size_t k = k_lo; k + len <= k_hi; ++k) w = std::max(w, c.at_index(k + len) - c.at_index(k));
    return w;
  };

  for (double eps : eps_list) {
    // Ties within rounding count as >= eps.
    const double limit = eps * (1.0 - 64.0 * DBL_EPSILON);
    auto ok = [&](std::size_t len) { return widest(len) < limit; };
    EquicontinuityRow row{eps, std::nullopt};
    if (span_steps == 0 || ok(span_steps)) {
      row.delta = std::numeric_limits<double>::infinity();
    } else if (ok(1)) {
      std::size_t good = 1, bad = span_steps;
      while (bad - good > 1) {
        const std::size_t mid = good + (bad - good) / 2;
        (ok(mid) ? good : bad) = mid;
      }
      row.delta = static_cast<double>(good + 1) * dt;
    }
    rows.push_back(row);
  }
  return rows;
}

Modulus::Modulus(std::vector<double> knots, std::vector<double> values) : knots_(std::move(knots)), values_(std::move(values)) {
  if (knots_.size() < 2 || knots_.size() != values_.size()) throw DimensionError("modulus: need >= 2 matching knots");
  if (knots_[0] != 0.0 || values_[0] != 0.0) throw DimensionError("modulus: theta(0) must be 0");
  for (std::size_t i = 1; i < knots_.size(); ++i) {
    if (!(knots_[i] > knots_[i - 1])) throw DimensionError("modulus: knots must increase");
    if (values_[i] < values_[i - 1]) throw DimensionError("modulus: values must be nondecreasing");
  }
}

Modulus Modulus::linear(double slope) { return Modulus({0.0, 1.0}, {0.0, slope}); }

double Modulus::operator()(double s) const {
  if (s <= 0.0) return 0.0;
  auto it = std::upper_bound(knots_.begin(), knots_.end(), s);
  std::size_t i = it == knots_.end() ? knots_.size() - 1 : static_cast<std::size_t>(it - knots_.begin());
  const double s0 = knots_[i - 1], s1 = knots_[i];
  const double slope = (values_[i] - values_[i - 1]) / (s1 - s0);
  return values_[i - 1] + slope * (s - s0);
}

const Modulus& ModulusSet::at(const ModulusKey& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end())
    throw IndexError("no modulus for I=[" + std::to_string(key.interval.lo) + "," + std::to_string(key.interval.hi) +
                     "] j=" + std::to_string(key.radius));
  return it->second;
}

namespace {
bool below(const ModulusKey& a, const ModulusKey& b) { return b.interval.contains(a.interval) && a.radius <= b.radius; }
}  // namespace

void ModulusSet::enforce_order() {
  std::map<ModulusKey, Modulus> result;
  for (const auto& [key, theta] : entries_) {
    std::vector<double> values = theta.values();
    for (const auto& [other, other_theta] : entries_) {
      if (!below(other, key)) continue;
      if (other_theta.knots() != theta.knots()) throw DimensionError("modulus set: entries use different s-grids");
      for (std::size_t i = 0; i < values.size(); ++i) values[i] = std::max(values[i], other_theta.values()[i]);
    }
    for (std::size_t i = 1; i < values.size(); ++i) values[i] = std::max(values[i], values[i - 1]);
    values[0] = 0.0;
    result.emplace(key, Modulus(theta.knots(), std::move(values)));
  }
  entries_ = std::move(result);
}

bool ModulusSet::respects_order(double tol) const {
  for (const auto& [key, theta] : entries_) {
    if (theta.values()[0] != 0.0) return false;
    for (std::size_t i = 1; i < theta.values().size(); ++i)
      if (theta.values()[i] < theta.values()[i - 1] - tol) return false;
    for (const auto& [other, other_theta] : entries_) {
      if (!below(other, key)) continue;
      for (double s : theta.knots())
        if (other_theta(s) > theta(s) + tol) return false;
    }
  }
  return true;
}

ModulusSet theta_from_mbounds(std::span<const FieldDescriptor> family, std::span<const Interval> intervals,
                              std::span<const int> radii, const ThetaGrid& grid) {
  if (family.empty()) throw RangeError("theta_from_mbounds: empty family");
  if (grid.s_knots < 2) throw RangeError("theta_from_mbounds: need at least two s-knots");
  double s_max = grid.s_max;
  if (s_max <= 0.0)
    for (const auto& I : intervals) s_max = std::max(s_max, I.length());
  if (!(s_max > 0.0)) throw RangeError("theta_from_mbounds: zero s-range");
  std::vector<double> knots(grid.s_knots);
  for (std::size_t i = 0; i < knots.size(); ++i)
    knots[i] = s_max * static_cast<double>(i) / static_cast<double>(knots.size() - 1);

  ModulusSet set;
  for (const auto& I : intervals) {
    for (int j : radii) {
      std::vector<double> values(knots.size(), 0.0);
      const Interval window{I.lo, I.hi + s_max};
      // Keep the time step of the bound grid independent of s_max.
      BoundGrid bg = grid.bound;
      bg.t_steps = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::llround(static_cast<double>(grid.bound.t_steps) * window.length() /
                                                   std::max(I.length(), 1e-300))));
      for (const auto& f : family) {
        const SampledBound m = optimal_m_bound(f, j, window, bg);
        const Cumulative cum(m, 1.0);
        for (std::size_t k = 0; k <= m.steps; ++k) {
          const double t = m.t_at(k);
          if (t > I.hi + 1e-12 * std::max(1.0, I.length())) break;
          const double base = cum.at_index(k);
          for (std::size_t i = 1; i < knots.size(); ++i) values[i] = std::max(values[i], cum.at(t + knots[i]) - base);
        }
      }
      values[0] = 0.0;
      for (std::size_t i = 1; i < values.size(); ++i) values[i] = std::max(values[i], values[i - 1]);
      set.insert({I, j}, Modulus(knots, std::move(values)));
    }
  }
  set.enforce_order();
  return set;
}

ModulusSet theta_from_solutions(std::span<const FieldDescriptor> family, std::span<const Interval> intervals,
                                std::span<const int> radii, const StepPolicy& policy, const SolutionThetaGrid& grid) {
  if (family.empty()) throw RangeError("theta_from_solutions: empty family");
  if (grid.s_knots < 2 || grid.starts == 0) throw RangeError("theta_from_solutions: grid too small");
  double s_max = grid.s_max;
  if (s_max <= 0.0)
    for (const auto& I : intervals) s_max = std::max(s_max, I.length());
  if (!(s_max > 0.0)) throw RangeError("theta_from_solutions: zero s-range");
  std::vector<double> knots(grid.s_knots);
  for (std::size_t i = 0; i < knots.size(); ++i)
    knots[i] = s_max * static_cast<double>(i) / static_cast<double>(knots.size() - 1);

  ModulusSet set;
  for (const auto& I : intervals) {
    if (!(I.hi > I.lo)) throw RangeError("theta_from_solutions: empty interval");
    for (int j : radii) {
      StepPolicy pol = policy;
      pol.exit_radius = static_cast<double>(j);
      std::vector<double> values(knots.size(), 0.0);
      const auto starts = ball_lattice(family[0].dim_in(), j, grid.x0_cells);
      for (const auto& f : family) {
        std::vector<Trajectory> runs(grid.starts * starts.size());
        const std::ptrdiff_t count = static_cast<std::ptrdiff_t>(runs.size());
        detail::parallel_for(count, [&](std::ptrdiff_t r) {
          const std::size_t si = static_cast<std::size_t>(r) / starts.size();
          const double t0 = I.lo + I.length() * static_cast<double>(si) / static_cast<double>(grid.starts);
          runs[r] = integrate(f, starts[static_cast<std::size_t>(r) % starts.size()], t0, I.hi, pol);
        });
        std::vector<double> diff(f.dim_in());
        for (const auto& tr : runs) {
          const std::size_t n = tr.size();
          if (n < 2) continue;
          // widest[L] = max_k |x_{k+L} - x_k|
          std::vector<double> widest(n, 0.0);
          for (std::size_t L = 1; L < n; ++L)
            for (std::size_t k = 0; k + L < n; ++k) {
              for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = tr.x_at(k + L)[i] - tr.x_at(k)[i];
              widest[L] = std::max(widest[L], euclidean_norm(diff));
            }
          const double h = std::abs(tr.h);
          std::size_t L = 0;
          double run_max = 0.0;
          for (std::size_t i = 1; i < knots.size(); ++i) {
            while (L + 1 < n && static_cast<double>(L + 1) * h <= knots[i] * (1.0 + 1e-9)) run_max = std::max(run_max, widest[++L]);
            values[i] = std::max(values[i], run_max);
          }
        }
      }
      for (std::size_t i = 1; i < values.size(); ++i) values[i] = std::max(values[i], values[i - 1]);
      set.insert({I, j}, Modulus(knots, std::move(values)));
    }
  }
  set.enforce_order();
  return set;
}

}  // namespace carath

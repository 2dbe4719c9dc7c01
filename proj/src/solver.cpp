#include "carath/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "carath/errors.hpp"
#include "carath/linalg.hpp"
#include "carath/quadrature.hpp"

namespace carath {

const char* to_string(Scheme s) { return s == Scheme::averaged_euler ? "averaged_euler" : "averaged_heun"; }

const char* to_string(TrajectoryStatus s) {
  switch (s) {
    case TrajectoryStatus::complete:
      return "complete";
    case TrajectoryStatus::truncated_blowup:
      return "truncated_blowup";
    case TrajectoryStatus::truncated_exit:
      return "truncated_exit";
  }
  return "?";
}

void StepPolicy::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw RangeError("step policy: dt must be positive");
  if (subsamples < 1) throw RangeError("step policy: subsamples must be >= 1");
  if (!(r_max > 0.0)) throw RangeError("step policy: r_max must be positive");
  if (exit_radius && !(*exit_radius > 0.0)) throw RangeError("step policy: exit radius must be positive");
}

namespace {

struct YSystem {
  const FieldDescriptor* F = nullptr;
  const FieldDescriptor* k = nullptr;
};

bool has_nan(std::span<const double> v) {
  for (double a : v)
    if (std::isnan(a)) return true;
  return false;
}

// y + A y + b with A row-major n x n
void affine_step(std::span<const double> y, std::span<const double> A, std::span<const double> b,
                 std::span<double> out) {
  const std::size_t n = y.size();
  for (std::size_t r = 0; r < n; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < n; ++c) s += A[r * n + c] * y[c];
    out[r] = s + (b.empty() ? 0.0 : b[r]);
  }
}

Trajectory run(const FieldDescriptor& f, const YSystem* ys, std::span<const double> x0, std::span<const double> y0,
               double t0, double t1, const StepPolicy& policy) {
  policy.validate();
  const std::size_t n = f.dim_in();
  if (x0.size() != n || f.dim_out() != n) throw DimensionError("integrate: field must map R x R^N to R^N");
  if (!std::isfinite(t0) || !std::isfinite(t1)) throw RangeError("integrate: span must be finite");
  Trajectory tr;
  if (f.class_claim() != ClassClaim::LC) {
    if (!policy.allow_non_lc)
      throw UnsupportedError(std::string("integrate: field claims ") + to_string(f.class_claim()) +
                             ", not LC; pass the non-LC override to integrate anyway");
    tr.warning = "field is not claimed LC; the solution may not be unique";
  }
  if (ys) {
    if (ys->F->dim_in() != n || ys->F->shape().rows != n || ys->F->shape().cols != n)
      throw DimensionError("integrate_triangular: F must be N x N valued on R x R^N");
    if (ys->k && (ys->k->dim_in() != n || ys->k->dim_out() != n))
      throw DimensionError("integrate_triangular: inhomogeneity must be R^N valued");
    if (y0.size() != n) throw DimensionError("integrate_triangular: y0 has the wrong dimension");
  }

  const double len = std::abs(t1 - t0);
  const auto steps = len == 0.0 ? std::size_t{0}
                                : static_cast<std::size_t>(std::max(1.0, std::ceil(len / policy.dt - 1e-9)));
  tr.t0 = t0;
  tr.h = steps == 0 ? 0.0 : (t1 - t0) / static_cast<double>(steps);
  tr.dim = n;
  tr.x.reserve((steps + 1) * n);
  tr.x.assign(x0.begin(), x0.end());
  if (ys) {
    tr.y_dim = n;
    tr.y.reserve((steps + 1) * n);
    tr.y.assign(y0.begin(), y0.end());
  }

  const bool heun = policy.scheme == Scheme::averaged_heun;
  const int m = policy.subsamples;
  std::vector<double> x(x0.begin(), x0.end()), s0(n), s1(n), xp(n), xn(n);
  std::vector<double> y(y0.begin(), y0.end()), a0(n * n), a1(n * n), b0, b1, d0(n), d1(n), yp(n), yn(n);
  if (ys && ys->k) {
    b0.resize(n);
    b1.resize(n);
  }

  auto over = [&](std::span<const double> v, double t) {
    if (has_nan(v)) throw SolverError("integrate: non-finite state", t);
    return euclidean_norm(v) > policy.r_max;
  };

  for (std::size_t k = 0; k < steps; ++k) {
    const double ta = tr.t(k), tb = k + 1 == steps ? t1 : tr.t(k + 1);
    midpoint_slice(f, ta, tb, x, m, s0);
    if (has_nan(s0)) throw SolverError("integrate: field returned a non-finite value", ta);
    for (std::size_t i = 0; i < n; ++i) xp[i] = x[i] + s0[i];
    bool blown = over(xp, tb);
    if (heun && !blown) {
      midpoint_slice(f, ta, tb, xp, m, s1);
      if (has_nan(s1)) throw SolverError("integrate: field returned a non-finite value", ta);
      for (std::size_t i = 0; i < n; ++i) xn[i] = x[i] + 0.5 * (s0[i] + s1[i]);
      blown = over(xn, tb);
    } else {
      xn = xp;
    }
    if (blown) {
      tr.status = TrajectoryStatus::truncated_blowup;
      tr.exit_time = tb;
      break;
    }
    if (policy.exit_radius && euclidean_norm(xn) > *policy.exit_radius) {
      tr.status = TrajectoryStatus::truncated_exit;
      tr.exit_time = tb;
      break;
    }
    if (ys) {
      midpoint_slice(*ys->F, ta, tb, x, m, a0);
      if (ys->k) midpoint_slice(*ys->k, ta, tb, x, m, b0);
      affine_step(y, a0, b0, d0);
      if (heun) {
        for (std::size_t i = 0; i < n; ++i) yp[i] = y[i] + d0[i];
        midpoint_slice(*ys->F, ta, tb, xp, m, a1);
        if (ys->k) midpoint_slice(*ys->k, ta, tb, xp, m, b1);
        affine_step(yp, a1, b1, d1);
        for (std::size_t i = 0; i < n; ++i) yn[i] = y[i] + 0.5 * (d0[i] + d1[i]);
      } else {
        for (std::size_t i = 0; i < n; ++i) yn[i] = y[i] + d0[i];
      }
      for (double v : yn)
        if (!std::isfinite(v)) throw SolverError("integrate_triangular: non-finite y", ta);
      y.swap(yn);
      tr.y.insert(tr.y.end(), y.begin(), y.end());
    }
    x.swap(xn);
    tr.x.insert(tr.x.end(), x.begin(), x.end());
  }
  return tr;
}

}  // namespace

Trajectory integrate(const FieldDescriptor& f, std::span<const double> x0, double t0, double t1,
                     const StepPolicy& policy) {
  return run(f, nullptr, x0, {}, t0, t1, policy);
}

Trajectory integrate_triangular(const FieldDescriptor& f, const FieldDescriptor& F, const FieldDescriptor& k,
                                std::span<const double> x0, std::span<const double> y0, double t0, double t1,
                                const StepPolicy& policy) {
  const YSystem ys{&F, &k};
  return run(f, &ys, x0, y0, t0, t1, policy);
}

Trajectory integrate_variational(const FieldDescriptor& f, const FieldDescriptor& F, std::span<const double> x0,
                                 std::span<const double> y0, double t0, double t1, const StepPolicy& policy) {
  const YSystem ys{&F, nullptr};
  return run(f, &ys, x0, y0, t0, t1, policy);
}

PicardResult picard_oracle(const FieldDescriptor& f, std::span<const double> x0, double t0, double t1,
                           std::size_t grid_n, int max_iterations, double tol) {
  const std::size_t n = f.dim_in();
  if (x0.size() != n || f.dim_out() != n) throw DimensionError("picard: field must map R x R^N to R^N");
  if (grid_n == 0) throw RangeError("picard: grid must have at least one cell");
  PicardResult res;
  Trajectory& tr = res.trajectory;
  tr.t0 = t0;
  tr.h = (t1 - t0) / static_cast<double>(grid_n);
  tr.dim = n;
  tr.x.resize((grid_n + 1) * n);
  for (std::size_t k = 0; k <= grid_n; ++k) std::copy(x0.begin(), x0.end(), tr.x.begin() + static_cast<std::ptrdiff_t>(k * n));

  std::vector<double> next(tr.x.size()), breaks, pt(n), val(n);
  double prev_change = std::numeric_limits<double>::infinity();
  int growth = 0;
  for (int it = 1; it <= max_iterations; ++it) {
    std::copy(x0.begin(), x0.end(), next.begin());
    for (std::size_t k = 0; k < grid_n; ++k) {
      const double ta = tr.t(k), tb = k + 1 == grid_n ? t1 : tr.t(k + 1);
      const auto xa = tr.x_at(k), xb = tr.x_at(k + 1);
      breaks.clear();
      segment_breakpoints(f, std::min(ta, tb), std::max(ta, tb), ta < tb ? xa : xb, ta < tb ? xb : xa, breaks);
      for (std::size_t c = 0; c < n; ++c) {
        auto phi = [&](double t) {
          const double lambda = (t - ta) / (tb - ta);
          for (std::size_t i = 0; i < n; ++i) pt[i] = xa[i] + (xb[i] - xa[i]) * lambda;
          f.evaluate_into(t, pt, val);
          return val[c];
        };
        double integral = integrate_split(phi, std::min(ta, tb), std::max(ta, tb), breaks);
        if (tb < ta) integral = -integral;
        next[(k + 1) * n + c] = next[k * n + c] + integral;
      }
    }
    double change = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i) {
      if (!std::isfinite(next[i])) throw SolverError("picard: non-finite iterate", t1);
      change = std::max(change, std::abs(next[i] - tr.x[i]));
    }
    tr.x.swap(next);
    res.iterations = it;
    res.residual = change;
    if (change < tol) {
      res.converged = true;
      break;
    }
    growth = change > prev_change ? growth + 1 : 0;
    if (growth >= 3) throw SolverError("picard: iteration is not contracting on this span", t1);
    prev_change = change;
  }
  return res;
}

double sup_distance(const Trajectory& a, const Trajectory& b) {
  if (a.dim != b.dim || a.t0 != b.t0) throw DimensionError("sup_distance: trajectories do not share a grid");
  const Trajectory& coarse = std::abs(a.h) >= std::abs(b.h) ? a : b;
  const Trajectory& fine = &coarse == &a ? b : a;
  const double ratio = fine.h == 0.0 ? 1.0 : coarse.h / fine.h;
  const auto r = static_cast<std::size_t>(std::llround(ratio));
  if (r == 0 || std::abs(ratio - static_cast<double>(r)) > 1e-9) throw DimensionError("sup_distance: grids do not nest");
  const bool with_y = a.y_dim > 0 && a.y_dim == b.y_dim;
  double sup = 0.0;
  std::vector<double> d(std::max(a.dim, a.y_dim));
  for (std::size_t k = 0; k < coarse.size() && k * r < fine.size(); ++k) {
    for (std::size_t i = 0; i < a.dim; ++i) d[i] = coarse.x_at(k)[i] - fine.x_at(k * r)[i];
    sup = std::max(sup, euclidean_norm(std::span(d).first(a.dim)));
    if (!with_y) continue;
    for (std::size_t i = 0; i < a.y_dim; ++i) d[i] = coarse.y_at(k)[i] - fine.y_at(k * r)[i];
    sup = std::max(sup, euclidean_norm(std::span(d).first(a.y_dim)));
  }
  return sup;
}

double solver_tolerance(const FieldDescriptor& f, std::span<const double> x0, double t0, double t1,
                        const StepPolicy& policy) {
  StepPolicy half = policy;
  half.dt = policy.dt / 2.0;
  const Trajectory a = integrate(f, x0, t0, t1, policy);
  const Trajectory b = integrate(f, x0, t0, t1, half);
  const double q = policy.scheme == Scheme::averaged_heun ? 2.0 : 1.0;
  const double gain = std::pow(2.0, q) / (std::pow(2.0, q) - 1.0);
  return std::max(policy.noise_tolerance, gain * sup_distance(a, b));
}

double solver_tolerance(const FieldDescriptor& f, const FieldDescriptor& F, const FieldDescriptor& k,
                        std::span<const double> x0, std::span<const double> y0, double t0, double t1,
                        const StepPolicy& policy) {
  StepPolicy half = policy;
  half.dt = policy.dt / 2.0;
  const Trajectory a = integrate_triangular(f, F, k, x0, y0, t0, t1, policy);
  const Trajectory b = integrate_triangular(f, F, k, x0, y0, t0, t1, half);
  const double q = policy.scheme == Scheme::averaged_heun ? 2.0 : 1.0;
  const double gain = std::pow(2.0, q) / (std::pow(2.0, q) - 1.0);
  return std::max(policy.noise_tolerance, gain * sup_distance(a, b));
}

}  // namespace carath

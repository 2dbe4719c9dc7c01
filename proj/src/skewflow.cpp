#include "carath/skewflow.hpp"

#include <cmath>
#include <limits>

#include "parallel.hpp"
#include "carath/errors.hpp"
#include "carath/linalg.hpp"

namespace carath {
namespace {

void require_complete(const Trajectory& tr, const char* who) {
  if (!tr.complete())
    throw MaximalIntervalError(std::string(who) + ": solution left the domain (" + to_string(tr.status) + ")",
                               tr.exit_time.value_or(tr.t0));
}

std::vector<double> final_of(std::span<const double> flat, std::size_t dim) {
  return {flat.end() - static_cast<std::ptrdiff_t>(dim), flat.end()};
}

// sup_k |a_k - b_k| over samples of equal grids, on the x or y component.
double sup_gap(const Trajectory& a, const Trajectory& b, bool use_y) {
  if (a.size() != b.size()) throw DimensionError("trajectories have different grids");
  double sup = 0.0;
  const std::size_t d = use_y ? a.y_dim : a.dim;
  std::vector<double> diff(d);
  for (std::size_t k = 0; k < a.size(); ++k) {
    const auto u = use_y ? a.y_at(k) : a.x_at(k);
    const auto v = use_y ? b.y_at(k) : b.x_at(k);
    for (std::size_t i = 0; i < d; ++i) diff[i] = u[i] - v[i];
    sup = std::max(sup, euclidean_norm(diff));
  }
  return sup;
}

void decay_verdict(DecayReport& r, double tol) {
  std::vector<double> n(r.ladder.begin(), r.ladder.end());
  r.excluded.assign(r.error.size(), false);
  r.slope = loglog_slope(n, r.error);
  bool tiny = true;
  for (double e : r.error) tiny = tiny && e <= tol;
  if (tiny || r.error.size() < 2) {
    r.pass = tiny;
    return;
  }
  std::size_t down = 0;
  for (std::size_t k = 1; k < r.error.size(); ++k) down += r.error[k] <= r.error[k - 1];
  r.pass = r.error.back() < r.error.front() && 4 * down >= 3 * (r.error.size() - 1);
}

}  // namespace

double loglog_slope(std::span<const double> x, std::span<const double> y, const std::vector<bool>& keep) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!keep.empty() && !keep[i]) continue;
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
    const double a = std::log(x[i]), b = std::log(y[i]);
    sx += a;
    sy += b;
    sxx += a * a;
    sxy += a * b;
    ++n;
  }
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  const double den = static_cast<double>(n) * sxx - sx * sx;
  if (den == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (static_cast<double>(n) * sxy - sx * sy) / den;
}

SkewPoint phi1(double t, const FieldDescriptor& g, std::span<const double> x0, const StepPolicy& policy) {
  if (t == 0.0) return {{g}, {x0.begin(), x0.end()}, {}};
  const Trajectory tr = integrate(g, x0, 0.0, t, policy);
  require_complete(tr, "phi1");
  return {{translate(g, t)}, final_of(tr.x, tr.dim), {}};
}

SkewPoint phi2(double t, const FieldDescriptor& g, const FieldDescriptor& G, const FieldDescriptor& k,
               std::span<const double> x0, std::span<const double> y0, const StepPolicy& policy) {
  if (t == 0.0) return {{g, G, k}, {x0.begin(), x0.end()}, {y0.begin(), y0.end()}};
  const Trajectory tr = integrate_triangular(g, G, k, x0, y0, 0.0, t, policy);
  require_complete(tr, "phi2");
  return {{translate(g, t), translate(G, t), translate(k, t)}, final_of(tr.x, tr.dim), final_of(tr.y, tr.y_dim)};
}

DecayReport continuity_experiment(std::span<const FieldDescriptor> seq, const FieldDescriptor& limit,
                                  std::span<const std::vector<double>> x0_seq, std::span<const double> x0, double t0,
                                  double t1, const StepPolicy& policy, double tol) {
  if (seq.size() != x0_seq.size()) throw DimensionError("continuity_experiment: one initial state per field");
  const Trajectory ref = integrate(limit, x0, t0, t1, policy);
  if (!ref.complete()) throw RangeError("continuity_experiment: the limit problem blows up inside the span");
  DecayReport r;
  r.parameter = "n";
  r.ladder.resize(seq.size());
  r.error.resize(seq.size());
  const std::ptrdiff_t count = static_cast<std::ptrdiff_t>(seq.size());
  detail::parallel_for(count, [&](std::ptrdiff_t n) {
    const Trajectory tr = integrate(seq[n], x0_seq[n], t0, t1, policy);
    r.ladder[n] = static_cast<double>(n + 1);
    r.error[n] = tr.complete() ? sup_gap(tr, ref, false) : std::numeric_limits<double>::infinity();
  });
  decay_verdict(r, tol);
  return r;
}

DecayReport triangular_continuity_experiment(std::span<const TriangularSystem> seq, const TriangularSystem& limit,
                                             std::span<const std::vector<double>> x0_seq,
                                             std::span<const std::vector<double>> y0_seq, std::span<const double> x0,
                                             std::span<const double> y0, double t0, double t1,
                                             const StepPolicy& policy, double tol) {
  if (seq.size() != x0_seq.size() || seq.size() != y0_seq.size())
    throw DimensionError("triangular_continuity_experiment: one initial pair per system");
  const Trajectory ref = integrate_triangular(limit.f, limit.F, limit.k, x0, y0, t0, t1, policy);
  if (!ref.complete()) throw RangeError("triangular_continuity_experiment: the limit problem blows up inside the span");
  DecayReport r;
  r.parameter = "n";
  r.ladder.resize(seq.size());
  r.error.resize(seq.size());
  const std::ptrdiff_t count = static_cast<std::ptrdiff_t>(seq.size());
  detail::parallel_for(count, [&](std::ptrdiff_t n) {
    const auto& s = seq[n];
    const Trajectory tr = integrate_triangular(s.f, s.F, s.k, x0_seq[n], y0_seq[n], t0, t1, policy);
    r.ladder[n] = static_cast<double>(n + 1);
    r.error[n] = tr.complete() ? std::max(sup_gap(tr, ref, false), sup_gap(tr, ref, true))
                               : std::numeric_limits<double>::infinity();
  });
  decay_verdict(r, tol);
  return r;
}

std::vector<double> default_eps_ladder() { return {1e-1, 3e-2, 1e-2, 3e-3, 1e-3}; }

DecayReport linearized_check(const FieldDescriptor& f, const FieldDescriptor& jacobian, std::span<const double> x0,
                             std::span<const double> y0, double t0, double t1, std::span<const double> eps_ladder,
                             const StepPolicy& policy, double tol) {
  if (euclidean_norm(y0) > 1.0 + 1e-12) throw RangeError("linearized_check: |y0| must be <= 1");
  for (std::size_t i = 1; i < eps_ladder.size(); ++i)
    if (!(eps_ladder[i] < eps_ladder[i - 1])) throw RangeError("linearized_check: ladder must decrease strictly");
  const Trajectory base = integrate_variational(f, jacobian, x0, y0, t0, t1, policy);
  if (!base.complete()) throw MaximalIntervalError("linearized_check: base solution blows up", base.exit_time.value_or(t1));
  const std::size_t n = x0.size();

  DecayReport r;
  r.parameter = "eps";
  r.ladder.assign(eps_ladder.begin(), eps_ladder.end());
  r.error.resize(eps_ladder.size());
  const std::ptrdiff_t count = static_cast<std::ptrdiff_t>(eps_ladder.size());
  detail::parallel_for(count, [&](std::ptrdiff_t e) {
    const double eps = eps_ladder[e];
    std::vector<double> xe(n);
    for (std::size_t i = 0; i < n; ++i) xe[i] = x0[i] + eps * y0[i];
    const Trajectory pert = integrate(f, xe, t0, t1, policy);
    double err = std::numeric_limits<double>::infinity();
    if (pert.complete() && pert.size() == base.size()) {
      err = 0.0;
      std::vector<double> d(n);
      for (std::size_t k = 0; k < base.size(); ++k) {
        for (std::size_t i = 0; i < n; ++i) d[i] = (pert.x_at(k)[i] - base.x_at(k)[i]) / eps - base.y_at(k)[i];
        err = std::max(err, euclidean_norm(d));
      }
    }
    r.error[e] = err;
  });
  r.excluded.resize(r.error.size());
  std::vector<bool> keep(r.error.size());
  std::size_t kept = 0;
  bool small = true;
  for (std::size_t i = 0; i < r.error.size(); ++i) {
    const double floor = 10.0 * policy.noise_tolerance / r.ladder[i];
    r.excluded[i] = r.error[i] <= floor;
    keep[i] = !r.excluded[i];
    kept += keep[i];
    small = small && r.error[i] <= std::max(tol, floor);
  }
  r.slope = loglog_slope(r.ladder, r.error, keep);
  r.pass = small || (kept >= 2 && r.slope >= 0.9);
  return r;
}

std::vector<HullFiber> hull_linearized_flow(const FieldDescriptor& f, const FieldDescriptor& jacobian,
                                            std::span<const double> taus, double t, std::span<const double> x0,
                                            std::span<const double> y0, const StepPolicy& policy) {
  std::vector<HullFiber> rows(taus.size());
  const std::ptrdiff_t count = static_cast<std::ptrdiff_t>(taus.size());
  detail::parallel_for(count, [&](std::ptrdiff_t i) {
    const FieldDescriptor g = translate(f, taus[i]);
    const FieldDescriptor G = translate(jacobian, taus[i]);
    const Trajectory tr = integrate_variational(g, G, x0, y0, 0.0, t, policy);
    require_complete(tr, "hull_linearized_flow");
    rows[i] = {taus[i], final_of(tr.x, tr.dim), final_of(tr.y, tr.y_dim)};
  });
  return rows;
}

}  // namespace carath

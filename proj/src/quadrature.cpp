#include "carath/quadrature.hpp"

#include <cmath>
#include <vector>

#include "segment_poly.hpp"
#include "small_buffer.hpp"
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/toms748_solve.hpp>

namespace carath {

using Scratch = detail::SmallBuffer;

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 15>;

// One Kronrod pass. Boost reports the error of the rule on [-1, 1], unscaled.
double kronrod(const std::function<double(double)>& phi, double lo, double hi, double& err) {
  const double est = GK::integrate(phi, lo, hi, 0, 0.0, &err);
  err *= 0.5 * (hi - lo);
  return est;
}

// Bisect until the Kronrod error is within an absolute target.
double adapt(const std::function<double(double)>& phi, double lo, double hi, double target, int depth) {
  double err = 0.0;
  const double est = kronrod(phi, lo, hi, err);
  if (err <= target || depth == 0) return est;
  const double mid = 0.5 * (lo + hi);
  return adapt(phi, lo, mid, 0.5 * target, depth - 1) + adapt(phi, mid, hi, 0.5 * target, depth - 1);
}

}  // namespace

double integrate_split(const std::function<double(double)>& phi, double a, double b, std::span<const double> breaks) {
  if (!(b > a)) return 0.0;
  std::vector<double> edges{a};
  for (double t : breaks)
    if (t > edges.back() && t < b) edges.push_back(t);
  edges.push_back(b);
  // Relative to the whole interval, so tiny pieces next to a root do not chase round-off.
  double scale = 0.0;
  std::vector<double> first(edges.size() - 1);
  std::vector<double> first_err(edges.size() - 1);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    first[i] = kronrod(phi, edges[i], edges[i + 1], first_err[i]);
    scale += std::abs(first[i]);
  }
  const double rel = 1e-11 * scale / (b - a);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double target = rel * (edges[i + 1] - edges[i]);
    if (first_err[i] <= target) {
      total += first[i];
      continue;
    }
    const double mid = 0.5 * (edges[i] + edges[i + 1]);
    total += adapt(phi, edges[i], mid, 0.5 * target, 11) + adapt(phi, mid, edges[i + 1], 0.5 * target, 11);
  }
  return total;
}

double pow_p(double v, double p) {
  v = std::abs(v);
  if (p == 1.0) return v;
  if (p == 2.0) return v * v;
  return std::pow(v, p);
}

double segment_lp_cost(const FieldDescriptor& f, double p, double t0, double t1, std::span<const double> xa,
                       std::span<const double> xb) {
  if (t1 <= t0) return 0.0;
  // Exact along the segment when every node is piecewise polynomial.
  if (auto q = detail::along_segment(*f.expr(), t0, t1, xa, xb)) return detail::abs_power_integral(*q, p);
  std::vector<double> breaks;
  segment_breakpoints(f, t0, t1, xa, xb, breaks);
  const std::size_t n = f.dim_in();
  const double inv = 1.0 / (t1 - t0);
  Scratch x(n), v(f.dim_out());
  const Shape shape = f.shape();
  auto value = [&](double t) {
    const double lambda = (t - t0) * inv;
    for (std::size_t i = 0; i < n; ++i) x[i] = xa[i] + (xb[i] - xa[i]) * lambda;
    f.evaluate_into(t, x, v);
  };
  auto phi = [&](double t) {
    value(t);
    return pow_p(value_norm(v, shape), p);
  };
  if (f.dim_out() != 1) return integrate_split(phi, t0, t1, breaks);

  // Scalar: split at sampled sign changes as well, so GK never sees the |.| kink.
  auto signed_value = [&](double t) {
    value(t);
    return v[0];
  };
  constexpr int samples = 8;
  std::vector<double> cuts;
  double lo = t0;
  breaks.push_back(t1);
  for (double hi : breaks) {
    double prev_t = lo, prev = signed_value(lo);
    for (int i = 1; i <= samples; ++i) {
      const double t = i == samples ? hi : lo + (hi - lo) * i / samples;
      const double cur = signed_value(i == samples ? std::nextafter(hi, lo) : t);
      if (prev != 0.0 && cur != 0.0 && (prev < 0.0) != (cur < 0.0)) {
        boost::uintmax_t iters = 100;
        auto [a, b] = boost::math::tools::toms748_solve(signed_value, prev_t, t, prev, cur,
                                                        boost::math::tools::eps_tolerance<double>(50), iters);
        const double r = 0.5 * (a + b);
        if (r > lo && r < hi) cuts.push_back(r);
      }
      prev_t = t;
      prev = cur;
    }
    if (hi < t1) cuts.push_back(hi);
    lo = hi;
  }
  return integrate_split(phi, t0, t1, cuts);
}

void midpoint_slice(const FieldDescriptor& f, double t0, double t1, std::span<const double> x, int m,
                    std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  if (t0 == t1) return;
  const double sign = t1 < t0 ? -1.0 : 1.0;
  const double lo = std::min(t0, t1), hi = std::max(t0, t1);
  std::vector<double> cuts;
  segment_breakpoints(f, lo, hi, x, x, cuts);
  cuts.push_back(hi);
  Scratch v(out.size());
  double a = lo;
  for (double b : cuts) {
    const double h = (b - a) / m;
    for (int i = 0; i < m; ++i) {
      f.evaluate_into(a + (i + 0.5) * h, x, v);
      for (std::size_t k = 0; k < out.size(); ++k) out[k] += h * v[k];
    }
    a = b;
  }
  for (double& o : out) o *= sign;
}

}  // namespace carath

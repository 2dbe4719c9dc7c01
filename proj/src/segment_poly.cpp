#include "segment_poly.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/tools/toms748_solve.hpp>

#include "carath/quadrature.hpp"

namespace carath::detail {
namespace {

using Coeffs = std::vector<double>;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

double horner(const Coeffs& c, double s) {
  double v = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * s + *it;
  return v;
}

// P(s + d)
Coeffs taylor_shift(Coeffs c, double d) {
  if (d == 0.0) return c;
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(c.size());
  for (std::ptrdiff_t i = 0; i < n; ++i)
    for (std::ptrdiff_t j = n - 2; j >= i; --j) c[j] += d * c[j + 1];
  return c;
}

// P(a + s u)
Coeffs compose_linear(const Coeffs& c, double a, double s) {
  Coeffs out = taylor_shift(c, a);
  double f = 1.0;
  for (double& v : out) {
    v *= f;
    f *= s;
  }
  return out;
}

Coeffs add(const Coeffs& a, const Coeffs& b) {
  Coeffs out(std::max(a.size(), b.size()), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) out[i] += b[i];
  return out;
}

Coeffs mul(const Coeffs& a, const Coeffs& b) {
  if (a.empty() || b.empty()) return {};
  Coeffs out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

Coeffs derivative(const Coeffs& c) {
  Coeffs out;
  for (std::size_t i = 1; i < c.size(); ++i) out.push_back(static_cast<double>(i) * c[i]);
  return out;
}

void trim(Coeffs& c) {
  while (!c.empty() && c.back() == 0.0) c.pop_back();
}

// int_0^L P
double integral(const Coeffs& c, double a, double b) {
  double fa = 0.0, fb = 0.0;
  for (std::size_t i = c.size(); i-- > 0;) {
    const double k = c[i] / static_cast<double>(i + 1);
    fa = (fa + k) * a;
    fb = (fb + k) * b;
  }
  return fb - fa;
}

// Sign changes of P in (a, b), ascending. Between consecutive critical points
// P is monotone, so each bracket holds at most one root.
void sign_changes(Coeffs c, double a, double b, std::vector<double>& out) {
  trim(c);
  if (c.size() <= 1) return;
  if (c.size() == 2) {
    const double r = -c[0] / c[1];
    if (r > a && r < b) out.push_back(r);
    return;
  }
  std::vector<double> pts{a};
  sign_changes(derivative(c), a, b, pts);
  pts.push_back(b);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double l = pts[i], r = pts[i + 1];
    const double fl = horner(c, l), fr = horner(c, r);
    if (fl == 0.0 || fr == 0.0 || (fl < 0.0) == (fr < 0.0)) continue;
    boost::uintmax_t iters = 200;
    auto [lo, hi] = boost::math::tools::toms748_solve([&](double s) { return horner(c, s); }, l, r, fl, fr,
                                                      boost::math::tools::eps_tolerance<double>(52), iters);
    out.push_back(0.5 * (lo + hi));
  }
}

SegmentPoly single(double t0, double t1, Coeffs c) { return {{t0, t1, std::move(c)}}; }

template <class Op>
SegmentPoly merge(const SegmentPoly& A, const SegmentPoly& B, Op op) {
  SegmentPoly out;
  std::size_t i = 0, j = 0;
  while (i < A.size() && j < B.size()) {
    const double lo = std::max(A[i].lo, B[j].lo), hi = std::min(A[i].hi, B[j].hi);
    if (hi > lo || (A.size() == 1 && B.size() == 1))
      out.push_back({lo, hi, op(taylor_shift(A[i].c, lo - A[i].lo), taylor_shift(B[j].c, lo - B[j].lo))});
    if (A[i].hi < B[j].hi)
      ++i;
    else if (B[j].hi < A[i].hi)
      ++j;
    else {
      ++i;
      ++j;
    }
  }
  return out;
}

std::optional<SegmentPoly> from_scalar_function(const ScalarFunction& g, double t0, double t1, double u0,
                                                double sigma) {
  if (!g.is_piecewise_polynomial()) return std::nullopt;
  if (sigma == 0.0 || t1 == t0) return single(t0, t1, {g(u0)});
  const double u1 = u0 + sigma * (t1 - t0);
  SegmentPoly out;
  for (const auto& piece : g.pieces(std::min(u0, u1), std::max(u0, u1))) {
    double a = t0 + (piece.lo - u0) / sigma, b = t0 + (piece.hi - u0) / sigma;
    if (sigma < 0.0) std::swap(a, b);
    a = std::max(a, t0);
    b = std::min(b, t1);
    if (!(b > a)) continue;
    const double u_at_a = u0 + sigma * (a - t0);
    Coeffs c(piece.c.begin(), piece.c.end());
    out.push_back({a, b, compose_linear(c, u_at_a - piece.origin, sigma)});
  }
  if (out.empty()) return single(t0, t1, {g(u0)});
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.lo < y.lo; });
  out.front().lo = t0;
  out.back().hi = t1;
  // Joins computed from the two neighbouring pieces may differ in the last bit.
  for (std::size_t i = 1; i < out.size(); ++i) out[i].lo = out[i - 1].hi;
  return out;
}

std::optional<SegmentPoly> walk(const ExprNode& e, double t0, double t1, std::span<const double> xa,
                                std::span<const double> xb) {
  if (e.shape.size() != 1) return std::nullopt;
  const double len = t1 - t0;
  auto velocity = [&](std::size_t i) { return len == 0.0 ? 0.0 : (xb[i] - xa[i]) / len; };
  return std::visit(
      overloaded{
          [&](const node::Constant& c) -> std::optional<SegmentPoly> { return single(t0, t1, {c.values[0]}); },
          [&](const node::LinearInX& l) -> std::optional<SegmentPoly> {
            double v0 = 0.0, v1 = 0.0;
            for (std::size_t i = 0; i < l.a.size(); ++i) {
              v0 += l.a[i] * xa[i];
              v1 += l.a[i] * velocity(i);
            }
            return single(t0, t1, {v0, v1});
          },
          [&](const node::TimeFunction& f) { return from_scalar_function(f.g, t0, t1, t0, 1.0); },
          [&](const node::ShiftCompose& s) {
            double u0 = t0, sigma = 1.0;
            for (std::size_t i = 0; i < s.a.size(); ++i) {
              u0 += s.a[i] * xa[i];
              sigma += s.a[i] * velocity(i);
            }
            return from_scalar_function(s.g, t0, t1, u0, sigma);
          },
          [&](const node::Sum& s) -> std::optional<SegmentPoly> {
            std::optional<SegmentPoly> acc;
            for (const auto& term : s.terms) {
              auto q = walk(*term, t0, t1, xa, xb);
              if (!q) return std::nullopt;
              acc = acc ? merge(*acc, *q, add) : std::move(q);
            }
            return acc;
          },
          [&](const node::ScalarScale& s) -> std::optional<SegmentPoly> {
            auto q = walk(*s.e, t0, t1, xa, xb);
            if (q)
              for (auto& piece : *q)
                for (double& v : piece.c) v *= s.c;
            return q;
          },
          [&](const node::Product& p) -> std::optional<SegmentPoly> {
            auto a = walk(*p.s, t0, t1, xa, xb);
            if (!a) return std::nullopt;
            auto b = walk(*p.e, t0, t1, xa, xb);
            if (!b) return std::nullopt;
            return merge(*a, *b, mul);
          },
          [&](const node::Translate& tr) -> std::optional<SegmentPoly> {
            auto q = walk(*tr.e, t0 + tr.tau, t1 + tr.tau, xa, xb);
            if (!q) return std::nullopt;
            for (auto& piece : *q) {
              piece.lo -= tr.tau;
              piece.hi -= tr.tau;
            }
            q->front().lo = t0;
            q->back().hi = t1;
            for (std::size_t i = 1; i < q->size(); ++i) (*q)[i].lo = (*q)[i - 1].hi;
            return q;
          },
          [&](const auto&) -> std::optional<SegmentPoly> { return std::nullopt; },
      },
      e.data);
}

}  // namespace

std::optional<SegmentPoly> along_segment(const ExprNode& e, double t0, double t1, std::span<const double> xa,
                                         std::span<const double> xb) {
  return walk(e, t0, t1, xa, xb);
}

double abs_power_integral(const SegmentPoly& q, double p) {
  double total = 0.0;
  std::vector<double> cuts;
  for (const auto& piece : q) {
    const double L = piece.hi - piece.lo;
    if (!(L > 0.0)) continue;
    Coeffs c = piece.c;
    trim(c);
    if (c.empty()) continue;
    if (p == 2.0) {
      total += integral(mul(c, c), 0.0, L);
      continue;
    }
    cuts.assign(1, 0.0);
    sign_changes(c, 0.0, L, cuts);
    cuts.push_back(L);
    if (p == 1.0) {
      for (std::size_t i = 0; i + 1 < cuts.size(); ++i) total += std::abs(integral(c, cuts[i], cuts[i + 1]));
    } else {
      const std::span<const double> inner(cuts.data() + 1, cuts.size() - 2);
      total += integrate_split([&](double s) { return pow_p(horner(c, s), p); }, 0.0, L, inner);
    }
  }
  return total;
}

}  // namespace carath::detail

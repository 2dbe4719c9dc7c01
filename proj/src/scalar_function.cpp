#include "carath/scalar_function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/tools/roots.hpp>

#include "carath/errors.hpp"

namespace carath {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Coeffs = std::array<double, 4>;

double poly_value(const Coeffs& c, double s) { return c[0] + s * (c[1] + s * (c[2] + s * c[3])); }

double poly_antiderivative(const Coeffs& c, double s) {
  return s * (c[0] + s * (c[1] / 2.0 + s * (c[2] / 3.0 + s * c[3] / 4.0)));
}

int poly_degree(const Coeffs& c) {
  for (int d = 3; d > 0; --d)
    if (c[d] != 0.0) return d;
  return 0;
}

// Coefficients of p(s + d) as a polynomial in s.
Coeffs recenter(const Coeffs& c, double d) {
  return {c[0] + d * (c[1] + d * (c[2] + d * c[3])), c[1] + d * (2.0 * c[2] + 3.0 * d * c[3]), c[2] + 3.0 * d * c[3],
          c[3]};
}

// Roots of p strictly inside (s0, s1), ascending.
std::vector<double> roots_inside(const Coeffs& c, double s0, double s1) {
  std::vector<double> roots;
  const int deg = poly_degree(c);
  auto keep = [&](double r) {
    if (r > s0 && r < s1) roots.push_back(r);
  };
  if (deg == 1) {
    keep(-c[0] / c[1]);
  } else if (deg == 2) {
    const double disc = c[1] * c[1] - 4.0 * c[2] * c[0];
    if (disc >= 0.0) {
      const double q = -0.5 * (c[1] + std::copysign(std::sqrt(disc), c[1]));
      if (q != 0.0) keep(c[0] / q);
      keep(q / c[2]);
    }
  } else if (deg == 3) {
    // Split at critical points, then bracket each monotone segment.
    Coeffs dc{c[1], 2.0 * c[2], 3.0 * c[3], 0.0};
    std::vector<double> cuts{s0};
    for (double r : roots_inside(dc, s0, s1)) cuts.push_back(r);
    cuts.push_back(s1);
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double a = cuts[i], b = cuts[i + 1];
      const double fa = poly_value(c, a), fb = poly_value(c, b);
      if (fa == 0.0) {
        keep(a);
        continue;
      }
      if ((fa < 0.0) == (fb < 0.0) || fb == 0.0) continue;
      boost::uintmax_t iters = 200;
      auto [lo, hi] = boost::math::tools::toms748_solve([&](double s) { return poly_value(c, s); }, a, b, fa, fb,
                                                        boost::math::tools::eps_tolerance<double>(52), iters);
      keep(0.5 * (lo + hi));
    }
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
  return roots;
}

// One block [4n, 4n+4) of the ramp wave or of its antiderivative.
std::array<PolyPiece, 5> ramp_block(long n, bool antiderivative) {
  const double k = static_cast<double>(n + 1);
  const double w = 1.0 / k;
  const double b = 4.0 * static_cast<double>(n);
  const double e1 = b + w, e2 = b + 2.0 - w, e3 = b + 2.0 + w, e4 = b + 4.0 - w, e5 = b + 4.0;
  if (!antiderivative) {
    return {PolyPiece{b, e1, b, {0.0, k, 0.0, 0.0}}, PolyPiece{e1, e2, e1, {1.0, 0.0, 0.0, 0.0}},
            PolyPiece{e2, e3, e2, {1.0, -k, 0.0, 0.0}}, PolyPiece{e3, e4, e3, {-1.0, 0.0, 0.0, 0.0}},
            PolyPiece{e4, e5, e4, {-1.0, k, 0.0, 0.0}}};
  }
  const double top = 2.0 - 1.5 * w;
  return {PolyPiece{b, e1, b, {0.0, 0.0, k / 2.0, 0.0}}, PolyPiece{e1, e2, e1, {w / 2.0, 1.0, 0.0, 0.0}},
          PolyPiece{e2, e3, e2, {top, 1.0, -k / 2.0, 0.0}}, PolyPiece{e3, e4, e3, {top, -1.0, 0.0, 0.0}},
          PolyPiece{e4, e5, e4, {w / 2.0, -1.0, k / 2.0, 0.0}}};
}

std::array<PolyPiece, 2> step_block(long n, bool antiderivative) {
  const double b = 4.0 * static_cast<double>(n);
  if (!antiderivative)
    return {PolyPiece{b, b + 2.0, b, {1.0, 0.0, 0.0, 0.0}}, PolyPiece{b + 2.0, b + 4.0, b + 2.0, {-1.0, 0.0, 0.0, 0.0}}};
  return {PolyPiece{b, b + 2.0, b, {0.0, 1.0, 0.0, 0.0}}, PolyPiece{b + 2.0, b + 4.0, b + 2.0, {2.0, -1.0, 0.0, 0.0}}};
}

long block_index(double t) { return static_cast<long>(std::floor(t / 4.0)); }

void clip_into(const PolyPiece& p, double lo, double hi, std::vector<PolyPiece>& out) {
  PolyPiece q = p;
  q.lo = std::max(p.lo, lo);
  q.hi = std::min(p.hi, hi);
  if (q.lo < q.hi) out.push_back(q);
}

}  // namespace

double PolyPiece::integral() const {
  return poly_antiderivative(c, hi - origin) - poly_antiderivative(c, lo - origin);
}

double PolyPiece::max_abs() const {
  const double s0 = lo - origin, s1 = hi - origin;
  double m = std::max(std::abs(poly_value(c, s0)), std::abs(poly_value(c, s1)));
  for (double r : roots_inside({c[1], 2.0 * c[2], 3.0 * c[3], 0.0}, s0, s1)) m = std::max(m, std::abs(poly_value(c, r)));
  return m;
}

PolyPiece PolyPiece::derivative() const { return {lo, hi, origin, {c[1], 2.0 * c[2], 3.0 * c[3], 0.0}}; }

ScalarFunction ScalarFunction::piecewise(std::vector<double> breaks, std::vector<Coeffs> coeffs) {
  if (coeffs.size() != breaks.size() + 1)
    throw DimensionError("piecewise: need one coefficient set per piece (breaks + 1)");
  if (!std::is_sorted(breaks.begin(), breaks.end()) ||
      std::adjacent_find(breaks.begin(), breaks.end()) != breaks.end())
    throw DimensionError("piecewise: breakpoints must be strictly increasing");
  for (double b : breaks)
    if (!std::isfinite(b)) throw DimensionError("piecewise: breakpoints must be finite");
  ScalarFunction f;
  f.kind_ = Kind::piecewise;
  f.breaks_ = std::move(breaks);
  f.coeffs_ = std::move(coeffs);
  return f;
}

ScalarFunction ScalarFunction::polynomial(Coeffs coeffs) { return piecewise({}, {coeffs}); }

ScalarFunction ScalarFunction::ramp_wave() {
  ScalarFunction f;
  f.kind_ = Kind::ramp_wave;
  return f;
}

ScalarFunction ScalarFunction::step_wave() {
  ScalarFunction f;
  f.kind_ = Kind::step_wave;
  return f;
}

ScalarFunction ScalarFunction::ramp_integral() {
  ScalarFunction f;
  f.kind_ = Kind::ramp_integral;
  return f;
}

ScalarFunction ScalarFunction::step_integral() {
  ScalarFunction f;
  f.kind_ = Kind::step_integral;
  return f;
}

ScalarFunction ScalarFunction::sinusoid(double amplitude, double omega, double phase) {
  ScalarFunction f;
  f.kind_ = Kind::sinusoid;
  f.amplitude_ = amplitude;
  f.omega_ = omega;
  f.phase_ = phase;
  return f;
}

PolyPiece ScalarFunction::table_piece(std::size_t i) const {
  const std::size_t k = breaks_.size();
  if (k == 0) return {-kInf, kInf, 0.0, coeffs_[0]};
  const double lo = i == 0 ? -kInf : breaks_[i - 1];
  const double hi = i == k ? kInf : breaks_[i];
  const double origin = i == 0 ? breaks_[0] : breaks_[i - 1];
  return {lo, hi, origin, coeffs_[i]};
}

PolyPiece ScalarFunction::piece_at(double t) const {
  switch (kind_) {
    case Kind::piecewise: {
      const auto i = static_cast<std::size_t>(std::upper_bound(breaks_.begin(), breaks_.end(), t) - breaks_.begin());
      return table_piece(i);
    }
    case Kind::ramp_wave:
    case Kind::ramp_integral: {
      if (t < 0.0) return {-kInf, 0.0, 0.0, {}};
      const auto block = ramp_block(block_index(t), kind_ == Kind::ramp_integral);
      for (std::size_t i = block.size(); i-- > 0;)
        if (block[i].lo <= t && block[i].lo < block[i].hi) return block[i];
      return block[0];
    }
    case Kind::step_wave:
    case Kind::step_integral: {
      const auto block = step_block(block_index(t), kind_ == Kind::step_integral);
      return t < block[1].lo ? block[0] : block[1];
    }
    case Kind::sinusoid:
      break;
  }
  throw UnsupportedError("sinusoid has no polynomial pieces");
}

double ScalarFunction::operator()(double t) const {
  if (kind_ == Kind::sinusoid) return amplitude_ * std::sin(omega_ * t + phase_);
  return piece_at(t).value(t);
}

std::vector<PolyPiece> ScalarFunction::pieces(double lo, double hi) const {
  if (kind_ == Kind::sinusoid) throw UnsupportedError("sinusoid has no polynomial pieces");
  if (hi < lo) std::swap(lo, hi);
  std::vector<PolyPiece> out;
  if (lo == hi) {
    PolyPiece p = piece_at(lo);
    p.lo = p.hi = lo;
    out.push_back(p);
    return out;
  }
  switch (kind_) {
    case Kind::piecewise: {
      const auto first =
          static_cast<std::size_t>(std::upper_bound(breaks_.begin(), breaks_.end(), lo) - breaks_.begin());
      for (std::size_t i = first; i <= breaks_.size(); ++i) {
        const PolyPiece p = table_piece(i);
        if (p.lo >= hi) break;
        clip_into(p, lo, hi, out);
      }
      break;
    }
    case Kind::ramp_wave:
    case Kind::ramp_integral: {
      if (lo < 0.0) clip_into({-kInf, 0.0, 0.0, {}}, lo, hi, out);
      if (hi > 0.0) {
        for (long n = std::max(0L, block_index(lo)); n <= block_index(hi); ++n)
          for (const auto& p : ramp_block(n, kind_ == Kind::ramp_integral)) clip_into(p, lo, hi, out);
      }
      break;
    }
    case Kind::step_wave:
    case Kind::step_integral: {
      for (long n = block_index(lo); n <= block_index(hi); ++n)
        for (const auto& p : step_block(n, kind_ == Kind::step_integral)) clip_into(p, lo, hi, out);
      break;
    }
    case Kind::sinusoid:
      break;
  }
  return out;
}

void ScalarFunction::breakpoints(double lo, double hi, std::vector<double>& out) const {
  if (kind_ == Kind::sinusoid) return;
  if (hi < lo) std::swap(lo, hi);
  if (kind_ == Kind::piecewise) {
    auto it = std::upper_bound(breaks_.begin(), breaks_.end(), lo);
    for (; it != breaks_.end() && *it < hi; ++it) out.push_back(*it);
    return;
  }
  for (const auto& p : pieces(lo, hi))
    if (p.lo > lo && p.lo < hi) out.push_back(p.lo);
}

double ScalarFunction::integral(double a, double b) const {
  if (kind_ == Kind::sinusoid) {
    if (omega_ == 0.0) return amplitude_ * std::sin(phase_) * (b - a);
    return -amplitude_ / omega_ * (std::cos(omega_ * b + phase_) - std::cos(omega_ * a + phase_));
  }
  const double sign = b < a ? -1.0 : 1.0;
  double total = 0.0;
  for (const auto& p : pieces(a, b)) total += p.integral();
  return sign * total;
}

double ScalarFunction::max_abs(double a, double b) const {
  if (b < a) std::swap(a, b);
  if (kind_ == Kind::sinusoid) {
    const double amp = std::abs(amplitude_);
    if (omega_ == 0.0) return std::abs(amplitude_ * std::sin(phase_));
    double u0 = omega_ * a + phase_, u1 = omega_ * b + phase_;
    if (u1 < u0) std::swap(u0, u1);
    if (u1 - u0 >= std::numbers::pi) return amp;
    const double crest = std::numbers::pi / 2.0 + std::ceil((u0 - std::numbers::pi / 2.0) / std::numbers::pi) * std::numbers::pi;
    if (crest <= u1) return amp;
    return std::max(std::abs(amplitude_ * std::sin(u0)), std::abs(amplitude_ * std::sin(u1)));
  }
  double m = 0.0;
  for (const auto& p : pieces(a, b)) m = std::max(m, p.max_abs());
  return m;
}

std::optional<ScalarFunction> ScalarFunction::derivative() const {
  switch (kind_) {
    case Kind::piecewise: {
      for (std::size_t i = 0; i < breaks_.size(); ++i) {
        const double b = breaks_[i];
        const double left = table_piece(i).value(b), right = table_piece(i + 1).value(b);
        if (std::abs(left - right) > 1e-12 * std::max(1.0, std::abs(left))) return std::nullopt;
      }
      std::vector<Coeffs> d;
      d.reserve(coeffs_.size());
      for (const auto& c : coeffs_) d.push_back({c[1], 2.0 * c[2], 3.0 * c[3], 0.0});
      return piecewise(breaks_, std::move(d));
    }
    case Kind::ramp_integral:
      return ramp_wave();
    case Kind::step_integral:
      return step_wave();
    case Kind::sinusoid:
      return sinusoid(amplitude_ * omega_, omega_, phase_ + std::numbers::pi / 2.0);
    case Kind::ramp_wave:
    case Kind::step_wave:
      return std::nullopt;
  }
  return std::nullopt;
}

double l1_distance(const ScalarFunction& a, double shift_a, const ScalarFunction& b, double shift_b, Interval over) {
  if (!a.is_piecewise_polynomial() || !b.is_piecewise_polynomial())
    throw UnsupportedError("l1_distance needs piecewise-polynomial functions");
  auto shifted = [&](const ScalarFunction& g, double shift) {
    auto ps = g.pieces(over.lo + shift, over.hi + shift);
    for (auto& p : ps) {
      p.lo -= shift;
      p.hi -= shift;
      p.origin -= shift;
    }
    return ps;
  };
  const auto pa = shifted(a, shift_a);
  const auto pb = shifted(b, shift_b);

  std::vector<double> cuts{over.lo, over.hi};
  for (const auto& p : pa) cuts.push_back(p.lo);
  for (const auto& p : pb) cuts.push_back(p.lo);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::size_t ia = 0, ib = 0;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i], hi = cuts[i + 1];
    if (lo < over.lo || hi > over.hi) continue;
    const double mid = 0.5 * (lo + hi);
    while (ia + 1 < pa.size() && pa[ia].hi <= mid) ++ia;
    while (ib + 1 < pb.size() && pb[ib].hi <= mid) ++ib;
    const Coeffs ca = recenter(pa[ia].c, lo - pa[ia].origin);
    const Coeffs cb = recenter(pb[ib].c, lo - pb[ib].origin);
    const Coeffs diff{ca[0] - cb[0], ca[1] - cb[1], ca[2] - cb[2], ca[3] - cb[3]};
    double s_prev = 0.0;
    auto roots = roots_inside(diff, 0.0, hi - lo);
    roots.push_back(hi - lo);
    for (double s : roots) {
      total += std::abs(poly_antiderivative(diff, s) - poly_antiderivative(diff, s_prev));
      s_prev = s;
    }
  }
  return total;
}

}  // namespace carath

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "carath/field.hpp"
#include "carath/solver.hpp"

namespace carath {

/// Nonnegative function of t sampled on a uniform grid over `window`
/// (steps + 1 samples). Integrals use the piecewise-linear interpolant of
/// value^p, i.e. the composite trapezoid rule on grid-aligned intervals.
struct SampledBound {
  Interval window;
  std::size_t steps = 0;
  std::vector<double> values;
  double p = 1.0;
  double radius = 0.0;

  double dt() const { return window.length() / static_cast<double>(steps); }
  double t_at(std::size_t k) const { return window.lo + static_cast<double>(k) * dt(); }
};

struct BoundGrid {
  std::size_t t_steps = 1024;
  /// Cells per axis of the state lattice on [-r, r]; doubling it refines the lattice.
  std::size_t x_cells = 64;
  /// Random pairs per time sample for sampled Lipschitz quotients.
  std::size_t pair_samples = 64;
  std::uint64_t seed = 0;
};

/// values[k] = sup_{|x| <= radius} |f(t_k, x)|: exact for structured
/// primitives, a lattice maximum (lower bound) otherwise.
SampledBound optimal_m_bound(const FieldDescriptor& f, double radius, Interval window, const BoundGrid& grid = {});

/// values[k] = sup over x != y in the ball of |f(t_k,x) - f(t_k,y)| / |x - y|.
/// Requires an LC claim (UnsupportedError otherwise).
SampledBound optimal_l_bound(const FieldDescriptor& f, double radius, Interval window, const BoundGrid& grid = {});

/// Exact sup of |f(t, .)| over the ball when the expression structure allows it.
std::optional<double> structural_sup(const FieldDescriptor& f, double t, double radius);
/// Exact Lipschitz constant of f(t, .) on the ball when the structure allows it.
std::optional<double> structural_lipschitz(const FieldDescriptor& f, double t, double radius);

/// State lattice used for sampled suprema: points of the cube lattice with
/// `cells` cells per axis on [-radius, radius] that lie in the closed ball.
std::vector<std::vector<double>> ball_lattice(std::size_t dim, double radius, std::size_t cells);

/// Integral over [a, b] of value^power (piecewise-linear interpolant of the samples).
double bound_integral(const SampledBound& b, double a, double c, double power);

/// (int_sub b^p)^{1/p}. RangeError when sub is not inside the window.
double lp_norm(const SampledBound& b, Interval sub);

/// sup over the family of int_{-r}^{r} m^p; 0 for an empty family.
double lp_bounded_sup(std::span<const SampledBound> family, double r);

struct EquicontinuityRow {
  double eps = 0.0;
  /// Largest grid delta such that every grid window of length < delta has
  /// sup-family integral < eps; +inf when every window qualifies; nullopt = FAIL.
  std::optional<double> delta;
};

std::vector<EquicontinuityRow> equicontinuity_profile(std::span<const SampledBound> family, double r,
                                                      std::span<const double> eps_list);

/// Piecewise-linear nondecreasing function with theta(0) = 0, extended
/// linearly past the last knot with the last slope.
class Modulus {
 public:
  Modulus() = default;
  Modulus(std::vector<double> knots, std::vector<double> values);
  /// theta(s) = slope * s
  static Modulus linear(double slope);

  double operator()(double s) const;
  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> knots_{0.0, 1.0};
  std::vector<double> values_{0.0, 0.0};
};

struct ModulusKey {
  Interval interval;
  int radius = 1;
  std::partial_ordering operator<=>(const ModulusKey& o) const {
    if (auto c = interval.lo <=> o.interval.lo; c != 0) return c;
    if (auto c = interval.hi <=> o.interval.hi; c != 0) return c;
    return radius <=> o.radius;
  }
  bool operator==(const ModulusKey&) const = default;
};

/// Suitable set of moduli theta^I_j; all entries share one s-grid.
class ModulusSet {
 public:
  void insert(ModulusKey key, Modulus theta) { entries_.insert_or_assign(key, std::move(theta)); }
  /// IndexError when absent.
  const Modulus& at(const ModulusKey& key) const;
  bool contains(const ModulusKey& key) const { return entries_.count(key) != 0; }
  const std::map<ModulusKey, Modulus>& entries() const { return entries_; }

  /// Pointwise max over all entries below each entry in the (I subset, j <=)
  /// order, then running max along s. Requires a common knot grid.
  void enforce_order();
  /// True when the partial order holds on the stored knots (within `tol`).
  bool respects_order(double tol = 0.0) const;

 private:
  std::map<ModulusKey, Modulus> entries_;
};

struct ThetaGrid {
  std::size_t s_knots = 256;
  /// s-range shared by all entries; 0 means the longest interval.
  double s_max = 0.0;
  BoundGrid bound{};
};

/// theta^I_j(s) = sup_{t in I, f in family} int_t^{t+s} m_f^j(u) du.
ModulusSet theta_from_mbounds(std::span<const FieldDescriptor> family, std::span<const Interval> intervals,
                              std::span<const int> radii, const ThetaGrid& grid = {});

struct SolutionThetaGrid {
  std::size_t s_knots = 65;
  /// s-range shared by all entries; 0 means the longest interval.
  double s_max = 0.0;
  /// Start times I.lo + i |I| / starts, i = 0..starts-1.
  std::size_t starts = 4;
  /// Initial states: ball lattice with this many cells per axis.
  std::size_t x0_cells = 8;
};

/// Modulus of continuity of the solutions of x' = f(t, x), f in `family`,
/// started in B_j at times in I and stopped when they leave B_j:
/// theta^I_j(s) = sup |x(t) - x(u)| over solution grid pairs with |t - u| <= s.
ModulusSet theta_from_solutions(std::span<const FieldDescriptor> family, std::span<const Interval> intervals,
                                std::span<const int> radii, const StepPolicy& policy = {},
                                const SolutionThetaGrid& grid = {});

}  // namespace carath

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "carath/bounds.hpp"
#include "carath/field.hpp"
#include "carath/kernels.hpp"

namespace carath {

enum class SeminormKind { TB, TD, TTheta };

const char* to_string(SeminormKind k);

struct SeminormIndex {
  SeminormKind kind = SeminormKind::TB;
  Interval interval;
  /// Ball radius (TB, TTheta).
  int radius = 1;
  /// Point of D (TD only).
  std::vector<double> x_point;
};

/// Grid curve on a uniform time grid over an interval; nodes stored flat, `dim` per time.
struct AdmissibleCurve {
  double t0 = 0.0;
  double dt = 0.0;
  std::size_t dim = 1;
  std::vector<double> nodes;
  double radius = 0.0;

  std::size_t size() const { return dim == 0 ? 0 : nodes.size() / dim; }
  std::span<const double> at(std::size_t k) const { return {nodes.data() + k * dim, dim}; }
  /// |x_k| <= radius and |x_a - x_b| <= theta(|t_a - t_b|) + slack for all grid pairs.
  bool admissible(const Modulus& theta, double slack = 0.0) const;
};

struct Resolution {
  std::size_t n_t = 64;
  std::size_t n_x = 61;
  /// Extra cells a step may move beyond floor(theta(dt)/dx). With 0 every
  /// grid curve is admissible, so the result is a lower bound.
  std::size_t slack_cells = 0;
};

struct SeminormValue {
  double value = 0.0;
  /// Lower-bound estimate from random search (state dimension >= 2).
  bool heuristic = false;
  AdmissibleCurve curve;
};

struct SearchOptions {
  std::size_t restarts = 16;
  std::size_t iterations = 400;
  std::uint64_t seed = 0;
};

/// (int_I |f(t, x)|^p dt)^{1/p}
double seminorm_TD(const FieldDescriptor& f, Interval I, std::span<const double> x);

/// L^p norm over I of the optimal m-bound on the ball of radius j.
double seminorm_TB(const FieldDescriptor& f, Interval I, int j, const BoundGrid& grid = {});

/// Grid problem used by the T_Theta dynamic program (state dimension 1).
/// A step may move at most floor(theta(dt)/dx) + slack_cells cells.
kernels::CurveDpProblem make_curve_problem(const FieldDescriptor& f, Interval I, int j, const Modulus& theta,
                                           const Resolution& res);

/// sup over theta-admissible curves in B_j of (int_I |f(t, x(t))|^p)^{1/p}:
/// exact on the grid for N = 1, random search with hill climbing for N >= 2.
SeminormValue seminorm_TTheta(const FieldDescriptor& f, Interval I, int j, const Modulus& theta,
                              const Resolution& res = {}, const SearchOptions& search = {});
/// Looks up theta^I_j; IndexError when absent.
SeminormValue seminorm_TTheta(const FieldDescriptor& f, Interval I, int j, const ModulusSet& thetas,
                              const Resolution& res = {}, const SearchOptions& search = {});

/// The first `count` points of the dyadic dense set in R^dim: stage L adds the
/// points of 2^-L Z^dim in [-(L+1), L+1]^dim not listed before, ordered by
/// norm then lexicographically.
std::vector<std::vector<double>> dyadic_points(std::size_t dim, std::size_t count);

struct MetricConfig {
  int n_max = 4;
  int j_max = 4;
  /// D points per interval for T_D.
  std::size_t d_count = 4;
  /// Moduli per (I, j); when absent `theta` is used for every index.
  std::optional<ModulusSet> thetas;
  Modulus theta = Modulus::linear(2.0);
  Resolution resolution{};
  BoundGrid bound{};
  SearchOptions search{};
};

/// Enumerated indices for a kind; weight of entry k (from 1) is 2^-k.
std::vector<SeminormIndex> metric_indices(const MetricConfig& cfg, SeminormKind kind, std::size_t dim);

double seminorm(const FieldDescriptor& f, const SeminormIndex& idx, const MetricConfig& cfg);

/// sum_k 2^-k u_k / (1 + u_k), u_k = seminorm of f - g at index k.
double metric(const FieldDescriptor& f, const FieldDescriptor& g, const MetricConfig& cfg, SeminormKind kind);

struct ConvergenceTable {
  std::vector<double> distance;
  /// Fraction of consecutive pairs that do not increase.
  double trend = 0.0;
  /// distance.back() / distance.front(); 0 when both vanish.
  double ratio = 0.0;
};

ConvergenceTable convergence_diagnostic(std::span<const FieldDescriptor> seq, const FieldDescriptor& limit,
                                        const MetricConfig& cfg, SeminormKind kind);

std::vector<FieldDescriptor> hull_sample(const FieldDescriptor& f, std::span<const double> taus);

struct EpsNet {
  std::vector<std::size_t> members;
  /// max over points of the distance to the nearest member.
  double radius = 0.0;
};

/// Greedy farthest-point net.
EpsNet eps_net(std::span<const FieldDescriptor> points, const MetricConfig& cfg, SeminormKind kind, double eps);

struct HullOptions {
  /// Translations tau range over [-horizon, horizon] with step tau_step.
  double horizon = 32.0;
  double tau_step = 0.25;
  /// delta ladder delta_0 2^-i, i = 0..levels-1.
  double delta0 = 1.0;
  int delta_levels = 12;
};

struct HullProbeReport {
  std::vector<double> probe;
  double sup_full = 0.0;
  double sup_half = 0.0;
  bool bounded = false;
  std::vector<EquicontinuityRow> delta;
  bool uniformly_continuous = false;
};

struct HullReport {
  std::vector<HullProbeReport> probes;
  bool bounded = false;
  bool uniformly_continuous = false;
  bool pass() const { return bounded && uniformly_continuous; }
};

/// Boundedness: sup_{|tau| <= T} |f_tau(., x)|_{L^p[-r,r]} <= 1.25 sup_{|tau| <= T/2} (+ 1e-12).
/// Uniform continuity: for every eps some delta in the ladder has
/// sup_tau max_{k=1..4} |f_{tau +- k delta/4}(., x) - f_tau(., x)|_{L^p[-r,r]} < eps.
HullReport hull_compactness_test(const FieldDescriptor& f, const std::vector<std::vector<double>>& probes, double r,
                                 std::span<const double> eps_list, const HullOptions& opts = {});

}  // namespace carath

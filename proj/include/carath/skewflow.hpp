#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "carath/field.hpp"
#include "carath/solver.hpp"

namespace carath {

/// Point of a skew-product flow: base fields (g), (g, G) or (g, G, k) and the fiber.
struct SkewPoint {
  std::vector<FieldDescriptor> base;
  std::vector<double> x;
  std::vector<double> y;
};

struct DecayReport {
  std::string parameter;
  std::vector<double> ladder;
  std::vector<double> error;
  /// Rung excluded from the fit (below the noise floor).
  std::vector<bool> excluded;
  /// Least-squares slope of log error against log parameter over the kept rungs; NaN with fewer than two.
  double slope = 0.0;
  bool pass = false;
};

/// Least-squares slope of log(y) against log(x) over entries with keep[i] (all when empty).
double loglog_slope(std::span<const double> x, std::span<const double> y, const std::vector<bool>& keep = {});

/// (g_t, x(t, g, x0)). MaximalIntervalError when the solution does not reach t.
SkewPoint phi1(double t, const FieldDescriptor& g, std::span<const double> x0, const StepPolicy& policy = {});

/// (g_t, G_t, k_t, x(t), y(t)) for x' = g(t, x), y' = G(t, x) y + k(t, x).
SkewPoint phi2(double t, const FieldDescriptor& g, const FieldDescriptor& G, const FieldDescriptor& k,
               std::span<const double> x0, std::span<const double> y0, const StepPolicy& policy = {});

/// sup_t |x(t, f_n, x0_n) - x(t, f, x0)| per n. Passes when the last error is
/// below the first and the trend is nonincreasing on at least 3/4 of the steps
/// (or when every error is within `tol`).
DecayReport continuity_experiment(std::span<const FieldDescriptor> seq, const FieldDescriptor& limit,
                                  std::span<const std::vector<double>> x0_seq, std::span<const double> x0, double t0,
                                  double t1, const StepPolicy& policy = {}, double tol = 1e-9);

struct TriangularSystem {
  FieldDescriptor f;
  FieldDescriptor F;
  FieldDescriptor k;
};

/// Same for the triangular system; the error is max of the x and y sup-errors.
DecayReport triangular_continuity_experiment(std::span<const TriangularSystem> seq, const TriangularSystem& limit,
                                             std::span<const std::vector<double>> x0_seq,
                                             std::span<const std::vector<double>> y0_seq, std::span<const double> x0,
                                             std::span<const double> y0, double t0, double t1,
                                             const StepPolicy& policy = {}, double tol = 1e-9);

std::vector<double> default_eps_ladder();

/// err(eps) = sup_t |(x(t, x0 + eps y0) - x(t, x0)) / eps - y(t)| with y the
/// variational solution for J = jacobian. Rungs with err <= 10 noise / eps are
/// excluded from the fit; passes when every kept rung is within `tol` or the
/// fitted slope is >= 0.9.
DecayReport linearized_check(const FieldDescriptor& f, const FieldDescriptor& jacobian, std::span<const double> x0,
                             std::span<const double> y0, double t0, double t1, std::span<const double> eps_ladder,
                             const StepPolicy& policy = {}, double tol = 1e-9);

struct HullFiber {
  double tau = 0.0;
  std::vector<double> x;
  std::vector<double> y;
};

/// Fibers of (f_tau, (J f)_tau) evolved over [0, t] from (x0, y0), one row per tau.
std::vector<HullFiber> hull_linearized_flow(const FieldDescriptor& f, const FieldDescriptor& jacobian,
                                            std::span<const double> taus, double t, std::span<const double> x0,
                                            std::span<const double> y0, const StepPolicy& policy = {});

}  // namespace carath

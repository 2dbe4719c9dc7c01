#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "carath/field.hpp"

namespace carath {

enum class Scheme { averaged_euler, averaged_heun };

const char* to_string(Scheme s);

struct StepPolicy {
  double dt = 1e-3;
  /// Midpoint samples per breakpoint-free piece of a slice.
  int subsamples = 4;
  Scheme scheme = Scheme::averaged_heun;
  double r_max = 1e6;
  /// Stop with truncated_exit when |x| exceeds this radius.
  std::optional<double> exit_radius;
  /// Accept fields that only claim SC (solutions may not be unique).
  bool allow_non_lc = false;
  /// Round-off level of one trajectory; sets the finite-difference noise floor.
  double noise_tolerance = 1e-13;

  void validate() const;
};

enum class TrajectoryStatus { complete, truncated_blowup, truncated_exit };

const char* to_string(TrajectoryStatus s);

/// Solution sampled on the uniform grid t_k = t0 + k h (h < 0 when
/// integrating backwards). States are stored flat, `dim` per sample.
struct Trajectory {
  double t0 = 0.0;
  double h = 0.0;
  std::size_t dim = 0;
  std::vector<double> x;
  std::size_t y_dim = 0;
  std::vector<double> y;
  TrajectoryStatus status = TrajectoryStatus::complete;
  std::optional<double> exit_time;
  std::string warning;

  std::size_t size() const { return dim == 0 ? 0 : x.size() / dim; }
  double t(std::size_t k) const { return t0 + static_cast<double>(k) * h; }
  std::span<const double> x_at(std::size_t k) const { return {x.data() + k * dim, dim}; }
  std::span<const double> y_at(std::size_t k) const { return {y.data() + k * y_dim, y_dim}; }
  std::span<const double> x_final() const { return x_at(size() - 1); }
  bool complete() const { return status == TrajectoryStatus::complete; }
};

/// x' = f(t, x), x(span.lo) = x0, integrated to span.hi (which may lie
/// before span.lo). Steps are |span|/ceil(|span|/dt).
Trajectory integrate(const FieldDescriptor& f, std::span<const double> x0, double t0, double t1,
                     const StepPolicy& policy = {});

/// x' = f(t, x), y' = F(t, x) y + k(t, x). The y update repeats the x scheme
/// with the same frozen states, so y is the derivative of the discrete x-flow
/// whenever F = J_x f and k = 0.
Trajectory integrate_triangular(const FieldDescriptor& f, const FieldDescriptor& F, const FieldDescriptor& k,
                                std::span<const double> x0, std::span<const double> y0, double t0, double t1,
                                const StepPolicy& policy = {});

/// Same with k = 0.
Trajectory integrate_variational(const FieldDescriptor& f, const FieldDescriptor& F, std::span<const double> x0,
                                 std::span<const double> y0, double t0, double t1, const StepPolicy& policy = {});

struct PicardResult {
  Trajectory trajectory;
  int iterations = 0;
  /// sup-norm change of the last iteration.
  double residual = 0.0;
  bool converged = false;
};

/// Fixed-point iteration of x(t) = x0 + int_{t0}^t f(u, x(u)) du on `grid_n`
/// uniform cells; iterates are piecewise linear and the integrals are adaptive.
/// SolverError when the change grows for three consecutive iterations.
PicardResult picard_oracle(const FieldDescriptor& f, std::span<const double> x0, double t0, double t1,
                           std::size_t grid_n, int max_iterations = 100, double tol = 1e-10);

/// Richardson estimate of the error of `integrate` at this policy: the sup
/// over shared grid nodes of |x_dt - x_{dt/2}| times 2^q / (2^q - 1), q the
/// scheme order.
double solver_tolerance(const FieldDescriptor& f, std::span<const double> x0, double t0, double t1,
                        const StepPolicy& policy = {});

/// Same estimate for the triangular system, taken over both x and y.
double solver_tolerance(const FieldDescriptor& f, const FieldDescriptor& F, const FieldDescriptor& k,
                        std::span<const double> x0, std::span<const double> y0, double t0, double t1,
                        const StepPolicy& policy = {});

/// sup over shared nodes of |a - b|, over x and (when both carry it) y;
/// the grids must nest.
double sup_distance(const Trajectory& a, const Trajectory& b);

}  // namespace carath

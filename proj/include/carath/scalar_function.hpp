#pragma once

#include <array>
#include <optional>
#include <vector>

namespace carath {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool contains(const Interval& other) const { return lo <= other.lo && other.hi <= hi; }
  bool operator==(const Interval&) const = default;
};

/// One polynomial piece c0 + c1 s + c2 s^2 + c3 s^3 with s = t - origin, valid on [lo, hi).
struct PolyPiece {
  double lo = 0.0;
  double hi = 0.0;
  double origin = 0.0;
  std::array<double, 4> c{};

  double value(double t) const {
    const double s = t - origin;
    return c[0] + s * (c[1] + s * (c[2] + s * c[3]));
  }
  double integral() const;
  /// sup of |value| over the closed piece [lo, hi].
  double max_abs() const;
  PolyPiece derivative() const;
};

/// Scalar function of time used by the time-dependent primitives.
///
/// Every kind except `sinusoid` is piecewise polynomial of degree <= 3 and
/// exposes its pieces over any window, which gives exact integrals, exact
/// suprema and declared breakpoints. Values at breakpoints are right limits.
///
/// The ramp kinds reproduce the worked example of the library:
///   ramp_wave      H, zero for t < 0, ramps of width 1/(n+1) on each block [4n, 4n+4)
///   step_wave      Hbar, the a.e. limit of H(. + 4k): +1 on (4n, 4n+2), -1 on (4n+2, 4n+4)
///   ramp_integral  h(t) = int_0^t H
///   step_integral  hbar(t) = int_0^t Hbar (triangle wave of period 4)
class ScalarFunction {
 public:
  enum class Kind { piecewise, ramp_wave, step_wave, ramp_integral, step_integral, sinusoid };

  /// `coeffs.size()` must equal `breaks.size() + 1`; piece i is in powers of
  /// (t - breaks[max(i-1, 0)]), or of t when there are no breaks.
  static ScalarFunction piecewise(std::vector<double> breaks, std::vector<std::array<double, 4>> coeffs);
  static ScalarFunction polynomial(std::array<double, 4> coeffs);
  static ScalarFunction ramp_wave();
  static ScalarFunction step_wave();
  static ScalarFunction ramp_integral();
  static ScalarFunction step_integral();
  /// amplitude * sin(omega t + phase)
  static ScalarFunction sinusoid(double amplitude, double omega, double phase);

  Kind kind() const { return kind_; }
  bool is_piecewise_polynomial() const { return kind_ != Kind::sinusoid; }

  double operator()(double t) const;

  /// Pieces covering [lo, hi], clipped to it. Throws for sinusoids.
  std::vector<PolyPiece> pieces(double lo, double hi) const;
  /// Declared breakpoints strictly inside (lo, hi), ascending.
  void breakpoints(double lo, double hi, std::vector<double>& out) const;

  double integral(double a, double b) const;
  double max_abs(double a, double b) const;
  /// nullopt when the function has jumps (step_wave or a discontinuous table).
  std::optional<ScalarFunction> derivative() const;

  const std::vector<double>& table_breaks() const { return breaks_; }
  const std::vector<std::array<double, 4>>& table_coeffs() const { return coeffs_; }
  double amplitude() const { return amplitude_; }
  double omega() const { return omega_; }
  double phase() const { return phase_; }

  bool operator==(const ScalarFunction& other) const = default;

 private:
  PolyPiece piece_at(double t) const;
  PolyPiece table_piece(std::size_t i) const;

  Kind kind_ = Kind::piecewise;
  std::vector<double> breaks_;
  std::vector<std::array<double, 4>> coeffs_;
  double amplitude_ = 0.0;
  double omega_ = 0.0;
  double phase_ = 0.0;
};

/// Exact integral of |a(t + shift_a) - b(t + shift_b)| over [lo, hi] for piecewise-polynomial a, b.
double l1_distance(const ScalarFunction& a, double shift_a, const ScalarFunction& b, double shift_b, Interval over);

}  // namespace carath

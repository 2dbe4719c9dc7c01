#include "carath/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace carath {

double euclidean_norm(std::span<const double> v) {
  if (v.size() == 1) return std::abs(v[0]);
  double scale = 0.0;
  for (double x : v) scale = std::max(scale, std::abs(x));
  if (scale == 0.0 || !std::isfinite(scale)) return scale;
  double sum = 0.0;
  for (double x : v) sum += (x / scale) * (x / scale);
  return scale * std::sqrt(sum);
}

double operator_norm(std::span<const double> a, std::size_t rows, std::size_t cols) {
  if (rows == 1 || cols == 1) return euclidean_norm(a);
  // Gram matrix G = A^T A (cols x cols).
  std::vector<double> g(cols * cols, 0.0);
  for (std::size_t i = 0; i < cols; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      double s = 0.0;
      for (std::size_t r = 0; r < rows; ++r) s += a[r * cols + i] * a[r * cols + j];
      g[i * cols + j] = s;
    }
  if (cols == 2) {
    const double tr = g[0] + g[3];
    const double half_gap = std::hypot(0.5 * (g[0] - g[3]), g[1]);
    return std::sqrt(std::max(0.0, 0.5 * tr + half_gap));
  }
  std::vector<double> v(cols), w(cols);
  for (std::size_t i = 0; i < cols; ++i) v[i] = 1.0 + 0.1 * static_cast<double>(i);
  double lambda = 0.0;
  for (int it = 0; it < 10000; ++it) {
    for (std::size_t i = 0; i < cols; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < cols; ++j) s += g[i * cols + j] * v[j];
      w[i] = s;
    }
    const double n = euclidean_norm(w);
    if (n == 0.0) return 0.0;
    for (std::size_t i = 0; i < cols; ++i) v[i] = w[i] / n;
    if (std::abs(n - lambda) <= 1e-12 * n) {
      lambda = n;
      break;
    }
    lambda = n;
  }
  return std::sqrt(lambda);
}

}  // namespace carath

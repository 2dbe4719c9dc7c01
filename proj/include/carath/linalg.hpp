#pragma once

#include <cstddef>
#include <span>

namespace carath {

double euclidean_norm(std::span<const double> v);

/// Operator 2-norm of a row-major rows x cols matrix. Exact when either
/// dimension is 1 or cols == 2; power iteration on A^T A otherwise.
double operator_norm(std::span<const double> a, std::size_t rows, std::size_t cols);

}  // namespace carath

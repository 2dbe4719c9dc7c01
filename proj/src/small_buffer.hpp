#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace carath::detail {

// Scratch storage that stays on the stack for small sizes.
class SmallBuffer {
 public:
  explicit SmallBuffer(std::size_t n, double fill = 0.0) : size_(n) {
    if (n > inline_.size()) heap_.resize(n);
    std::fill(data(), data() + n, fill);
  }
  double* data() { return heap_.empty() ? inline_.data() : heap_.data(); }
  const double* data() const { return heap_.empty() ? inline_.data() : heap_.data(); }
  std::size_t size() const { return size_; }
  double& operator[](std::size_t i) { return data()[i]; }
  double operator[](std::size_t i) const { return data()[i]; }
  operator std::span<double>() { return {data(), size_}; }
  operator std::span<const double>() const { return {data(), size_}; }

 private:
  std::array<double, 16> inline_{};
  std::vector<double> heap_;
  std::size_t size_;
};

}  // namespace carath::detail

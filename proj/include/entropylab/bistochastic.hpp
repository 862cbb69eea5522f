#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "entropylab/error.hpp"

namespace entropylab {

/// Real n x n matrix with non-negative entries whose rows and columns sum to one.
class BistochasticMatrix {
 public:
  /// Entries within 1e-12 outside [0, 1] are clamped; anything further out, or
  /// a row/column sum off by more than `sum_tolerance`, is rejected.
  BistochasticMatrix(std::size_t n, std::vector<double> row_major, double sum_tolerance = 1e-9)
      : n_(n), b_(std::move(row_major)) {
    if (n == 0 || b_.size() != n * n) throw DimensionError("BistochasticMatrix: expected n*n entries");
    for (double& x : b_) {
      if (!std::isfinite(x) || x < -kEntryClamp || x > 1.0 + kEntryClamp) {
        throw ValidationError("BistochasticMatrix: entry " + std::to_string(x) + " outside [0, 1]");
      }
      x = std::clamp(x, 0.0, 1.0);
    }
    const double res = sum_residual();
    if (res > sum_tolerance) {
      throw ValidationError("BistochasticMatrix: row/column sums off by " + std::to_string(res));
    }
  }

  static BistochasticMatrix identity(std::size_t n) {
    std::vector<double> e(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) e[i * n + i] = 1.0;
    return BistochasticMatrix(n, std::move(e));
  }

  static BistochasticMatrix flat(std::size_t n) {
    return BistochasticMatrix(n, std::vector<double>(n * n, 1.0 / static_cast<double>(n)));
  }

  std::size_t dim() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return b_[i * n_ + j]; }
  std::span<const double> entries() const noexcept { return b_; }

  /// max over rows and columns of |sum - 1|
  double sum_residual() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      double row = 0.0;
      double col = 0.0;
      for (std::size_t j = 0; j < n_; ++j) {
        row += b_[i * n_ + j];
        col += b_[j * n_ + i];
      }
      worst = std::max({worst, std::abs(row - 1.0), std::abs(col - 1.0)});
    }
    return worst;
  }

  double min_entry() const { return *std::min_element(b_.begin(), b_.end()); }

  BistochasticMatrix transposed() const {
    std::vector<double> t(n_ * n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) t[j * n_ + i] = b_[i * n_ + j];
    return BistochasticMatrix(n_, std::move(t));
  }

  /// Row vector times matrix: (x b)_j = sum_i x_i b_ij.
  std::vector<double> left_multiply(std::span<const double> x) const {
    if (x.size() != n_) throw DimensionError("BistochasticMatrix::left_multiply: length mismatch");
    std::vector<double> out(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) out[j] += x[i] * b_[i * n_ + j];
    return out;
  }

  /// Row vector times transpose: (x b^T)_i = sum_j x_j b_ij.
  std::vector<double> left_multiply_transpose(std::span<const double> x) const {
    if (x.size() != n_) throw DimensionError("BistochasticMatrix::left_multiply_transpose: length mismatch");
    std::vector<double> out(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) out[i] += x[j] * b_[i * n_ + j];
    return out;
  }

  friend bool operator==(const BistochasticMatrix&, const BistochasticMatrix&) = default;

 private:
  static constexpr double kEntryClamp = 1e-12;

  std::size_t n_;
  std::vector<double> b_;
};

}  // namespace entropylab

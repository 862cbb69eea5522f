#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "entropylab/error.hpp"

namespace entropylab {

/// Values in [-kClampWindow, 0) are treated as rounding noise around zero.
inline constexpr double kClampWindow = 1e-12;
inline constexpr double kProbabilitySumTolerance = 1e-10;
inline constexpr double kMajorizationSlack = 1e-10;

/// Entropy function eta(t) = -t ln t with eta(0) = 0.
inline double eta(double t) {
  if (!(t >= -kClampWindow && t <= 1.0 + kClampWindow)) {
    throw std::domain_error("eta: argument " + std::to_string(t) + " outside [0, 1]");
  }
  t = std::clamp(t, 0.0, 1.0);
  if (t == 0.0) return 0.0;
  return -t * std::log(t);
}

/// Probability weights stored in non-increasing order.
class ProbabilityVector {
 public:
  explicit ProbabilityVector(std::vector<double> weights) : w_(std::move(weights)) {
    if (w_.empty()) throw ValidationError("ProbabilityVector: empty");
    for (double& x : w_) {
      if (!std::isfinite(x) || x < -kClampWindow || x > 1.0 + kClampWindow) {
        throw ValidationError("ProbabilityVector: weight " + std::to_string(x) + " outside [0, 1]");
      }
      x = std::clamp(x, 0.0, 1.0);
    }
    const double total = std::accumulate(w_.begin(), w_.end(), 0.0);
    if (std::abs(total - 1.0) > kProbabilitySumTolerance) {
      throw ValidationError("ProbabilityVector: weights sum to " + std::to_string(total));
    }
    std::stable_sort(w_.begin(), w_.end(), std::greater<>());
  }

  static ProbabilityVector uniform(std::size_t n) { return ProbabilityVector(std::vector<double>(n, 1.0 / n)); }

  static ProbabilityVector point_mass(std::size_t n) {
    std::vector<double> w(n, 0.0);
    w.at(0) = 1.0;
    return ProbabilityVector(std::move(w));
  }

  std::size_t size() const noexcept { return w_.size(); }
  double operator[](std::size_t i) const noexcept { return w_[i]; }
  std::span<const double> weights() const noexcept { return w_; }

 private:
  std::vector<double> w_;
};

/// H(lambda) = sum_i eta(lambda_i), in nats.
inline double shannon_entropy(const ProbabilityVector& p) {
  double h = 0.0;
  for (double x : p.weights()) h += eta(x);
  return h;
}

/// True iff every top-k partial sum of `lambda` dominates that of `mu`.
inline bool majorizes(const ProbabilityVector& lambda, const ProbabilityVector& mu) {
  if (lambda.size() != mu.size()) throw DimensionError("majorizes: length mismatch");
  double sl = 0.0;
  double sm = 0.0;
  for (std::size_t k = 0; k < lambda.size(); ++k) {
    sl += lambda[k];
    sm += mu[k];
    if (sm > sl + kMajorizationSlack) return false;
  }
  return true;
}

}  // namespace entropylab

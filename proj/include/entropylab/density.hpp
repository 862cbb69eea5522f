#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "entropylab/eigen.hpp"
#include "entropylab/entropy.hpp"
#include "entropylab/matrix.hpp"

namespace entropylab {

inline constexpr double kDensityTolerance = 1e-10;
inline constexpr double kSpectralTolerance = 1e-9;

/// Sorted eigenvalues with their rank-one eigenprojections.
struct SpectralDecomposition {
  std::vector<double> values;
  ComplexMatrix vectors;  // column i spans projections[i]
  std::vector<ComplexMatrix> projections;

  std::size_t dim() const noexcept { return values.size(); }

  ComplexMatrix reconstruct() const {
    ComplexMatrix out(vectors.dim());
    for (std::size_t k = 0; k < values.size(); ++k) out = out + values[k] * projections[k];
    return out;
  }
};

/// A positive trace-one Hermitian matrix. The eigen-decomposition is computed
/// once at construction and shared, immutably, between copies.
class DensityMatrix {
 public:
  explicit DensityMatrix(const ComplexMatrix& m, const JacobiOptions& options = {})
      : DensityMatrix(checked_hermitian(m), nullptr, options) {}

  /// Uses the caller's orthonormal eigenbasis (columns of `vectors`, ordered
  /// so that their eigenvalues are non-increasing up to ties).
  static DensityMatrix with_basis(const ComplexMatrix& m, const ComplexMatrix& vectors) {
    return DensityMatrix(checked_hermitian(m), &vectors, {});
  }

  std::size_t dim() const noexcept { return matrix_.dim(); }
  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  const SpectralDecomposition& spectrum() const noexcept { return cache_->spectrum; }
  const ProbabilityVector& probabilities() const noexcept { return cache_->probabilities; }

  bool is_pure(double tol = 1e-9) const { return probabilities()[0] >= 1.0 - tol; }

 private:
  struct Cache {
    SpectralDecomposition spectrum;
    ProbabilityVector probabilities;
  };

  static ComplexMatrix checked_hermitian(const ComplexMatrix& m) {
    const double herm = hermiticity_residual(m);
    if (herm > kDensityTolerance) {
      throw ValidationError("DensityMatrix: not Hermitian (||m - m*||_F = " + std::to_string(herm) + ")");
    }
    const Complex tr = trace(m);
    if (std::abs(tr - Complex{1.0, 0.0}) > kDensityTolerance) {
      throw ValidationError("DensityMatrix: trace " + std::to_string(tr.real()) + " + " +
                            std::to_string(tr.imag()) + "i is not 1");
    }
    return hermitian_part(m);
  }

  DensityMatrix(ComplexMatrix m, const ComplexMatrix* basis, const JacobiOptions& options)
      : matrix_(std::move(m)), cache_(std::make_shared<const Cache>(decompose(matrix_, basis, options))) {}

  static Cache decompose(const ComplexMatrix& m, const ComplexMatrix* basis, const JacobiOptions& options) {
    const std::size_t n = m.dim();
    std::vector<double> values;
    ComplexMatrix vectors = basis ? *basis : ComplexMatrix(n);
    if (basis) {
      if (basis->dim() != n) throw DimensionError("DensityMatrix: basis dimension mismatch");
      if (unitarity_residual(*basis) > kSpectralTolerance) {
        throw ValidationError("DensityMatrix: supplied basis is not orthonormal");
      }
      std::vector<double> diag(n);
      const ComplexMatrix rotated = matmul(matmul(adjoint(*basis), m), *basis);
      for (std::size_t i = 0; i < n; ++i) diag[i] = rotated(i, i).real();
      values = diag;
      std::stable_sort(values.begin(), values.end(), std::greater<>());
      for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(values[i] - diag[i]) > options.degeneracy_gap) {
          throw ValidationError("DensityMatrix: supplied basis is not in non-increasing eigenvalue order");
        }
      }
    } else {
      HermitianEig eig = hermitian_eig(m, options);
      values = std::move(eig.values);
      vectors = std::move(eig.vectors);
    }

    std::vector<ComplexMatrix> projections;
    projections.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto v = vectors.column(i);
      projections.push_back(ComplexMatrix::outer(v, v));
    }
    SpectralDecomposition spectrum{values, std::move(vectors), std::move(projections)};
    if (basis) {
      const double res = distance(spectrum.reconstruct(), m);
      if (res > kSpectralTolerance * std::max(1.0, frobenius_norm(m))) {
        throw ValidationError("DensityMatrix: supplied basis does not diagonalize the matrix");
      }
    }

    for (double& x : values) {
      if (x < -kDensityTolerance) {
        throw ValidationError("DensityMatrix: negative eigenvalue " + std::to_string(x));
      }
      x = std::clamp(x, 0.0, 1.0);
    }
    return Cache{std::move(spectrum), ProbabilityVector(std::move(values))};
  }

  ComplexMatrix matrix_;
  std::shared_ptr<const Cache> cache_;
};

/// S(D) = H(eigenvalues of D).
inline double von_neumann_entropy(const DensityMatrix& d) { return shannon_entropy(d.probabilities()); }

/// Pure state |psi><psi| for a unit vector psi.
inline DensityMatrix pure_state(std::span<const Complex> psi) {
  return DensityMatrix(ComplexMatrix::outer(psi, psi));
}

inline DensityMatrix maximally_mixed(std::size_t n) {
  return DensityMatrix(scale(Complex{1.0 / static_cast<double>(n), 0.0}, ComplexMatrix::identity(n)));
}

}  // namespace entropylab

#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "entropylab/matrix.hpp"

namespace entropylab {

#ifndef ENTROPYLAB_JACOBI_OFF_TOLERANCE
#define ENTROPYLAB_JACOBI_OFF_TOLERANCE 1e-12
#endif

struct JacobiOptions {
  /// Sweeps stop once the off-diagonal Frobenius norm is below
  /// off_tolerance * max(1, ||m||_F).
  double off_tolerance = ENTROPYLAB_JACOBI_OFF_TOLERANCE;
  int max_sweeps = 100;
  /// Accepted ||m - m*||_F, scaled the same way.
  double hermitian_tolerance = 1e-10;
  /// Eigenvalues closer than this to the leader of their group count as tied.
  double degeneracy_gap = 1e-9;
  /// The first eigenvector component above this modulus is made real positive.
  double phase_threshold = 1e-8;
  bool throw_on_nonconvergence = true;
};

/// Eigenvalues in non-increasing order with orthonormal eigenvectors stored
/// as the matching columns of `vectors`.
struct HermitianEig {
  std::vector<double> values;
  ComplexMatrix vectors;
  int sweeps = 0;
  double off_norm = 0.0;
  bool converged = true;

  std::size_t dim() const noexcept { return values.size(); }
  std::vector<Complex> vector(std::size_t i) const { return vectors.column(i); }

  /// Rank-one projection onto the i-th eigenvector.
  ComplexMatrix projection(std::size_t i) const {
    const auto v = vector(i);
    return ComplexMatrix::outer(v, v);
  }

  /// V diag(values) V*
  ComplexMatrix reconstruct() const {
    const std::size_t n = dim();
    ComplexMatrix out(n);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          out(i, j) += values[k] * vectors(i, k) * std::conj(vectors(j, k));
    return out;
  }
};

namespace detail {

inline double off_diagonal_norm(const ComplexMatrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j)
      if (i != j) s += std::norm(a(i, j));
  return std::sqrt(s);
}

// One complex Jacobi rotation annihilating a(p, q). The unitary is a phase
// fix diag(1, e^{-i arg a_pq}) followed by the real symmetric rotation.
inline void jacobi_rotate(ComplexMatrix& a, ComplexMatrix& v, std::size_t p, std::size_t q) {
  const Complex g = a(p, q);
  const double mag = std::abs(g);
  if (mag == 0.0) return;
  const Complex phase_conj = std::conj(g) / mag;
  const double alpha = a(p, p).real();
  const double beta = a(q, q).real();
  const double zeta = (beta - alpha) / (2.0 * mag);
  const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = t * c;

  const Complex upp = c;
  const Complex upq = s;
  const Complex uqp = -s * phase_conj;
  const Complex uqq = c * phase_conj;

  const std::size_t n = a.dim();
  for (std::size_t k = 0; k < n; ++k) {
    const Complex akp = a(k, p);
    const Complex akq = a(k, q);
    a(k, p) = akp * upp + akq * uqp;
    a(k, q) = akp * upq + akq * uqq;
  }
  for (std::size_t k = 0; k < n; ++k) {
    const Complex apk = a(p, k);
    const Complex aqk = a(q, k);
    a(p, k) = std::conj(upp) * apk + std::conj(uqp) * aqk;
    a(q, k) = std::conj(upq) * apk + std::conj(uqq) * aqk;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  a(p, p) = a(p, p).real();
  a(q, q) = a(q, q).real();

  for (std::size_t k = 0; k < n; ++k) {
    const Complex vkp = v(k, p);
    const Complex vkq = v(k, q);
    v(k, p) = vkp * upp + vkq * uqp;
    v(k, q) = vkp * upq + vkq * uqq;
  }
}

inline bool moduli_before(const ComplexMatrix& v, std::size_t a, std::size_t b) {
  for (std::size_t r = 0; r < v.dim(); ++r) {
    const double ma = std::abs(v(r, a));
    const double mb = std::abs(v(r, b));
    if (ma != mb) return ma > mb;
  }
  return false;
}

}  // namespace detail

/// Cyclic Jacobi eigensolver for Hermitian matrices. Output is a pure
/// function of the input bits: fixed sweep order (p < q, row-major), fixed
/// phase convention, ties ordered by descending lexicographic comparison of
/// eigenvector component moduli.
inline HermitianEig hermitian_eig(const ComplexMatrix& m, const JacobiOptions& options = {}) {
  const std::size_t n = m.dim();
  const double scale = std::max(1.0, frobenius_norm(m));
  const double herm = hermiticity_residual(m);
  if (herm > options.hermitian_tolerance * scale) {
    throw ValidationError("hermitian_eig: input is not Hermitian (||m - m*||_F = " +
                          std::to_string(herm) + ")");
  }

  ComplexMatrix a = hermitian_part(m);
  ComplexMatrix v = ComplexMatrix::identity(n);
  int sweeps = 0;
  double off = detail::off_diagonal_norm(a);
  while (off > options.off_tolerance * scale && sweeps < options.max_sweeps) {
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) detail::jacobi_rotate(a, v, p, q);
    ++sweeps;
    off = detail::off_diagonal_norm(a);
  }
  const bool converged = off <= options.off_tolerance * scale;
  if (!converged && options.throw_on_nonconvergence) {
    throw ConvergenceError("hermitian_eig: no convergence after " + std::to_string(sweeps) + " sweeps",
                           off);
  }

  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t r = 0; r < n; ++r) {
      const Complex z = v(r, k);
      const double mag = std::abs(z);
      if (mag > options.phase_threshold) {
        const Complex rot = std::conj(z) / mag;
        for (std::size_t i = 0; i < n; ++i) v(i, k) *= rot;
        v(r, k) = mag;
        break;
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i).real() > a(j, j).real(); });
  std::vector<double> values(n);
  for (std::size_t k = 0; k < n; ++k) values[k] = a(order[k], order[k]).real();

  // Vectors are reordered inside tie groups; values stay sorted.
  for (std::size_t g = 0; g < n;) {
    std::size_t end = g + 1;
    while (end < n && values[g] - values[end] < options.degeneracy_gap) ++end;
    std::stable_sort(order.begin() + static_cast<std::ptrdiff_t>(g),
                     order.begin() + static_cast<std::ptrdiff_t>(end),
                     [&](std::size_t i, std::size_t j) { return detail::moduli_before(v, i, j); });
    g = end;
  }

  ComplexMatrix vectors(n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t r = 0; r < n; ++r) vectors(r, k) = v(r, order[k]);

  return HermitianEig{std::move(values), std::move(vectors), sweeps, off, converged};
}

}  // namespace entropylab

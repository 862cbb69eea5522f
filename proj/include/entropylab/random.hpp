#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "entropylab/bistochastic.hpp"
#include "entropylab/matrix.hpp"

namespace entropylab {

/// Seeded generator with a fixed, platform-independent output sequence.
///
/// Raw bits come from std::mt19937_64, whose sequence is pinned by the C++
/// standard. Uniform doubles take the top 53 bits; normals use Box-Muller;
/// bounded integers use rejection sampling. The std:: distribution classes are
/// avoided because their algorithms are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  Complex complex_normal() {
    const double re = normal();
    const double im = normal();
    return {re, im};
  }

  /// Uniform in {0, ..., bound - 1}.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

 private:
  std::mt19937_64 engine_;
};

/// splitmix64 mix of (seed, stream); used to give every batch instance its own
/// generator independent of scheduling.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline ComplexMatrix random_gaussian_matrix(Rng& rng, std::size_t n) {
  ComplexMatrix g(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) g(i, j) = rng.complex_normal();
  return g;
}

inline ComplexMatrix random_hermitian(Rng& rng, std::size_t n) {
  return hermitian_part(random_gaussian_matrix(rng, n));
}

/// Modified Gram-Schmidt on the columns of a complex Gaussian matrix.
inline ComplexMatrix random_unitary(Rng& rng, std::size_t n) {
  ComplexMatrix u = random_gaussian_matrix(rng, n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t prev = 0; prev < k; ++prev) {
      Complex dot{};
      for (std::size_t r = 0; r < n; ++r) dot += std::conj(u(r, prev)) * u(r, k);
      for (std::size_t r = 0; r < n; ++r) u(r, k) -= dot * u(r, prev);
    }
    double norm = 0.0;
    for (std::size_t r = 0; r < n; ++r) norm += std::norm(u(r, k));
    norm = std::sqrt(norm);
    for (std::size_t r = 0; r < n; ++r) u(r, k) /= norm;
  }
  return u;
}

/// G G* / Tr(G G*): full rank with probability one.
inline ComplexMatrix random_density(Rng& rng, std::size_t n) {
  const ComplexMatrix g = random_gaussian_matrix(rng, n);
  ComplexMatrix d = hermitian_part(matmul(g, adjoint(g)));
  const double tr = trace(d).real();
  return scale(Complex{1.0 / tr, 0.0}, d);
}

inline std::vector<Complex> random_unit_vector(Rng& rng, std::size_t n) {
  std::vector<Complex> v(n);
  double norm = 0.0;
  for (auto& z : v) {
    z = rng.complex_normal();
    norm += std::norm(z);
  }
  norm = std::sqrt(norm);
  for (auto& z : v) z /= norm;
  return v;
}

inline ComplexMatrix random_pure_density(Rng& rng, std::size_t n) {
  const auto v = random_unit_vector(rng, n);
  return ComplexMatrix::outer(v, v);
}

/// Fisher-Yates shuffle of 0..n-1.
inline std::vector<std::size_t> random_permutation(Rng& rng, std::size_t n) {
  std::vector<std::size_t> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = i;
  for (std::size_t i = n; i > 1; --i) std::swap(p[i - 1], p[rng.below(i)]);
  return p;
}

/// Probability vector with i.i.d. exponential weights (flat Dirichlet), unsorted.
inline std::vector<double> random_simplex_point(Rng& rng, std::size_t k) {
  std::vector<double> w(k);
  double total = 0.0;
  for (auto& x : w) {
    x = -std::log(1.0 - rng.uniform());
    total += x;
  }
  for (auto& x : w) x /= total;
  return w;
}

/// Convex combination of `terms` random permutation matrices (a point of the
/// Birkhoff polytope). Defaults to n^2 terms.
inline BistochasticMatrix random_bistochastic(Rng& rng, std::size_t n, std::size_t terms = 0) {
  if (terms == 0) terms = n * n;
  std::vector<std::vector<std::size_t>> perms;
  perms.reserve(terms);
  for (std::size_t t = 0; t < terms; ++t) perms.push_back(random_permutation(rng, n));
  const auto weights = random_simplex_point(rng, terms);
  std::vector<double> a(n * n, 0.0);
  for (std::size_t t = 0; t < terms; ++t)
    for (std::size_t i = 0; i < n; ++i) a[i * n + perms[t][i]] += weights[t];
  return BistochasticMatrix(n, std::move(a));
}

}  // namespace entropylab

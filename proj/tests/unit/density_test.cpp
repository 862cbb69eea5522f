#include <gtest/gtest.h>

#include <cmath>
#include <thread>

#include "entropylab/density.hpp"
#include "entropylab/random.hpp"

namespace el = entropylab;
using el::Complex;
using el::ComplexMatrix;

TEST(DensityMatrix, Validation) {
  const ComplexMatrix not_hermitian{{Complex{0.5, 0}, Complex{0.1, 0}}, {Complex{0, 0}, Complex{0.5, 0}}};
  EXPECT_THROW(el::DensityMatrix{not_hermitian}, el::ValidationError);
  const double wrong_trace[] = {0.5, 0.6};
  EXPECT_THROW(el::DensityMatrix{ComplexMatrix::diagonal(wrong_trace)}, el::ValidationError);
  const double negative[] = {1.1, -0.1};
  EXPECT_THROW(el::DensityMatrix{ComplexMatrix::diagonal(negative)}, el::ValidationError);
  const double drift[] = {1.0 + 5e-11, -5e-11};
  const el::DensityMatrix d{ComplexMatrix::diagonal(drift)};
  EXPECT_EQ(d.probabilities()[1], 0.0);
}

TEST(VonNeumannEntropy, Examples) {
  el::Rng rng(4);
  for (std::size_t n = 1; n <= 6; ++n) {
    EXPECT_NEAR(el::von_neumann_entropy(el::DensityMatrix(el::random_pure_density(rng, n))), 0.0, 1e-12);
    EXPECT_NEAR(el::von_neumann_entropy(el::maximally_mixed(n)), std::log(static_cast<double>(n)), 1e-14);
  }
  const double d[] = {0.5, 0.3, 0.2};
  const ComplexMatrix rotated = el::conjugate_by(el::random_unitary(rng, 3), ComplexMatrix::diagonal(d));
  EXPECT_NEAR(el::von_neumann_entropy(el::DensityMatrix(rotated)), 1.0296530140645735274, 1e-12);
}

TEST(VonNeumannEntropy, ComplexOffDiagonal) {
  const ComplexMatrix d{{Complex{0.6, 0}, Complex{0.2, 0.1}}, {Complex{0.2, -0.1}, Complex{0.4, 0}}};
  EXPECT_NEAR(el::von_neumann_entropy(el::DensityMatrix(d)), 0.56781653115280416042, 1e-13);
}

TEST(VonNeumannEntropy, UnitaryInvariance) {
  el::Rng rng(31);
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = 2 + k % 6;
    const ComplexMatrix d = el::random_density(rng, n);
    const ComplexMatrix u = el::random_unitary(rng, n);
    EXPECT_NEAR(el::von_neumann_entropy(el::DensityMatrix(d)),
                el::von_neumann_entropy(el::DensityMatrix(el::conjugate_by(u, d))), 1e-9);
  }
}

TEST(SpectralDecomposition, ProjectionsResolveIdentity) {
  el::Rng rng(12);
  for (int k = 0; k < 50; ++k) {
    const std::size_t n = 1 + k % 7;
    const el::DensityMatrix d(el::random_density(rng, n));
    ComplexMatrix total(n);
    for (const auto& p : d.spectrum().projections) total = total + p;
    EXPECT_LE(el::distance(total, ComplexMatrix::identity(n)), 1e-9);
    EXPECT_LE(el::distance(d.spectrum().reconstruct(), d.matrix()), 1e-9);
  }
}

TEST(DensityMatrix, WithBasisChecksTheBasis) {
  const double d[] = {0.5, 0.5};
  const ComplexMatrix m = ComplexMatrix::diagonal(d);
  const double s = 1.0 / std::sqrt(2.0);
  const ComplexMatrix h{{Complex{s, 0}, Complex{s, 0}}, {Complex{s, 0}, Complex{-s, 0}}};
  EXPECT_NO_THROW(el::DensityMatrix::with_basis(m, h));
  const double e[] = {0.7, 0.3};
  EXPECT_THROW(el::DensityMatrix::with_basis(ComplexMatrix::diagonal(e), h), el::ValidationError);
}

TEST(DensityMatrix, SharedSpectrumAcrossThreads) {
  el::Rng rng(6);
  const el::DensityMatrix d(el::random_density(rng, 5));
  std::vector<double> seen(4);
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < seen.size(); ++t)
    pool.emplace_back([&, t] { seen[t] = el::von_neumann_entropy(el::DensityMatrix(d)); });
  for (auto& t : pool) t.join();
  for (double s : seen) EXPECT_EQ(s, seen.front());
}

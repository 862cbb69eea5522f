#include <gtest/gtest.h>

#include "entropylab/eigen.hpp"
#include "entropylab/random.hpp"

namespace el = entropylab;
using el::Complex;
using el::ComplexMatrix;

TEST(HermitianEig, Identity) {
  const auto eig = el::hermitian_eig(ComplexMatrix::identity(3));
  for (double v : eig.values) EXPECT_DOUBLE_EQ(v, 1.0);
}

TEST(HermitianEig, DiagonalInputIsSortedWithPermutedBasis) {
  const double d[] = {0.2, 0.5, 0.3};
  const auto eig = el::hermitian_eig(ComplexMatrix::diagonal(d));
  EXPECT_DOUBLE_EQ(eig.values[0], 0.5);
  EXPECT_DOUBLE_EQ(eig.values[1], 0.3);
  EXPECT_DOUBLE_EQ(eig.values[2], 0.2);
  EXPECT_EQ(eig.projection(0), ComplexMatrix::unit(3, 1, 1));
  EXPECT_EQ(eig.projection(1), ComplexMatrix::unit(3, 2, 2));
  EXPECT_EQ(eig.projection(2), ComplexMatrix::unit(3, 0, 0));
}

TEST(HermitianEig, TwoByTwo) {
  const ComplexMatrix m{{Complex{2, 0}, Complex{1, 0}}, {Complex{1, 0}, Complex{2, 0}}};
  const auto eig = el::hermitian_eig(m);
  EXPECT_NEAR(eig.values[0], 3.0, 1e-14);
  EXPECT_NEAR(eig.values[1], 1.0, 1e-14);
}

TEST(HermitianEig, RejectsNonHermitian) {
  const ComplexMatrix m{{Complex{1, 0}, Complex{1, 0}}, {Complex{0, 0}, Complex{1, 0}}};
  EXPECT_THROW(el::hermitian_eig(m), el::ValidationError);
}

TEST(HermitianEig, NonConvergenceReportsResidual) {
  el::Rng rng(2);
  el::JacobiOptions opts;
  opts.max_sweeps = 1;
  const ComplexMatrix m = el::random_hermitian(rng, 8);
  try {
    el::hermitian_eig(m, opts);
    FAIL() << "expected ConvergenceError";
  } catch (const el::ConvergenceError& e) {
    EXPECT_GT(e.residual(), 0.0);
  }
}

TEST(HermitianEig, PhaseConvention) {
  el::Rng rng(17);
  const auto eig = el::hermitian_eig(el::random_hermitian(rng, 5));
  for (std::size_t i = 0; i < 5; ++i) {
    const auto v = eig.vector(i);
    for (const Complex& z : v) {
      if (std::abs(z) > 1e-8) {
        EXPECT_EQ(z.imag(), 0.0);
        EXPECT_GT(z.real(), 0.0);
        break;
      }
    }
  }
}

TEST(HermitianEig, SpectralIdentitiesOnRandomMatrices) {
  el::Rng rng(42);
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = 1 + k % 8;
    const ComplexMatrix m = el::random_hermitian(rng, n);
    const auto eig = el::hermitian_eig(m);
    double sum = 0.0;
    double squares = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i + 1 < n) {
        EXPECT_GE(eig.values[i], eig.values[i + 1]);
      }
      sum += eig.values[i];
      squares += eig.values[i] * eig.values[i];
    }
    const double fro = el::frobenius_norm(m);
    EXPECT_NEAR(sum, el::trace(m).real(), 1e-9);
    EXPECT_NEAR(squares, fro * fro, 1e-9);
    EXPECT_LE(el::distance(eig.reconstruct(), m), 1e-9 * std::max(1.0, fro));
    EXPECT_LE(el::unitarity_residual(eig.vectors), 1e-10);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const ComplexMatrix prod = el::matmul(eig.projection(i), eig.projection(j));
        const ComplexMatrix want = i == j ? eig.projection(i) : ComplexMatrix(n);
        EXPECT_LE(el::distance(prod, want), 1e-9);
      }
  }
}

TEST(HermitianEig, Deterministic) {
  el::Rng a(99);
  el::Rng b(99);
  const ComplexMatrix m1 = el::random_hermitian(a, 6);
  const ComplexMatrix m2 = el::random_hermitian(b, 6);
  ASSERT_EQ(m1, m2);
  const auto e1 = el::hermitian_eig(m1);
  const auto e2 = el::hermitian_eig(m2);
  EXPECT_EQ(e1.values, e2.values);
  EXPECT_EQ(e1.vectors, e2.vectors);
}

TEST(HermitianEig, DegenerateGroupOrderedByModuli) {
  // diag(1, 1, 0) rotated inside the leading eigenspace.
  const double s = 1.0 / std::sqrt(2.0);
  const ComplexMatrix u{{Complex{s, 0}, Complex{s, 0}, Complex{0, 0}},
                        {Complex{s, 0}, Complex{-s, 0}, Complex{0, 0}},
                        {Complex{0, 0}, Complex{0, 0}, Complex{1, 0}}};
  const double d[] = {1.0, 1.0, 0.0};
  const auto eig = el::hermitian_eig(el::conjugate_by(u, ComplexMatrix::diagonal(d)));
  EXPECT_NEAR(eig.values[0], 1.0, 1e-14);
  EXPECT_NEAR(eig.values[1], 1.0, 1e-14);
  const auto v0 = eig.vector(0);
  const auto v1 = eig.vector(1);
  for (std::size_t r = 0; r < 3; ++r) {
    if (std::abs(std::abs(v0[r]) - std::abs(v1[r])) > 1e-12) {
      EXPECT_GT(std::abs(v0[r]), std::abs(v1[r]));
      break;
    }
  }
}

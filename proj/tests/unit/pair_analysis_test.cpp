#include <gtest/gtest.h>

#include <cmath>

#include "entropylab/channel.hpp"
#include "entropylab/generate.hpp"
#include "entropylab/pair_analysis.hpp"
#include "entropylab/random.hpp"

namespace el = entropylab;
using el::Complex;
using el::ComplexMatrix;

namespace {

el::DensityMatrix diag_state(std::initializer_list<double> d) {
  const std::vector<double> v(d);
  return el::DensityMatrix(ComplexMatrix::diagonal(v));
}

}  // namespace

TEST(Analyze, IdentityChannel) {
  el::Rng rng(1);
  const el::DensityMatrix rho(el::random_density(rng, 4));
  const auto pair = el::analyze(rho, el::identity_map(4));
  EXPECT_NEAR(pair.entropies.row_weighted, 0.0, 1e-12);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_NEAR(pair.lambda()[i], pair.mu()[i], 1e-12);
    EXPECT_EQ(pair.index.columns[i], std::vector<std::size_t>{i});
  }
  EXPECT_EQ(pair.index.support.size(), 4u);
  const auto clusters = el::lambda_cluster_constants(pair);
  for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(clusters.values[j], pair.lambda()[j], 1e-12);
}

TEST(Analyze, PureStateDepolarizing) {
  for (std::size_t n = 2; n <= 5; ++n) {
    const auto pair = el::analyze(el::pure_state(ComplexMatrix::identity(n).column(0)), el::depolarizing(n));
    const double ln = std::log(static_cast<double>(n));
    EXPECT_NEAR(pair.entropies.averaged_out, ln, 1e-12);
    EXPECT_NEAR(pair.entropies.row_weighted, ln, 1e-12);
    EXPECT_NEAR(pair.entropies.output, ln, 1e-12);
    EXPECT_NEAR(pair.entropies.column_weighted, ln, 1e-12);
    EXPECT_NEAR(pair.entropies.averaged_in, ln, 1e-12);
    EXPECT_EQ(pair.index.support, std::vector<std::size_t>{0});
    for (std::size_t j = 0; j < n; ++j) {
      EXPECT_NEAR(pair.mu()[j], 1.0 / n, 1e-12);
      EXPECT_NEAR(pair.b(0, j), 1.0 / n, 1e-12);
      EXPECT_EQ(pair.index.columns[j].size(), n);
    }
  }
}

TEST(Analyze, WeightedIsometryReference) {
  const ComplexMatrix id2 = ComplexMatrix::identity(2);
  const el::BistochasticMatrix a(2, {0.7, 0.3, 0.3, 0.7});
  const auto phi = el::weighted_isometry_map(a, id2, id2);
  const auto pair = el::analyze(diag_state({0.8, 0.2}), phi);
  EXPECT_NEAR(pair.mu()[0], 0.62, 1e-14);
  EXPECT_NEAR(pair.mu()[1], 0.38, 1e-14);
  EXPECT_NEAR(pair.b(0, 0), 0.7, 1e-14);
  EXPECT_NEAR(pair.b(0, 1), 0.3, 1e-14);

  const auto half = el::analyze_with_bases(ComplexMatrix::diagonal(std::vector<double>{0.5, 0.5}), phi, id2, id2);
  EXPECT_NEAR(el::weighted_entropy_row(half), 0.61086430205489346303, 1e-14);
  EXPECT_NEAR(el::weighted_entropy_col(half), 0.61086430205489346303, 1e-14);
}

TEST(Analyze, EntropyTargetPureState) {
  const ComplexMatrix id3 = ComplexMatrix::identity(3);
  const auto phi = el::entropy_target_map(id3, el::ProbabilityVector({0.5, 0.5, 0.0}));
  const auto pair = el::analyze(diag_state({1.0, 0.0, 0.0}), phi);
  EXPECT_NEAR(pair.entropies.averaged_out, 0.69314718055994530942, 1e-14);
}

TEST(Analyze, UnitaryConjugationExamples) {
  el::Rng rng(2);
  const el::DensityMatrix rho(el::random_density(rng, 4));
  const auto pair = el::analyze(rho, el::unitary_conjugation(el::random_unitary(rng, 4)));
  EXPECT_NEAR(pair.entropies.row_weighted, 0.0, 1e-10);
  EXPECT_NEAR(pair.entropies.averaged_out, 0.0, 1e-10);
  const auto clusters = el::lambda_cluster_constants(pair);
  EXPECT_TRUE(clusters.all_constant());
  for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(clusters.values[j], pair.mu()[j], 1e-10);
}

TEST(Analyze, TransposeAdjointAverage) {
  const auto pair = el::analyze(diag_state({0.5, 0.3, 0.2}), el::transpose_map(3));
  EXPECT_NEAR(el::averaged_entropy_in(pair), el::averaged_entropy_out(pair), 1e-12);
}

TEST(Analyze, EntropyIncreasingMapBreaksConstancy) {
  el::Rng rng(3);
  const el::DensityMatrix rho(el::random_density(rng, 3));
  const auto pair = el::analyze(rho, el::conditional_expectation_in_basis(el::random_unitary(rng, 3)));
  const auto clusters = el::lambda_cluster_constants(pair);
  EXPECT_FALSE(clusters.entropy_preserved);
  EXPECT_FALSE(clusters.all_constant());
}

TEST(Analyze, DimensionMismatchAndInvalidOutput) {
  EXPECT_THROW(el::analyze(diag_state({0.5, 0.5}), el::depolarizing(3)), el::DimensionError);
  // A map that is not positive: x -> 2 diag(x) - (Tr x / n) I
  const auto bad = el::transfer_raw(2, el::transfer_from_action(2, [](const ComplexMatrix& x) {
    ComplexMatrix out(2);
    const Complex half = el::trace(x) * 0.5;
    out(0, 0) = 2.0 * x(0, 0) - half;
    out(1, 1) = 2.0 * x(1, 1) - half;
    return out;
  }));
  EXPECT_THROW(el::analyze(diag_state({1.0, 0.0}), bad), el::ValidationError);
}

TEST(IndexSets, RejectsEmptyColumn) {
  // Not bistochastic in column 1; bypasses the constructor sum check.
  const el::BistochasticMatrix b(2, {1.0, 0.0, 1.0, 0.0}, 2.0);
  EXPECT_THROW(el::index_sets(el::ProbabilityVector({0.5, 0.5}), b), el::ValidationError);
}

class RandomPairs : public ::testing::TestWithParam<std::string> {};

TEST_P(RandomPairs, StructuralInvariants) {
  for (std::size_t k = 0; k < 60; ++k) {
    const std::size_t n = 2 + k % 5;
    const auto inst = el::generate_instance(GetParam(), n, el::derive_seed(77, k));
    const auto pair = el::analyze(el::DensityMatrix(inst.state), inst.channel);
    const auto& t = pair.entropies;
    EXPECT_LE(pair.b.sum_residual(), 1e-9);
    EXPECT_GE(pair.b.min_entry(), -1e-12);
    EXPECT_LE(el::transport_residual(pair), 1e-8);
    EXPECT_LE(el::connecting_residual(pair), 1e-8);
    EXPECT_LE(t.averaged_out, t.row_weighted + 1e-8);
    EXPECT_LE(t.row_weighted, t.output + 1e-8);
    EXPECT_LE(t.output, t.state + t.averaged_out + 1e-8);
    EXPECT_LE(t.state, t.output + 1e-8);

    // H^lambda equals the lambda-average of S(E_B(Phi(e_i))).
    const auto pinch = el::conditional_expectation(pair.p_projs());
    double through_pinch = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      through_pinch += pair.lambda()[i] * el::von_neumann_entropy(el::DensityMatrix(el::apply(pinch, pair.phi_e[i])));
    EXPECT_NEAR(t.row_weighted, through_pinch, 1e-8);
    // ... and H_mu the mu-average of S(E_A(Phi*(p_j))).
    const auto pinch_a = el::conditional_expectation(pair.e_projs());
    double through_a = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      through_a += pair.mu()[j] * el::von_neumann_entropy(el::DensityMatrix(el::apply(pinch_a, pair.adjoint_p[j])));
    EXPECT_NEAR(t.column_weighted, through_a, 1e-8);
  }
}

INSTANTIATE_TEST_SUITE_P(AllKinds, RandomPairs,
                         ::testing::Values("unitary-conj", "depolarizing", "transpose", "cond-exp", "weighted-isometry",
                                           "entropy-target", "random-state", "random-bistochastic"),
                         [](const auto& info) {
                           std::string s = info.param;
                           for (char& c : s)
                             if (c == '-') c = '_';
                           return s;
                         });

TEST(Analyze, PermutingDegenerateBranchesKeepsEntropies) {
  // D = diag(.4, .4, .2) has a two-fold eigenvalue; swapping the two branches
  // of the supplied basis must not change the four entropy functionals.
  el::Rng rng(4);
  for (int k = 0; k < 20; ++k) {
    const ComplexMatrix u = el::random_unitary(rng, 3);
    const ComplexMatrix d = el::conjugate_by(u, ComplexMatrix::diagonal(std::vector<double>{0.4, 0.4, 0.2}));
    const auto phi = el::convex_combination({0.5, 0.5}, {el::transpose_map(3), el::unitary_conjugation(el::random_unitary(rng, 3))});
    const auto base = el::analyze(el::DensityMatrix(d), phi);
    ComplexMatrix swapped = base.rho.spectrum().vectors;
    for (std::size_t r = 0; r < 3; ++r) std::swap(swapped(r, 0), swapped(r, 1));
    const auto other = el::analyze_with_bases(d, phi, swapped, base.output.spectrum().vectors);
    EXPECT_NEAR(base.entropies.row_weighted, other.entropies.row_weighted, 1e-8);
    EXPECT_NEAR(base.entropies.column_weighted, other.entropies.column_weighted, 1e-8);
    EXPECT_NEAR(base.entropies.averaged_out, other.entropies.averaged_out, 1e-8);
    EXPECT_NEAR(base.entropies.averaged_in, other.entropies.averaged_in, 1e-8);
  }
}

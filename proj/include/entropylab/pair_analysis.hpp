#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "entropylab/bistochastic.hpp"
#include "entropylab/channel.hpp"
#include "entropylab/density.hpp"
#include "entropylab/entropy.hpp"
#include "entropylab/matrix.hpp"

namespace entropylab {

/// Membership threshold for the supports I_j and J_lambda.
inline constexpr double kZeroThreshold = 1e-9;

/// The six entropy functionals of a pair, in nats.
struct EntropyTable {
  double state = 0.0;            // S(rho)
  double output = 0.0;           // S(rho o Phi*) = S(Phi(D_rho))
  double row_weighted = 0.0;     // H^lambda(b)
  double column_weighted = 0.0;  // H_mu(b)
  double averaged_out = 0.0;     // S_rho(Phi) = sum_i lambda_i S(Phi(e_i))
  double averaged_in = 0.0;      // S^rho(Phi*) = sum_j mu_j S(Phi*(p_j))
};

struct IndexSets {
  std::vector<std::vector<std::size_t>> columns;  // I_j = {i : b_ij > 0}
  std::vector<std::size_t> support;               // J_lambda = {k : lambda_k > 0}
};

/// Everything derived from one (state, map) pair. `e` and `p` are the
/// eigenprojections of D_rho and Phi(D_rho) paired with the sorted spectra
/// lambda and mu.
struct PairAnalysis {
  DensityMatrix rho;
  PutMap phi;
  DensityMatrix output;  // Phi(D_rho)
  ComplexMatrix adjoint_output;  // Phi* Phi(D_rho)
  std::vector<ComplexMatrix> phi_e;      // Phi(e_i)
  std::vector<ComplexMatrix> adjoint_p;  // Phi*(p_j)
  BistochasticMatrix b;
  ComplexMatrix connecting_unitary;  // sum_i |p_i><e_i|
  IndexSets index;
  EntropyTable entropies;

  std::size_t dim() const noexcept { return rho.dim(); }
  const ProbabilityVector& lambda() const noexcept { return rho.probabilities(); }
  const ProbabilityVector& mu() const noexcept { return output.probabilities(); }
  const std::vector<ComplexMatrix>& e_projs() const noexcept { return rho.spectrum().projections; }
  const std::vector<ComplexMatrix>& p_projs() const noexcept { return output.spectrum().projections; }
};

namespace detail {

inline double averaged_entropy(const ProbabilityVector& weights, const std::vector<ComplexMatrix>& images,
                               const char* who) {
  double s = 0.0;
  for (std::size_t i = 0; i < images.size(); ++i) {
    try {
      s += weights[i] * von_neumann_entropy(DensityMatrix(images[i]));
    } catch (const ValidationError& e) {
      throw ValidationError(std::string(who) + ": image " + std::to_string(i) + " is not a density matrix: " + e.what());
    }
  }
  return s;
}

}  // namespace detail

/// H^lambda(b) = sum_i lambda_i sum_j eta(b_ij)
inline double weighted_entropy_row(const ProbabilityVector& lambda, const BistochasticMatrix& b) {
  double h = 0.0;
  for (std::size_t i = 0; i < b.dim(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < b.dim(); ++j) row += eta(b(i, j));
    h += lambda[i] * row;
  }
  return h;
}

/// H_mu(b) = sum_j mu_j sum_i eta(b_ij)
inline double weighted_entropy_col(const ProbabilityVector& mu, const BistochasticMatrix& b) {
  double h = 0.0;
  for (std::size_t j = 0; j < b.dim(); ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < b.dim(); ++i) col += eta(b(i, j));
    h += mu[j] * col;
  }
  return h;
}

inline double weighted_entropy_row(const PairAnalysis& pair) { return weighted_entropy_row(pair.lambda(), pair.b); }
inline double weighted_entropy_col(const PairAnalysis& pair) { return weighted_entropy_col(pair.mu(), pair.b); }

/// S_rho(Phi) = sum_i lambda_i S(Phi(e_i))
inline double averaged_entropy_out(const PairAnalysis& pair) {
  return detail::averaged_entropy(pair.lambda(), pair.phi_e, "averaged_entropy_out");
}

/// S^rho(Phi*) = sum_j mu_j S(Phi*(p_j))
inline double averaged_entropy_in(const PairAnalysis& pair) {
  return detail::averaged_entropy(pair.mu(), pair.adjoint_p, "averaged_entropy_in");
}

inline IndexSets index_sets(const ProbabilityVector& lambda, const BistochasticMatrix& b,
                            double zero_threshold = kZeroThreshold) {
  const std::size_t n = b.dim();
  IndexSets sets;
  sets.columns.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i)
      if (b(i, j) > zero_threshold) sets.columns[j].push_back(i);
    if (sets.columns[j].empty()) {
      throw ValidationError("index_sets: column " + std::to_string(j) + " of b has no nonzero entry");
    }
  }
  for (std::size_t k = 0; k < n; ++k)
    if (lambda[k] > zero_threshold) sets.support.push_back(k);
  return sets;
}

inline IndexSets index_sets(const PairAnalysis& pair, double zero_threshold = kZeroThreshold) {
  return index_sets(pair.lambda(), pair.b, zero_threshold);
}

namespace detail {

inline PairAnalysis assemble(const DensityMatrix& rho, const PutMap& phi, const DensityMatrix& output) {
  const std::size_t n = rho.dim();
  const PutMap dual = hs_adjoint(phi);
  const auto& e = rho.spectrum().projections;
  const auto& p = output.spectrum().projections;

  std::vector<ComplexMatrix> phi_e;
  std::vector<ComplexMatrix> adjoint_p;
  for (std::size_t i = 0; i < n; ++i) phi_e.push_back(apply(phi, e[i]));
  for (std::size_t j = 0; j < n; ++j) adjoint_p.push_back(apply(dual, p[j]));

  std::vector<double> entries(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) entries[i * n + j] = trace(matmul(phi_e[i], p[j])).real();
  BistochasticMatrix b(n, std::move(entries));

  const ComplexMatrix connecting = matmul(output.spectrum().vectors, adjoint(rho.spectrum().vectors));
  IndexSets sets = index_sets(rho.probabilities(), b);

  PairAnalysis pair{rho,
                    phi,
                    output,
                    apply(dual, output.matrix()),
                    std::move(phi_e),
                    std::move(adjoint_p),
                    std::move(b),
                    connecting,
                    std::move(sets),
                    {}};
  EntropyTable& t = pair.entropies;
  t.state = von_neumann_entropy(pair.rho);
  t.output = von_neumann_entropy(pair.output);
  t.row_weighted = weighted_entropy_row(pair);
  t.column_weighted = weighted_entropy_col(pair);
  t.averaged_out = averaged_entropy_out(pair);
  t.averaged_in = averaged_entropy_in(pair);
  return pair;
}

inline DensityMatrix output_density(const DensityMatrix& rho, const PutMap& phi, const ComplexMatrix* basis) {
  if (phi.dim() != rho.dim()) throw DimensionError("analyze: state and map dimensions differ");
  const ComplexMatrix image = apply(phi, rho.matrix());
  try {
    return basis ? DensityMatrix::with_basis(image, *basis) : DensityMatrix(image);
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("analyze: Phi(D_rho) is not a density matrix: ") + e.what());
  }
}

}  // namespace detail

/// Spectral data of D_rho and Phi(D_rho), b_ij = Tr(Phi(e_i) p_j), the
/// connecting unitary, the supports and all six entropies.
inline PairAnalysis analyze(const DensityMatrix& rho, const PutMap& phi) {
  return detail::assemble(rho, phi, detail::output_density(rho, phi, nullptr));
}

/// As analyze, but with caller-chosen eigenbases (columns, in non-increasing
/// eigenvalue order) for D_rho and Phi(D_rho).
inline PairAnalysis analyze_with_bases(const ComplexMatrix& rho, const PutMap& phi, const ComplexMatrix& e_basis,
                                       const ComplexMatrix& p_basis) {
  const DensityMatrix state = DensityMatrix::with_basis(rho, e_basis);
  return detail::assemble(state, phi, detail::output_density(state, phi, &p_basis));
}

/// || sorted(lambda b) - mu ||_inf
inline double transport_residual(const PairAnalysis& pair) {
  auto moved = pair.b.left_multiply(pair.lambda().weights());
  std::sort(moved.begin(), moved.end(), std::greater<>());
  double worst = 0.0;
  for (std::size_t j = 0; j < moved.size(); ++j) worst = std::max(worst, std::abs(moved[j] - pair.mu()[j]));
  return worst;
}

/// max_i || u e_i u* - p_i ||_F
inline double connecting_residual(const PairAnalysis& pair) {
  double worst = 0.0;
  for (std::size_t i = 0; i < pair.dim(); ++i)
    worst = std::max(worst, distance(conjugate_by(pair.connecting_unitary, pair.e_projs()[i]), pair.p_projs()[i]));
  return worst;
}

struct ClusterConstants {
  std::vector<double> values;     // lambda^(j): mean of lambda_i over I_j
  std::vector<double> spread;     // max_{i in I_j} |lambda_i - lambda^(j)|
  std::vector<bool> constant;     // spread <= tolerance
  bool entropy_preserved = false; // |S(Phi(D)) - S(D)| <= tolerance
  bool all_constant() const { return std::all_of(constant.begin(), constant.end(), std::identity{}); }
};

/// Column averages lambda^(j) of lambda over I_j. When the entropy is
/// preserved, lambda must be constant on every I_j.
inline ClusterConstants lambda_cluster_constants(const PairAnalysis& pair, double tolerance = 1e-8) {
  ClusterConstants out;
  const auto& lambda = pair.lambda();
  for (const auto& cols : pair.index.columns) {
    double mean = 0.0;
    for (std::size_t i : cols) mean += lambda[i];
    mean /= static_cast<double>(cols.size());
    double spread = 0.0;
    for (std::size_t i : cols) spread = std::max(spread, std::abs(lambda[i] - mean));
    out.values.push_back(mean);
    out.spread.push_back(spread);
    out.constant.push_back(spread <= tolerance);
  }
  out.entropy_preserved = std::abs(pair.entropies.output - pair.entropies.state) <= tolerance;
  return out;
}

}  // namespace entropylab

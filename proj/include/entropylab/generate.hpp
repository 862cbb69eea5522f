#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "entropylab/channel.hpp"
#include "entropylab/density.hpp"
#include "entropylab/entropy.hpp"
#include "entropylab/random.hpp"
#include "entropylab/theorems.hpp"

namespace entropylab {

inline constexpr std::array<std::string_view, 8> kGeneratorKinds = {
    "unitary-conj", "depolarizing", "transpose", "cond-exp",
    "weighted-isometry", "entropy-target", "random-state", "random-bistochastic"};

inline bool is_generator_kind(std::string_view kind) {
  for (auto k : kGeneratorKinds)
    if (k == kind) return true;
  return false;
}

enum class StateMode { automatic, mixed, pure };

struct GenerateOptions {
  /// Requested S(Phi(e_1)) for entropy-target; drawn from [0, ln n] when unset.
  std::optional<double> target;
  StateMode state = StateMode::automatic;
};

/// mu(t) = (1 - t) delta_1 + t uniform; H(mu(t)) increases from 0 to ln n.
inline ProbabilityVector interpolated_distribution(std::size_t n, double t) {
  std::vector<double> mu(n, t / static_cast<double>(n));
  mu[0] += 1.0 - t;
  return ProbabilityVector(std::move(mu));
}

/// Distribution on n points with Shannon entropy `target`, found by bisection
/// along mu(t) until the bracket is below 1e-12.
inline ProbabilityVector distribution_with_entropy(std::size_t n, double target) {
  const double top = std::log(static_cast<double>(n));
  if (!(target >= 0.0) || target > top + 1e-12) {
    throw ValidationError("distribution_with_entropy: target outside [0, ln n]");
  }
  if (target <= 0.0) return ProbabilityVector::point_mass(n);
  if (target >= top) return ProbabilityVector::uniform(n);
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (shannon_entropy(interpolated_distribution(n, mid)) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return interpolated_distribution(n, 0.5 * (lo + hi));
}

namespace detail {

inline ComplexMatrix draw_state(Rng& rng, std::size_t n, StateMode mode) {
  return mode == StateMode::pure ? random_pure_density(rng, n) : random_density(rng, n);
}

}  // namespace detail

/// Deterministic instance for (kind, n, seed).
inline Instance generate_instance(std::string_view kind, std::size_t n, std::uint64_t seed,
                                  const GenerateOptions& options = {}) {
  if (n == 0) throw DimensionError("generate: n must be positive");
  Rng rng(seed);
  const std::string label = std::string(kind) + "/n=" + std::to_string(n) + "/seed=" + std::to_string(seed);
  const StateMode mode = options.state;

  if (kind == "unitary-conj") {
    ComplexMatrix state = detail::draw_state(rng, n, mode);
    return {std::move(state), unitary_conjugation(random_unitary(rng, n)), label};
  }
  if (kind == "depolarizing") {
    ComplexMatrix state = detail::draw_state(rng, n, mode);
    return {std::move(state), depolarizing(n), label};
  }
  if (kind == "transpose") {
    ComplexMatrix state = detail::draw_state(rng, n, mode);
    return {std::move(state), transpose_map(n), label};
  }
  if (kind == "cond-exp") {
    ComplexMatrix state = detail::draw_state(rng, n, mode);
    return {std::move(state), conditional_expectation_in_basis(random_unitary(rng, n)), label};
  }
  if (kind == "weighted-isometry") {
    // Isometries start on the eigenbasis of the state.
    ComplexMatrix state = detail::draw_state(rng, n, mode);
    const ComplexMatrix e = DensityMatrix(state).spectrum().vectors;
    const ComplexMatrix p = random_unitary(rng, n);
    const BistochasticMatrix a = random_bistochastic(rng, n);
    return {std::move(state), weighted_isometry_map(a, e, p), label};
  }
  if (kind == "entropy-target") {
    const ComplexMatrix basis = random_unitary(rng, n);
    const double target = options.target ? *options.target : rng.uniform() * std::log(static_cast<double>(n));
    const auto first = basis.column(0);
    return {ComplexMatrix::outer(first, first), entropy_target_map(basis, distribution_with_entropy(n, target)), label};
  }
  if (kind == "random-state") {
    ComplexMatrix state = detail::draw_state(rng, n, mode);
    const PutMap u1 = unitary_conjugation(random_unitary(rng, n));
    const PutMap u2 = unitary_conjugation(random_unitary(rng, n));
    const auto w = random_simplex_point(rng, 3);
    return {std::move(state), convex_combination(w, {u1, u2, transpose_map(n)}), label};
  }
  if (kind == "random-bistochastic") {
    ComplexMatrix state = detail::draw_state(rng, n, mode);
    const ComplexMatrix id = ComplexMatrix::identity(n);
    return {std::move(state), weighted_isometry_map(random_bistochastic(rng, n), id, id), label};
  }
  throw ValidationError("generate: unknown kind \"" + std::string(kind) + "\"");
}

/// Batch instance k: kinds cycle fastest, then dimensions; every instance has
/// its own seed derived from (seed, k).
inline Instance batch_instance(std::size_t k, const std::vector<std::size_t>& dims, std::uint64_t seed,
                               const std::vector<std::string_view>& kinds = {kGeneratorKinds.begin(),
                                                                              kGeneratorKinds.end()},
                               const GenerateOptions& options = {}) {
  const std::string_view kind = kinds[k % kinds.size()];
  const std::size_t n = dims[(k / kinds.size()) % dims.size()];
  return generate_instance(kind, n, derive_seed(seed, k), options);
}

}  // namespace entropylab

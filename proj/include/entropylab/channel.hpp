#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "entropylab/bistochastic.hpp"
#include "entropylab/density.hpp"
#include "entropylab/eigen.hpp"
#include "entropylab/entropy.hpp"
#include "entropylab/matrix.hpp"
#include "entropylab/random.hpp"

namespace entropylab {

class PutMap;

/// How a map was built. Built-in constructions are positive by construction;
/// raw transfer matrices are only sample-tested.
namespace provenance {
struct Transpose {};
struct UnitaryConjugation {
  ComplexMatrix u;
};
struct ConditionalExpectation {
  std::vector<ComplexMatrix> projections;
};
struct Depolarizing {};
/// x -> sum_ij a_ij v_ij x v_ij*, with v stored row-major (v[i * n + j]).
struct WeightedIsometry {
  BistochasticMatrix a;
  std::vector<ComplexMatrix> v;
};
/// x -> sum_{k,j} mu_{(j+k) mod n} v_jk x v_jk*, v_jk = |e_j><e_k|.
struct EntropyTarget {
  std::vector<ComplexMatrix> basis;
  std::vector<double> mu;
};
struct TransferRaw {};
struct ConvexCombination {
  std::vector<double> weights;
  std::vector<std::shared_ptr<const PutMap>> components;
};
/// outer after inner
struct Composed {
  std::shared_ptr<const PutMap> outer;
  std::shared_ptr<const PutMap> inner;
};
}  // namespace provenance

using Provenance =
    std::variant<provenance::Transpose, provenance::UnitaryConjugation, provenance::ConditionalExpectation,
                 provenance::Depolarizing, provenance::WeightedIsometry, provenance::EntropyTarget,
                 provenance::TransferRaw, provenance::ConvexCombination, provenance::Composed>;

/// Index of matrix entry (row, col) in the column-stacked vectorization.
inline std::size_t vec_index(std::size_t n, std::size_t row, std::size_t col) { return col * n + row; }

/// A linear map on M_n(C) stored as its n^2 x n^2 transfer matrix acting on
/// column-stacked matrices, together with how it was built.
class PutMap {
 public:
  PutMap(std::size_t n, ComplexMatrix transfer, Provenance provenance)
      : n_(n), transfer_(std::move(transfer)), provenance_(std::move(provenance)) {
    if (n == 0 || transfer_.dim() != n * n) {
      throw DimensionError("PutMap: transfer matrix must be n^2 x n^2");
    }
  }

  std::size_t dim() const noexcept { return n_; }
  const ComplexMatrix& transfer() const noexcept { return transfer_; }
  const Provenance& provenance() const noexcept { return provenance_; }

  std::string_view kind() const {
    return std::visit(
        [](const auto& p) -> std::string_view {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, provenance::Transpose>) return "transpose";
          if constexpr (std::is_same_v<T, provenance::UnitaryConjugation>) return "unitary-conj";
          if constexpr (std::is_same_v<T, provenance::ConditionalExpectation>) return "cond-exp";
          if constexpr (std::is_same_v<T, provenance::Depolarizing>) return "depolarizing";
          if constexpr (std::is_same_v<T, provenance::WeightedIsometry>) return "weighted-isometry";
          if constexpr (std::is_same_v<T, provenance::EntropyTarget>) return "entropy-target";
          if constexpr (std::is_same_v<T, provenance::TransferRaw>) return "transfer-raw";
          if constexpr (std::is_same_v<T, provenance::ConvexCombination>) return "convex-combo";
          if constexpr (std::is_same_v<T, provenance::Composed>) return "composed";
        },
        provenance_);
  }

  /// False when any ingredient is a raw transfer matrix.
  bool positivity_certified() const {
    return std::visit(
        [](const auto& p) -> bool {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, provenance::TransferRaw>) {
            return false;
          } else if constexpr (std::is_same_v<T, provenance::ConvexCombination>) {
            return std::all_of(p.components.begin(), p.components.end(),
                               [](const auto& c) { return c->positivity_certified(); });
          } else if constexpr (std::is_same_v<T, provenance::Composed>) {
            return p.outer->positivity_certified() && p.inner->positivity_certified();
          } else {
            return true;
          }
        },
        provenance_);
  }

  bool is_conditional_expectation() const {
    return std::holds_alternative<provenance::ConditionalExpectation>(provenance_);
  }

 private:
  std::size_t n_;
  ComplexMatrix transfer_;
  Provenance provenance_;
};

inline ComplexMatrix apply(const PutMap& phi, const ComplexMatrix& x) {
  const std::size_t n = phi.dim();
  if (x.dim() != n) throw DimensionError("apply: map acts on dimension " + std::to_string(n));
  const ComplexMatrix& t = phi.transfer();
  ComplexMatrix out(n);
  for (std::size_t oc = 0; oc < n; ++oc)
    for (std::size_t orow = 0; orow < n; ++orow) {
      const std::size_t r = vec_index(n, orow, oc);
      Complex s{};
      for (std::size_t c = 0; c < n; ++c)
        for (std::size_t row = 0; row < n; ++row) s += t(r, vec_index(n, row, c)) * x(row, c);
      out(orow, oc) = s;
    }
  return out;
}

/// Transfer matrix of an arbitrary linear action, column k = vec(f(E_k)).
inline ComplexMatrix transfer_from_action(std::size_t n, const std::function<ComplexMatrix(const ComplexMatrix&)>& f) {
  ComplexMatrix t(n * n);
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t row = 0; row < n; ++row) {
      const ComplexMatrix image = f(ComplexMatrix::unit(n, row, c));
      const std::size_t k = vec_index(n, row, c);
      for (std::size_t oc = 0; oc < n; ++oc)
        for (std::size_t orow = 0; orow < n; ++orow) t(vec_index(n, orow, oc), k) = image(orow, oc);
    }
  return t;
}

namespace detail {

inline constexpr double kProjectionTolerance = 1e-9;

// Worst deviation of a family from being n mutually orthogonal rank-one
// Hermitian idempotents summing to I.
inline double projection_family_residual(const std::vector<ComplexMatrix>& ps, std::size_t n) {
  double worst = 0.0;
  ComplexMatrix sum(n);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const auto& p = ps[i];
    worst = std::max({worst, hermiticity_residual(p), distance(matmul(p, p), p),
                      std::abs(trace(p) - Complex{1.0, 0.0})});
    for (std::size_t j = i + 1; j < ps.size(); ++j) worst = std::max(worst, frobenius_norm(matmul(p, ps[j])));
    sum = sum + p;
  }
  return std::max(worst, distance(sum, ComplexMatrix::identity(n)));
}

inline void require_projection_family(const std::vector<ComplexMatrix>& ps, std::size_t n, const char* who) {
  if (ps.size() != n) {
    throw ValidationError(std::string(who) + ": expected " + std::to_string(n) + " projections, got " +
                          std::to_string(ps.size()));
  }
  for (const auto& p : ps)
    if (p.dim() != n) throw DimensionError(std::string(who) + ": projection dimension mismatch");
  const double res = projection_family_residual(ps, n);
  if (res > kProjectionTolerance) {
    throw ValidationError(std::string(who) + ": not a complete family of minimal orthogonal projections (residual " +
                          std::to_string(res) + ")");
  }
}

inline std::vector<ComplexMatrix> column_projections(const ComplexMatrix& basis) {
  std::vector<ComplexMatrix> ps;
  for (std::size_t k = 0; k < basis.dim(); ++k) {
    const auto v = basis.column(k);
    ps.push_back(ComplexMatrix::outer(v, v));
  }
  return ps;
}

// Unit vector spanning a rank-one projection, taken from its heaviest column.
inline std::vector<Complex> spanning_vector(const ComplexMatrix& p) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < p.dim(); ++k)
    if (p(k, k).real() > p(best, best).real()) best = k;
  auto v = p.column(best);
  const double norm = std::sqrt(p(best, best).real());
  for (auto& z : v) z /= norm;
  return v;
}

}  // namespace detail

inline PutMap unitary_conjugation(const ComplexMatrix& u) {
  const double res = unitarity_residual(u);
  if (res > 1e-10) throw ValidationError("unitary_conjugation: input not unitary (residual " + std::to_string(res) + ")");
  const std::size_t n = u.dim();
  const ComplexMatrix u_adj = adjoint(u);
  auto t = transfer_from_action(n, [&](const ComplexMatrix& x) { return matmul(matmul(u, x), u_adj); });
  return PutMap(n, std::move(t), provenance::UnitaryConjugation{u});
}

inline PutMap identity_map(std::size_t n) { return unitary_conjugation(ComplexMatrix::identity(n)); }

inline PutMap transpose_map(std::size_t n) {
  auto t = transfer_from_action(n, [](const ComplexMatrix& x) { return transpose(x); });
  return PutMap(n, std::move(t), provenance::Transpose{});
}

/// x -> (Tr x / n) I
inline PutMap depolarizing(std::size_t n) {
  const ComplexMatrix id = ComplexMatrix::identity(n);
  auto t = transfer_from_action(n, [&](const ComplexMatrix& x) { return scale(trace(x) / static_cast<double>(n), id); });
  return PutMap(n, std::move(t), provenance::Depolarizing{});
}

/// Pinching x -> sum_j Tr(p_j x) p_j onto the algebra generated by `projections`.
inline PutMap conditional_expectation(const std::vector<ComplexMatrix>& projections) {
  if (projections.empty()) throw ValidationError("conditional_expectation: empty projection family");
  const std::size_t n = projections.front().dim();
  detail::require_projection_family(projections, n, "conditional_expectation");
  auto t = transfer_from_action(n, [&](const ComplexMatrix& x) {
    ComplexMatrix out(n);
    for (const auto& p : projections) out = out + scale(trace(matmul(p, x)), p);
    return out;
  });
  return PutMap(n, std::move(t), provenance::ConditionalExpectation{projections});
}

/// Pinching onto the span of the columns of a unitary.
inline PutMap conditional_expectation_in_basis(const ComplexMatrix& basis) {
  return conditional_expectation(detail::column_projections(basis));
}

/// x -> sum_ij a_ij v_ij x v_ij*, where v_ij* v_ij = e_j and v_ij v_ij* = p_i
/// for complete minimal projection families {e_j}, {p_i}. Then
/// Phi(e_i) = sum_j a_ji p_j.
inline PutMap weighted_isometry_map(const BistochasticMatrix& a, const std::vector<ComplexMatrix>& v) {
  const std::size_t n = a.dim();
  if (a.sum_residual() > 1e-10) throw ValidationError("weighted_isometry_map: weights are not bistochastic");
  if (v.size() != n * n) throw ValidationError("weighted_isometry_map: need n^2 partial isometries");
  for (const auto& m : v)
    if (m.dim() != n) throw DimensionError("weighted_isometry_map: partial isometry dimension mismatch");

  std::vector<ComplexMatrix> initial;
  std::vector<ComplexMatrix> final_;
  for (std::size_t j = 0; j < n; ++j) initial.push_back(matmul(adjoint(v[j]), v[j]));
  for (std::size_t i = 0; i < n; ++i) final_.push_back(matmul(v[i * n], adjoint(v[i * n])));
  detail::require_projection_family(initial, n, "weighted_isometry_map (initial projections)");
  detail::require_projection_family(final_, n, "weighted_isometry_map (final projections)");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const auto& vij = v[i * n + j];
      const double res = std::max(distance(matmul(adjoint(vij), vij), initial[j]),
                                  distance(matmul(vij, adjoint(vij)), final_[i]));
      if (res > detail::kProjectionTolerance) {
        throw ValidationError("weighted_isometry_map: v_" + std::to_string(i) + std::to_string(j) +
                              " violates the partial isometry relations");
      }
    }

  auto t = transfer_from_action(n, [&](const ComplexMatrix& x) {
    ComplexMatrix out(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const double w = a(i, j);
        if (w == 0.0) continue;
        out = out + w * conjugate_by(v[i * n + j], x);
      }
    return out;
  });
  return PutMap(n, std::move(t), provenance::WeightedIsometry{a, v});
}

/// Partial isometries v_ij = |p_i><e_j| from the columns of two unitaries.
inline std::vector<ComplexMatrix> matrix_unit_isometries(const ComplexMatrix& e_basis, const ComplexMatrix& p_basis) {
  const std::size_t n = e_basis.dim();
  std::vector<ComplexMatrix> v;
  v.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) v.push_back(ComplexMatrix::outer(p_basis.column(i), e_basis.column(j)));
  return v;
}

inline PutMap weighted_isometry_map(const BistochasticMatrix& a, const ComplexMatrix& e_basis,
                                    const ComplexMatrix& p_basis) {
  return weighted_isometry_map(a, matrix_unit_isometries(e_basis, p_basis));
}

/// Map sending e_1 to sum_j mu_j e_j, so S(Phi(e_1)) = H(mu). Matrix-unit
/// phases are fixed by taking v_jk = |e_j><e_k| with each e spanned by the
/// heaviest column of its projection.
inline PutMap entropy_target_map(const std::vector<ComplexMatrix>& basis, const ProbabilityVector& mu) {
  if (basis.empty()) throw ValidationError("entropy_target_map: empty basis");
  const std::size_t n = basis.front().dim();
  detail::require_projection_family(basis, n, "entropy_target_map");
  if (mu.size() != n) throw DimensionError("entropy_target_map: mu must have n entries");
  std::vector<std::vector<Complex>> vecs;
  for (const auto& p : basis) vecs.push_back(detail::spanning_vector(p));
  auto t = transfer_from_action(n, [&](const ComplexMatrix& x) {
    ComplexMatrix out(n);
    for (std::size_t k = 0; k < n; ++k) {
      // v_jk x v_jk* = <e_k|x|e_k> |e_j><e_j|
      Complex xkk{};
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) xkk += std::conj(vecs[k][r]) * x(r, c) * vecs[k][c];
      for (std::size_t j = 0; j < n; ++j)
        out = out + scale(mu[(j + k) % n] * xkk, ComplexMatrix::outer(vecs[j], vecs[j]));
    }
    return out;
  });
  return PutMap(n, std::move(t), provenance::EntropyTarget{basis, std::vector<double>(mu.weights().begin(), mu.weights().end())});
}

inline PutMap entropy_target_map(const ComplexMatrix& basis, const ProbabilityVector& mu) {
  return entropy_target_map(detail::column_projections(basis), mu);
}

/// Raw transfer matrix; positivity is only checked by validate_put sampling.
inline PutMap transfer_raw(std::size_t n, ComplexMatrix transfer) {
  return PutMap(n, std::move(transfer), provenance::TransferRaw{});
}

inline PutMap convex_combination(const std::vector<double>& weights, const std::vector<PutMap>& maps) {
  if (weights.size() != maps.size() || maps.empty()) {
    throw ValidationError("convex_combination: need one weight per map");
  }
  const std::size_t n = maps.front().dim();
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw ValidationError("convex_combination: negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ValidationError("convex_combination: weights must sum to 1");
  ComplexMatrix t(n * n);
  provenance::ConvexCombination prov;
  for (std::size_t k = 0; k < maps.size(); ++k) {
    if (maps[k].dim() != n) throw DimensionError("convex_combination: dimension mismatch");
    t = t + weights[k] * maps[k].transfer();
    prov.components.push_back(std::make_shared<const PutMap>(maps[k]));
  }
  prov.weights = weights;
  return PutMap(n, std::move(t), std::move(prov));
}

/// outer o inner (inner applied first).
inline PutMap compose(const PutMap& outer, const PutMap& inner) {
  if (outer.dim() != inner.dim()) throw DimensionError("compose: dimension mismatch");
  return PutMap(outer.dim(), matmul(outer.transfer(), inner.transfer()),
                provenance::Composed{std::make_shared<const PutMap>(outer), std::make_shared<const PutMap>(inner)});
}

/// Hilbert-Schmidt adjoint: <Phi(y), x> = <y, Phi*(x)>. The transfer matrix is
/// conjugate-transposed; provenance is mapped to the dual construction.
inline PutMap hs_adjoint(const PutMap& phi) {
  const std::size_t n = phi.dim();
  Provenance dual = std::visit(
      [n](const auto& p) -> Provenance {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, provenance::UnitaryConjugation>) {
          return provenance::UnitaryConjugation{adjoint(p.u)};
        } else if constexpr (std::is_same_v<T, provenance::WeightedIsometry>) {
          std::vector<ComplexMatrix> v;
          v.reserve(n * n);
          for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) v.push_back(adjoint(p.v[j * n + i]));
          return provenance::WeightedIsometry{p.a.transposed(), std::move(v)};
        } else if constexpr (std::is_same_v<T, provenance::ConvexCombination>) {
          provenance::ConvexCombination out;
          out.weights = p.weights;
          for (const auto& c : p.components) out.components.push_back(std::make_shared<const PutMap>(hs_adjoint(*c)));
          return out;
        } else if constexpr (std::is_same_v<T, provenance::Composed>) {
          return provenance::Composed{std::make_shared<const PutMap>(hs_adjoint(*p.inner)),
                                      std::make_shared<const PutMap>(hs_adjoint(*p.outer))};
        } else {
          // transpose, pinching, depolarizing and the entropy-target map are
          // self-dual; raw maps stay raw.
          return p;
        }
      },
      phi.provenance());
  return PutMap(n, adjoint(phi.transfer()), std::move(dual));
}

struct ValidationReport {
  double unital_residual = 0.0;
  double trace_residual = 0.0;
  double hermiticity_residual = 0.0;
  std::size_t positivity_samples = 0;
  double positivity_min_eigenvalue = 0.0;
  bool positivity_certified = false;
  bool unital_ok = false;
  bool trace_ok = false;
  bool positivity_ok = false;

  bool passed() const noexcept { return unital_ok && trace_ok && positivity_ok; }
};

struct ValidationThresholds {
  double unital = 1e-9;
  double trace = 1e-9;
  double hermiticity = 1e-9;
  double min_eigenvalue = -1e-8;
};

/// Checks the standing hypotheses: ||Phi(I) - I||_F, the worst trace defect
/// over matrix units, and the smallest eigenvalue of Phi(x) over `samples`
/// random pure states x (test positivity on rank-one inputs suffices).
inline ValidationReport validate_put(const PutMap& phi, std::size_t samples = 200, std::uint64_t seed = 0x5eed,
                                     const ValidationThresholds& thresholds = {}) {
  const std::size_t n = phi.dim();
  ValidationReport r;
  r.unital_residual = distance(apply(phi, ComplexMatrix::identity(n)), ComplexMatrix::identity(n));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      const Complex want = a == b ? Complex{1.0, 0.0} : Complex{};
      r.trace_residual = std::max(r.trace_residual, std::abs(trace(apply(phi, ComplexMatrix::unit(n, a, b))) - want));
    }

  r.positivity_certified = phi.positivity_certified();
  r.positivity_samples = samples;
  r.positivity_min_eigenvalue = samples > 0 ? std::numeric_limits<double>::infinity() : 0.0;
  Rng rng(seed);
  JacobiOptions loose;
  loose.hermitian_tolerance = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < samples; ++s) {
    const ComplexMatrix image = apply(phi, random_pure_density(rng, n));
    r.hermiticity_residual = std::max(r.hermiticity_residual, hermiticity_residual(image));
    const HermitianEig eig = hermitian_eig(hermitian_part(image), loose);
    r.positivity_min_eigenvalue = std::min(r.positivity_min_eigenvalue, eig.values.back());
  }

  r.unital_ok = r.unital_residual <= thresholds.unital;
  r.trace_ok = r.trace_residual <= thresholds.trace;
  r.positivity_ok = r.hermiticity_residual <= thresholds.hermiticity &&
                    r.positivity_min_eigenvalue >= thresholds.min_eigenvalue;
  return r;
}

}  // namespace entropylab

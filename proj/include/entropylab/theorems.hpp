#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "entropylab/channel.hpp"
#include "entropylab/density.hpp"
#include "entropylab/pair_analysis.hpp"

namespace entropylab {

/// Three-valued verdict. `indeterminate` means the residual sits inside the
/// ambiguity band just above its threshold.
enum class Truth { no, yes, indeterminate };

inline std::string_view to_string(Truth t) {
  switch (t) {
    case Truth::yes: return "true";
    case Truth::no: return "false";
    case Truth::indeterminate: return "indeterminate";
  }
  return "?";
}

inline Truth truth_of(bool b) { return b ? Truth::yes : Truth::no; }

struct Tolerances {
  double equality = 1e-8;   // eps_eq
  double zero = kZeroThreshold;
  double band_factor = 10.0;
  double inequality_slack = 1e-8;
  double flatness = 1e-8;

  /// eps_eq = 1e-8 * max(1, n) unless overridden.
  static Tolerances for_dimension(std::size_t n, std::optional<double> equality_override = std::nullopt) {
    Tolerances t;
    t.equality = equality_override ? *equality_override : 1e-8 * std::max<double>(1.0, static_cast<double>(n));
    return t;
  }
};

/// Reads ENTROPYLAB_TOL; returns nullopt when unset or unparsable.
inline std::optional<double> equality_tolerance_from_env() {
  const char* v = std::getenv("ENTROPYLAB_TOL");
  if (v == nullptr || *v == '\0') return std::nullopt;
  char* end = nullptr;
  const double x = std::strtod(v, &end);
  if (end == v || *end != '\0' || !(x > 0.0)) return std::nullopt;
  return x;
}

struct Condition {
  std::string label;
  Truth value = Truth::no;
  double residual = 0.0;
  double threshold = 0.0;
};

enum class Characterization {
  entropy_preservation,      // equality S(rho o Phi*) = S(rho) and its four equivalents
  preservation_consequences, // inner-product identity; pinching equality <=> membership
  entropy_chain,             // S_rho(Phi) <= H^lambda <= S_out <= S + S_rho(Phi), S <= S_out
  tracial_output,            // full-rank equality H^lambda = S_out forces the tracial output
  zero_matrix_entropy,       // H^lambda(b) = 0 and its four equivalents
};

inline std::string_view to_string(Characterization c) {
  switch (c) {
    case Characterization::entropy_preservation: return "entropy-preservation";
    case Characterization::preservation_consequences: return "preservation-consequences";
    case Characterization::entropy_chain: return "entropy-chain";
    case Characterization::tracial_output: return "tracial-output";
    case Characterization::zero_matrix_entropy: return "zero-matrix-entropy";
  }
  return "?";
}

struct ConditionReport {
  Characterization theorem;
  std::vector<Condition> conditions;
  Truth consistent = Truth::yes;
  std::vector<std::string> notes;
  std::optional<ComplexMatrix> witness;
  std::vector<std::size_t> matching;  // j(i) for i in J_lambda, zero-matrix-entropy only

  const Condition& at(std::string_view label) const {
    for (const auto& c : conditions)
      if (c.label == label) return c;
    throw std::out_of_range("ConditionReport: no condition " + std::string(label));
  }
  bool any_indeterminate() const {
    return std::any_of(conditions.begin(), conditions.end(),
                       [](const Condition& c) { return c.value == Truth::indeterminate; });
  }
  bool all(Truth t) const {
    return std::all_of(conditions.begin(), conditions.end(), [t](const Condition& c) { return c.value == t; });
  }
};

namespace detail {

inline Condition classify(std::string label, double residual, double threshold, const Tolerances& tol) {
  Truth v = Truth::no;
  if (residual <= threshold) {
    v = Truth::yes;
  } else if (residual < tol.band_factor * threshold) {
    v = Truth::indeterminate;
  }
  return Condition{std::move(label), v, residual, threshold};
}

inline bool agree(const std::vector<Condition>& cs, std::initializer_list<std::size_t> idx) {
  const Truth first = cs[*idx.begin()].value;
  return std::all_of(idx.begin(), idx.end(), [&](std::size_t k) { return cs[k].value == first; });
}

// Any condition inside the band makes the whole report indeterminate.
inline void settle(ConditionReport& r, bool consistent) {
  r.consistent = r.any_indeterminate() ? Truth::indeterminate : truth_of(consistent);
}

// Entropy gaps here are second order in the structural deviation and weighted
// by the eigenvalues on the support, so an equality that holds within eps
// leaves consequences unresolved up to sqrt(band * n * eps / lambda_min).
// Failures inside that window become indeterminate.
inline void resolve_second_order(ConditionReport& r, const PairAnalysis& pair, std::size_t premise,
                                 std::initializer_list<std::size_t> consequences, const Tolerances& tol) {
  const Condition& p = r.conditions[premise];
  if (p.value != Truth::yes) return;
  const double lambda_min = pair.lambda()[pair.index.support.size() - 1];
  const double window =
      std::sqrt(tol.band_factor * static_cast<double>(pair.dim()) * p.threshold / lambda_min);
  bool touched = false;
  for (std::size_t k : consequences) {
    Condition& c = r.conditions[k];
    if (c.value == Truth::no && c.residual <= window) {
      c.value = Truth::indeterminate;
      touched = true;
    }
  }
  if (touched) r.notes.push_back(p.label + " holds within tolerance but its consequences are below resolution");
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

inline ComplexMatrix expand_in(const std::vector<ComplexMatrix>& ps, std::span<const double> coeff) {
  ComplexMatrix out(ps.front().dim());
  for (std::size_t j = 0; j < ps.size(); ++j) out = out + coeff[j] * ps[j];
  return out;
}

inline std::vector<double> row_of(const BistochasticMatrix& b, std::size_t i) {
  std::vector<double> r(b.dim());
  for (std::size_t j = 0; j < b.dim(); ++j) r[j] = b(i, j);
  return r;
}

}  // namespace detail

/// Entropy preservation: (i) S(rho o Phi*) = S(rho); (ii) lambda = mu b^T;
/// (iii) lambda = mu; (iv) Phi(D) = u D u* for the connecting unitary u;
/// (v) Phi* Phi(D) = D. All five must agree.
inline ConditionReport check_entropy_preservation(const PairAnalysis& pair, const Tolerances& tol) {
  const auto& lambda = pair.lambda().weights();
  const auto& mu = pair.mu().weights();
  const auto back = pair.b.left_multiply_transpose(mu);
  const ComplexMatrix& d = pair.rho.matrix();

  ConditionReport r{Characterization::entropy_preservation, {}, Truth::yes, {}, pair.connecting_unitary, {}};
  const double eq = tol.equality;
  r.conditions.push_back(
      detail::classify("entropy_equal", std::abs(pair.entropies.output - pair.entropies.state), eq, tol));
  r.conditions.push_back(detail::classify("lambda_eq_mu_bT", detail::max_abs_diff(lambda, back), eq, tol));
  r.conditions.push_back(detail::classify("spectra_equal", detail::max_abs_diff(lambda, mu), eq, tol));
  r.conditions.push_back(detail::classify(
      "unitary_orbit", distance(pair.output.matrix(), conjugate_by(pair.connecting_unitary, d)), eq, tol));
  r.conditions.push_back(detail::classify("adjoint_recovers", distance(pair.adjoint_output, d), eq, tol));
  detail::settle(r, detail::agree(r.conditions, {0, 1, 2, 3, 4}));
  return r;
}

/// Whether the pinching clause is evaluated.
enum class ExpectationClause { automatic, required, skipped };

/// Consequences of preservation: if S(Phi(D)) = S(D) then
/// <Phi(D), Phi(e_k)> = <D, e_k> for all k; and, when Phi is a pinching E_B,
/// S(E_B(D)) = S(D) iff D lies in B (i.e. E_B(D) = D).
inline ConditionReport check_preservation_consequences(const PairAnalysis& pair, const Tolerances& tol,
                                                       ExpectationClause clause = ExpectationClause::automatic) {
  if (clause == ExpectationClause::required && !pair.phi.is_conditional_expectation()) {
    throw HypothesisError("check_preservation_consequences: pinching clause needs a conditional expectation");
  }
  const double eq = tol.equality;
  ConditionReport r{Characterization::preservation_consequences, {}, Truth::yes, {}, std::nullopt, {}};
  r.conditions.push_back(
      detail::classify("entropy_equal", std::abs(pair.entropies.output - pair.entropies.state), eq, tol));
  double worst = 0.0;
  for (std::size_t k = 0; k < pair.dim(); ++k) {
    const double lhs = hs_inner(pair.output.matrix(), pair.phi_e[k]).real();
    const double rhs = hs_inner(pair.rho.matrix(), pair.e_projs()[k]).real();
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  r.conditions.push_back(detail::classify("inner_products_preserved", worst, eq, tol));
  bool ok = r.conditions[0].value != Truth::yes || r.conditions[1].value == Truth::yes;

  const bool pinching = pair.phi.is_conditional_expectation() && clause != ExpectationClause::skipped;
  if (pinching) {
    // Here Phi = E_B, so S(E_B(D)) is the output entropy.
    r.conditions.push_back(detail::classify("pinching_entropy_equal",
                                            std::abs(pair.entropies.output - pair.entropies.state), eq, tol));
    r.conditions.push_back(
        detail::classify("state_in_algebra", distance(pair.rho.matrix(), pair.output.matrix()), eq, tol));
    ok = ok && detail::agree(r.conditions, {2, 3});
  } else {
    r.notes.push_back("pinching clause not evaluated: map is not a conditional expectation");
  }
  detail::settle(r, ok);
  return r;
}

/// The entropy chain with its four equality characterizations, each read
/// over the support J_lambda:
///  (a) S_rho(Phi) = H^lambda  iff  Phi(e_i) = sum_j b_ij p_j
///  (b) H^lambda = S_out       iff  b_ij = mu_j
///  (c) S_rho(Phi) = S_out     iff  Phi(D) = Phi(e_i)
///  (d) S_out = S + S_rho(Phi)  iff  Phi(e_i) Phi(e_k) = 0 for i != k
///
/// A pure state always gives equality in (d), but the converse fails: any
/// *-automorphism gives equality for every state. The purity check is kept as
/// a reported condition and only the implication pure => equality is enforced.
inline ConditionReport check_entropy_chain(const PairAnalysis& pair, const Tolerances& tol) {
  const auto& t = pair.entropies;
  const double eq = tol.equality;
  const double slack = tol.inequality_slack;
  const auto& support = pair.index.support;
  const std::size_t n = pair.dim();

  ConditionReport r{Characterization::entropy_chain, {}, Truth::yes, {}, std::nullopt, {}};
  auto excess = [](double lhs, double rhs) { return std::max(0.0, lhs - rhs); };
  r.conditions.push_back(detail::classify("averaged_le_row_weighted", excess(t.averaged_out, t.row_weighted), slack, tol));
  r.conditions.push_back(detail::classify("row_weighted_le_output", excess(t.row_weighted, t.output), slack, tol));
  r.conditions.push_back(
      detail::classify("output_le_state_plus_averaged", excess(t.output, t.state + t.averaged_out), slack, tol));
  r.conditions.push_back(detail::classify("state_le_output", excess(t.state, t.output), slack, tol));

  double in_algebra = 0.0;
  double rows_match = 0.0;
  double images_match = 0.0;
  double overlap = 0.0;
  for (std::size_t a = 0; a < support.size(); ++a)
    for (std::size_t c = a + 1; c < support.size(); ++c)
      overlap = std::max(overlap, frobenius_norm(matmul(pair.phi_e[support[a]], pair.phi_e[support[c]])));
  for (std::size_t i : support) {
    const auto row = detail::row_of(pair.b, i);
    in_algebra = std::max(in_algebra, distance(pair.phi_e[i], detail::expand_in(pair.p_projs(), row)));
    for (std::size_t j = 0; j < n; ++j) rows_match = std::max(rows_match, std::abs(row[j] - pair.mu()[j]));
    images_match = std::max(images_match, distance(pair.output.matrix(), pair.phi_e[i]));
  }
  r.conditions.push_back(detail::classify("averaged_eq_row_weighted", std::abs(t.averaged_out - t.row_weighted), eq, tol));
  r.conditions.push_back(detail::classify("images_in_output_algebra", in_algebra, eq, tol));
  r.conditions.push_back(detail::classify("row_weighted_eq_output", std::abs(t.row_weighted - t.output), eq, tol));
  r.conditions.push_back(detail::classify("support_rows_equal_mu", rows_match, eq, tol));
  r.conditions.push_back(detail::classify("averaged_eq_output", std::abs(t.averaged_out - t.output), eq, tol));
  r.conditions.push_back(detail::classify("support_images_equal_output", images_match, eq, tol));
  r.conditions.push_back(
      detail::classify("output_eq_state_plus_averaged", std::abs(t.output - t.state - t.averaged_out), eq, tol));
  r.conditions.push_back(detail::classify("support_images_orthogonal", overlap, eq, tol));
  r.conditions.push_back(detail::classify("state_pure", t.state, eq, tol));

  for (std::size_t k : {4, 6, 8, 10}) detail::resolve_second_order(r, pair, k, {k + 1}, tol);
  const bool chain = std::all_of(r.conditions.begin(), r.conditions.begin() + 4,
                                 [](const Condition& c) { return c.value == Truth::yes; });
  const bool pure_implies_equality = r.conditions[12].value != Truth::yes || r.conditions[10].value == Truth::yes;
  const bool equivalences = detail::agree(r.conditions, {4, 5}) && detail::agree(r.conditions, {6, 7}) &&
                            detail::agree(r.conditions, {8, 9}) && detail::agree(r.conditions, {10, 11});
  if (r.conditions[10].value == Truth::yes && r.conditions[12].value == Truth::no) {
    r.notes.push_back("subadditivity equality holds for a mixed state");
  }
  detail::settle(r, chain && equivalences && pure_implies_equality);
  return r;
}

/// For full-rank D_rho: H^lambda = S_out forces mu uniform, S_out = ln n and
/// b flat (b_ij = 1/n). Throws HypothesisError when D_rho is rank-deficient.
inline ConditionReport check_tracial_output(const PairAnalysis& pair, const Tolerances& tol) {
  const std::size_t n = pair.dim();
  if (pair.index.support.size() != n) {
    throw HypothesisError("check_tracial_output: needs every eigenvalue of D_rho nonzero");
  }
  const double uniform = 1.0 / static_cast<double>(n);
  double mu_dev = 0.0;
  for (std::size_t j = 0; j < n; ++j) mu_dev = std::max(mu_dev, std::abs(pair.mu()[j] - uniform));
  double flat_dev = 0.0;
  for (double x : pair.b.entries()) flat_dev = std::max(flat_dev, std::abs(x - uniform));

  const double eq = tol.equality;
  ConditionReport r{Characterization::tracial_output, {}, Truth::yes, {}, std::nullopt, {}};
  r.conditions.push_back(
      detail::classify("row_weighted_eq_output", std::abs(pair.entropies.row_weighted - pair.entropies.output), eq, tol));
  r.conditions.push_back(detail::classify("output_uniform", mu_dev, eq, tol));
  r.conditions.push_back(
      detail::classify("output_entropy_log_n", std::abs(pair.entropies.output - std::log(static_cast<double>(n))), eq, tol));
  r.conditions.push_back(detail::classify("b_flat", flat_dev, tol.flatness, tol));

  detail::resolve_second_order(r, pair, 0, {1, 2, 3}, tol);
  bool ok = true;
  if (r.conditions[0].value == Truth::yes) {
    ok = std::all_of(r.conditions.begin() + 1, r.conditions.end(),
                     [](const Condition& c) { return c.value == Truth::yes; });
  } else {
    r.notes.push_back("premise not triggered");
  }
  detail::settle(r, ok);
  return r;
}

/// Zero bistochastic entropy: 0) H^lambda(b) = 0; 1) each i in J_lambda has
/// j(i) with lambda_i = mu_j(i) and Phi(e_i) = p_j(i); 2) S(rho) = S_out;
/// 3) Phi(D) = u D u*; 4) Phi* Phi(D) = D.
///
/// When two nonzero eigenvalues of D_rho coincide, 2)-4) no longer imply 0):
/// a map may mix a degenerate eigenspace without changing the spectrum
/// (D = I/n under the depolarizing map is the smallest example). In that case
/// the report requires 0) <=> 1), 2) <=> 3) <=> 4) and 0) => 2), and says so in
/// its notes.
inline ConditionReport check_zero_matrix_entropy(const PairAnalysis& pair, const Tolerances& tol) {
  const std::size_t n = pair.dim();
  const double eq = tol.equality;
  const auto& lambda = pair.lambda();
  const auto& mu = pair.mu();
  const auto& support = pair.index.support;

  ConditionReport r{Characterization::zero_matrix_entropy, {}, Truth::yes, {}, pair.connecting_unitary, {}};

  // Nearest-mu candidates first, then the closest output projection; ties go
  // to the smallest index.
  double match_residual = 0.0;
  for (std::size_t i : support) {
    double best_gap = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) best_gap = std::min(best_gap, std::abs(lambda[i] - mu[j]));
    std::size_t chosen = n;
    double chosen_dist = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (std::abs(lambda[i] - mu[j]) > best_gap + eq) continue;
      const double dist = distance(pair.phi_e[i], pair.p_projs()[j]);
      if (dist < chosen_dist) {
        chosen = j;
        chosen_dist = dist;
      }
    }
    r.matching.push_back(chosen);
    match_residual = std::max({match_residual, std::abs(lambda[i] - mu[chosen]), chosen_dist});
  }

  r.conditions.push_back(detail::classify("row_weighted_zero", pair.entropies.row_weighted, eq, tol));
  r.conditions.push_back(detail::classify("support_maps_to_output_projections", match_residual, eq, tol));
  r.conditions.push_back(
      detail::classify("entropy_equal", std::abs(pair.entropies.state - pair.entropies.output), eq, tol));
  r.conditions.push_back(detail::classify(
      "unitary_orbit", distance(pair.output.matrix(), conjugate_by(pair.connecting_unitary, pair.rho.matrix())), eq, tol));
  r.conditions.push_back(detail::classify("adjoint_recovers", distance(pair.adjoint_output, pair.rho.matrix()), eq, tol));

  bool degenerate_support = false;
  for (std::size_t a = 0; a < support.size(); ++a)
    for (std::size_t c = a + 1; c < support.size(); ++c)
      if (std::abs(lambda[support[a]] - lambda[support[c]]) < tol.band_factor * eq) degenerate_support = true;

  bool ok = false;
  if (degenerate_support) {
    r.notes.push_back("repeated nonzero eigenvalues: only 0)<=>1), 2)<=>3)<=>4) and 0)=>2) are required");
    const bool zero_implies_preserved = r.conditions[0].value != Truth::yes || r.conditions[2].value == Truth::yes;
    ok = detail::agree(r.conditions, {0, 1}) && detail::agree(r.conditions, {2, 3, 4}) && zero_implies_preserved;
  } else {
    ok = detail::agree(r.conditions, {0, 1, 2, 3, 4});
  }
  detail::settle(r, ok);
  return r;
}

// ---------------------------------------------------------------------------

struct Instance {
  ComplexMatrix state;
  PutMap channel;
  std::string label;
};

struct InstanceResult {
  std::size_t index = 0;
  std::string label;
  std::size_t dim = 0;
  std::vector<ConditionReport> reports;
  std::string error;  // non-empty when the pair failed validation
  bool inconsistent() const {
    return !error.empty() || std::any_of(reports.begin(), reports.end(),
                                         [](const ConditionReport& r) { return r.consistent == Truth::no; });
  }
  bool indeterminate() const {
    return std::any_of(reports.begin(), reports.end(),
                       [](const ConditionReport& r) { return r.consistent == Truth::indeterminate; });
  }
};

/// Every checker applicable to one pair. The tracial-output check is only run
/// when D_rho has full rank.
inline std::vector<ConditionReport> check_all(const PairAnalysis& pair, const Tolerances& tol) {
  std::vector<ConditionReport> out;
  out.push_back(check_entropy_preservation(pair, tol));
  out.push_back(check_preservation_consequences(pair, tol));
  out.push_back(check_entropy_chain(pair, tol));
  if (pair.index.support.size() == pair.dim()) out.push_back(check_tracial_output(pair, tol));
  out.push_back(check_zero_matrix_entropy(pair, tol));
  return out;
}

struct SuiteReport {
  std::vector<InstanceResult> results;  // sorted by instance index
  std::size_t inconsistencies = 0;
  std::size_t indeterminate = 0;
  std::size_t chain_violations = 0;
  std::size_t errors = 0;

  bool ok() const noexcept { return inconsistencies == 0; }
};

struct SuiteOptions {
  std::optional<double> equality_override;
  unsigned threads = 1;
};

inline InstanceResult run_instance(const Instance& inst, std::size_t index, const SuiteOptions& options) {
  InstanceResult res;
  res.index = index;
  res.label = inst.label;
  res.dim = inst.state.dim();
  try {
    const PairAnalysis pair = analyze(DensityMatrix(inst.state), inst.channel);
    res.reports = check_all(pair, Tolerances::for_dimension(pair.dim(), options.equality_override));
  } catch (const Error& e) {
    res.error = e.what();
  }
  return res;
}

/// Runs every checker on every instance. Work is split over
/// `options.threads` workers; results are aggregated in instance order.
inline SuiteReport run_suite(const std::vector<Instance>& instances, const SuiteOptions& options = {}) {
  SuiteReport suite;
  suite.results.resize(instances.size());
  const unsigned workers = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(instances.size())));
  if (workers == 1) {
    for (std::size_t k = 0; k < instances.size(); ++k) suite.results[k] = run_instance(instances[k], k, options);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t k = w; k < instances.size(); k += workers)
          suite.results[k] = run_instance(instances[k], k, options);
      });
    }
    for (auto& t : pool) t.join();
  }
  for (const auto& r : suite.results) {
    if (!r.error.empty()) ++suite.errors;
    if (r.inconsistent()) ++suite.inconsistencies;
    if (r.indeterminate()) ++suite.indeterminate;
    for (const auto& rep : r.reports) {
      if (rep.theorem != Characterization::entropy_chain) continue;
      for (std::size_t c = 0; c < 4; ++c)
        if (rep.conditions[c].value == Truth::no) {
          ++suite.chain_violations;
          break;
        }
    }
  }
  return suite;
}

}  // namespace entropylab

#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "entropylab/channel.hpp"
#include "entropylab/eigen.hpp"
#include "entropylab/generate.hpp"
#include "entropylab/io.hpp"
#include "entropylab/pair_analysis.hpp"
#include "entropylab/random.hpp"
#include "entropylab/theorems.hpp"

namespace entropylab::acceptance {

struct Config {
  std::string oracle_file;  // committed oracle instances (JSON)
  std::uint64_t seed = 20240601;
  unsigned threads = 1;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double worst = 0.0;  // largest residual seen, where meaningful
};

namespace detail {

inline std::string sci(double x) {
  std::ostringstream ss;
  ss.precision(3);
  ss << std::scientific << x;
  return ss.str();
}

inline const std::vector<std::size_t>& desk_dims() {
  static const std::vector<std::size_t> dims = {2, 3, 4, 5, 6};
  return dims;
}

struct Metrics {
  double sum_residual = 0.0;
  double min_entry = 1.0;
  double transport = 0.0;
  double chain_excess = 0.0;  // largest violation of the four inequalities
  std::size_t count = 0;
  std::size_t errors = 0;
  std::string first_error;
  // Premise hits for the tracial-output criterion.
  std::vector<PairAnalysis> full_rank_equal;
  double seconds = 0.0;
};

inline double chain_excess(const EntropyTable& t) {
  return std::max({t.averaged_out - t.row_weighted, t.row_weighted - t.output, t.output - t.state - t.averaged_out,
                   t.state - t.output, 0.0});
}

/// The shared random suite behind criteria 1-3 and 9: 1000 pairs over every
/// generator kind, n in {2..6}.
inline const Metrics& random_suite(const Config& cfg) {
  static std::optional<Metrics> cached;
  static std::uint64_t cached_seed = 0;
  if (cached && cached_seed == cfg.seed) return *cached;
  Metrics m;
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t k = 0; k < 1000; ++k) {
    try {
      const Instance inst = batch_instance(k, desk_dims(), cfg.seed);
      PairAnalysis pair = analyze(DensityMatrix(inst.state), inst.channel);
      m.sum_residual = std::max(m.sum_residual, pair.b.sum_residual());
      m.min_entry = std::min(m.min_entry, pair.b.min_entry());
      m.transport = std::max(m.transport, transport_residual(pair));
      m.chain_excess = std::max(m.chain_excess, chain_excess(pair.entropies));
      const Tolerances tol = Tolerances::for_dimension(pair.dim());
      if (pair.index.support.size() == pair.dim() &&
          std::abs(pair.entropies.row_weighted - pair.entropies.output) <= tol.equality) {
        m.full_rank_equal.push_back(std::move(pair));
      }
      ++m.count;
    } catch (const Error& e) {
      if (m.errors++ == 0) m.first_error = e.what();
    }
  }
  m.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  cached = std::move(m);
  cached_seed = cfg.seed;
  return *cached;
}

inline std::string suite_note(const Metrics& m) {
  std::string s = std::to_string(m.count) + " pairs in " + sci(m.seconds) + " s";
  if (m.errors) s += ", " + std::to_string(m.errors) + " errors (first: " + m.first_error + ")";
  return s;
}

}  // namespace detail

inline CriterionResult bistochasticity(const Config& cfg) {
  const auto& m = detail::random_suite(cfg);
  CriterionResult r{1, "bistochasticity", false, "", m.sum_residual};
  r.passed = m.errors == 0 && m.count >= 1000 && m.sum_residual <= 1e-9 && m.min_entry >= -1e-12 && m.seconds < 60.0;
  r.detail = "max |sum - 1| " + detail::sci(m.sum_residual) + ", min entry " + detail::sci(m.min_entry) + "; " +
             detail::suite_note(m);
  return r;
}

inline CriterionResult transport_identity(const Config& cfg) {
  const auto& m = detail::random_suite(cfg);
  CriterionResult r{2, "transport identity", false, "", m.transport};
  r.passed = m.errors == 0 && m.count >= 1000 && m.transport <= 1e-8;
  r.detail = "max |sorted(lambda b) - mu| " + detail::sci(m.transport) + "; " + detail::suite_note(m);
  return r;
}

inline CriterionResult inequality_chain(const Config& cfg) {
  const auto& m = detail::random_suite(cfg);
  CriterionResult r{3, "inequality chain", false, "", m.chain_excess};
  r.passed = m.errors == 0 && m.count >= 1000 && m.chain_excess <= 1e-8;
  r.detail = "worst excess " + detail::sci(m.chain_excess) + "; " + detail::suite_note(m);
  return r;
}

inline CriterionResult equivalence_consistency(const Config& cfg) {
  CriterionResult r{4, "equivalence consistency", true, "", 0.0};
  std::size_t unitary_bad = 0;
  std::size_t depol_bad = 0;
  std::size_t errors = 0;
  const auto& dims = detail::desk_dims();
  for (std::size_t k = 0; k < 200; ++k) {
    try {
      const Instance inst = generate_instance("unitary-conj", dims[k % dims.size()], derive_seed(cfg.seed ^ 0x11, k));
      const PairAnalysis pair = analyze(DensityMatrix(inst.state), inst.channel);
      const Tolerances tol = Tolerances::for_dimension(pair.dim());
      if (!check_entropy_preservation(pair, tol).all(Truth::yes) ||
          !check_zero_matrix_entropy(pair, tol).all(Truth::yes)) {
        ++unitary_bad;
      }
    } catch (const Error&) {
      ++errors;
    }
  }
  std::size_t depol = 0;
  for (std::size_t k = 0; depol < 200; ++k) {
    try {
      const Instance inst = generate_instance("depolarizing", dims[k % dims.size()], derive_seed(cfg.seed ^ 0x22, k));
      const PairAnalysis pair = analyze(DensityMatrix(inst.state), inst.channel);
      const double uniform = 1.0 / static_cast<double>(pair.dim());
      if (pair.index.support.size() != pair.dim() || std::abs(pair.lambda()[0] - uniform) < 1e-3) continue;
      ++depol;
      const Tolerances tol = Tolerances::for_dimension(pair.dim());
      if (!check_entropy_preservation(pair, tol).all(Truth::no) || !check_zero_matrix_entropy(pair, tol).all(Truth::no)) {
        ++depol_bad;
      }
    } catch (const Error&) {
      ++errors;
      ++depol;
    }
  }
  std::vector<Instance> generic;
  for (std::size_t k = 0; k < 500; ++k) generic.push_back(batch_instance(k, dims, cfg.seed ^ 0x33));
  SuiteOptions opts;
  opts.threads = cfg.threads;
  const SuiteReport suite = run_suite(generic, opts);
  r.passed = unitary_bad == 0 && depol_bad == 0 && errors == 0 && suite.inconsistencies == 0;
  r.detail = "unitary all-true misses " + std::to_string(unitary_bad) + "/200, depolarizing all-false misses " +
             std::to_string(depol_bad) + "/200, generic violations " + std::to_string(suite.inconsistencies) + "/500 (" +
             std::to_string(suite.indeterminate) + " indeterminate, " + std::to_string(suite.errors) + " errors)";
  r.worst = static_cast<double>(unitary_bad + depol_bad + suite.inconsistencies);
  return r;
}

inline CriterionResult depolarizing_values(const Config& cfg) {
  CriterionResult r{5, "depolarizing exact values", true, "", 0.0};
  std::size_t errors = 0;
  for (std::size_t n = 2; n <= 6; ++n) {
    const double ln = std::log(static_cast<double>(n));
    for (std::size_t k = 0; k < 50; ++k) {
      try {
        const Instance inst = generate_instance("depolarizing", n, derive_seed(cfg.seed ^ 0x44, n * 100 + k));
        const PairAnalysis pair = analyze(DensityMatrix(inst.state), inst.channel);
        const auto& t = pair.entropies;
        r.worst = std::max({r.worst, std::abs(t.averaged_out - ln), std::abs(t.row_weighted - ln),
                            std::abs(t.output - ln)});
      } catch (const Error&) {
        ++errors;
      }
    }
  }
  r.passed = errors == 0 && r.worst <= 1e-9;
  r.detail = "250 states, max deviation from ln n " + detail::sci(r.worst);
  return r;
}

inline CriterionResult transpose_map_criterion(const Config& cfg) {
  CriterionResult r{6, "transpose map", true, "", 0.0};
  double basis_res = 0.0;
  for (std::size_t n = 1; n <= 6; ++n) {
    const PutMap t = transpose_map(n);
    const PutMap round = compose(hs_adjoint(t), t);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        const ComplexMatrix e = ComplexMatrix::unit(n, a, b);
        basis_res = std::max(basis_res, distance(apply(round, e), e));
      }
  }
  std::size_t misses = 0;
  const auto& dims = detail::desk_dims();
  for (std::size_t k = 0; k < 50; ++k) {
    try {
      const Instance inst = generate_instance("transpose", dims[k % dims.size()], derive_seed(cfg.seed ^ 0x55, k));
      const PairAnalysis pair = analyze(DensityMatrix(inst.state), inst.channel);
      if (!check_entropy_preservation(pair, Tolerances::for_dimension(pair.dim())).all(Truth::yes)) ++misses;
    } catch (const Error&) {
      ++misses;
    }
  }
  r.worst = basis_res;
  r.passed = basis_res <= 1e-12 && misses == 0;
  r.detail = "max ||Phi*Phi(E_ab) - E_ab|| " + detail::sci(basis_res) + ", preservation misses " +
             std::to_string(misses) + "/50";
  return r;
}

inline CriterionResult pure_state_collapse(const Config& cfg) {
  CriterionResult r{7, "pure-state collapse", true, "", 0.0};
  GenerateOptions pure;
  pure.state = StateMode::pure;
  std::size_t errors = 0;
  double collapse = 0.0;
  for (std::size_t k = 0; k < 50; ++k) {
    try {
      const Instance inst = batch_instance(k, detail::desk_dims(), cfg.seed ^ 0x66, {kGeneratorKinds.begin(), kGeneratorKinds.end()}, pure);
      const PairAnalysis pair = analyze(DensityMatrix(inst.state), inst.channel);
      const auto& t = pair.entropies;
      collapse = std::max(collapse, std::abs(t.output - t.state - t.averaged_out));
    } catch (const Error&) {
      ++errors;
    }
  }
  double target_dev = 0.0;
  for (std::size_t n = 2; n <= 6; ++n) {
    for (double s : {0.0, 0.25, 0.5, std::log(static_cast<double>(n))}) {
      try {
        GenerateOptions opts;
        opts.target = s;
        const Instance inst = generate_instance("entropy-target", n, derive_seed(cfg.seed ^ 0x77, n), opts);
        const PairAnalysis pair = analyze(DensityMatrix(inst.state), inst.channel);
        target_dev = std::max(target_dev, std::abs(pair.entropies.averaged_out - s));
      } catch (const Error&) {
        ++errors;
      }
    }
  }
  r.worst = std::max(collapse, target_dev);
  r.passed = errors == 0 && collapse <= 1e-8 && target_dev <= 1e-6;
  r.detail = "max |S_out - S - S_rho(Phi)| " + detail::sci(collapse) + ", max |S_rho(Phi) - s| " +
             detail::sci(target_dev) + ", errors " + std::to_string(errors);
  return r;
}

inline CriterionResult weighted_isometry_membership(const Config& cfg) {
  CriterionResult r{8, "weighted-isometry membership", true, "", 0.0};
  double membership = 0.0;
  double equality = 0.0;
  std::size_t errors = 0;
  const auto& dims = detail::desk_dims();
  for (std::size_t k = 0; k < 100; ++k) {
    try {
      const Instance inst = generate_instance("weighted-isometry", dims[k % dims.size()], derive_seed(cfg.seed ^ 0x88, k));
      const PairAnalysis pair = analyze(DensityMatrix(inst.state), inst.channel);
      for (std::size_t i = 0; i < pair.dim(); ++i) {
        ComplexMatrix expanded(pair.dim());
        for (std::size_t j = 0; j < pair.dim(); ++j) expanded = expanded + pair.b(i, j) * pair.p_projs()[j];
        membership = std::max(membership, distance(pair.phi_e[i], expanded));
      }
      equality = std::max(equality, std::abs(pair.entropies.averaged_out - pair.entropies.row_weighted));
    } catch (const Error&) {
      ++errors;
    }
  }
  r.worst = std::max(membership, equality);
  r.passed = errors == 0 && membership <= 1e-8 && equality <= 1e-8;
  r.detail = "max ||Phi(e_i) - sum_j b_ij p_j|| " + detail::sci(membership) + ", max |S_rho(Phi) - H^lambda| " +
             detail::sci(equality);
  return r;
}

inline CriterionResult tracial_output(const Config& cfg) {
  CriterionResult r{9, "tracial output", true, "", 0.0};
  std::vector<const PairAnalysis*> hits;
  for (const auto& p : detail::random_suite(cfg).full_rank_equal) hits.push_back(&p);
  // Extra premise hits: flat weighted-isometry maps on random full-rank states.
  std::vector<PairAnalysis> extra;
  for (std::size_t n = 2; n <= 6; ++n) {
    Rng rng(derive_seed(cfg.seed ^ 0x99, n));
    const ComplexMatrix state = random_density(rng, n);
    const ComplexMatrix e = DensityMatrix(state).spectrum().vectors;
    extra.push_back(analyze(DensityMatrix(state), weighted_isometry_map(BistochasticMatrix::flat(n), e, random_unitary(rng, n))));
  }
  for (const auto& p : extra) hits.push_back(&p);
  std::size_t bad = 0;
  for (const PairAnalysis* p : hits) {
    const ConditionReport rep = check_tracial_output(*p, Tolerances::for_dimension(p->dim()));
    for (std::size_t c = 1; c < rep.conditions.size(); ++c) r.worst = std::max(r.worst, rep.conditions[c].residual);
    if (rep.consistent != Truth::yes || !rep.all(Truth::yes)) ++bad;
  }
  r.passed = bad == 0 && !hits.empty();
  r.detail = std::to_string(hits.size()) + " premise hits, " + std::to_string(bad) + " failures, worst residual " +
             detail::sci(r.worst);
  return r;
}

inline CriterionResult oracle_equivalence(const Config& cfg) {
  CriterionResult r{10, "oracle equivalence", false, "", 0.0};
  std::size_t checked = 0;
  try {
    const io::json doc = io::parse_json(io::read_file(cfg.oracle_file), cfg.oracle_file);
    for (const auto& entry : doc.at("instances")) {
      const io::InstanceFile file = io::instance_from_json(entry.at("instance"), entry.at("name").get<std::string>());
      const PairAnalysis pair = analyze(DensityMatrix(*file.state), *file.channel);
      const io::json& want = entry.at("expected");
      const std::size_t n = pair.dim();
      for (std::size_t i = 0; i < n; ++i) {
        r.worst = std::max(r.worst, std::abs(pair.lambda()[i] - want["lambda"][i].get<double>()));
        r.worst = std::max(r.worst, std::abs(pair.mu()[i] - want["mu"][i].get<double>()));
        for (std::size_t j = 0; j < n; ++j) r.worst = std::max(r.worst, std::abs(pair.b(i, j) - want["b"][i][j].get<double>()));
      }
      const auto got = io::entropy_json(pair.entropies, 1.0);
      for (const auto& [key, value] : got.items()) r.worst = std::max(r.worst, std::abs(value.get<double>() - want[key].get<double>()));
      ++checked;
    }
  } catch (const std::exception& e) {
    r.detail = std::string("could not evaluate: ") + e.what();
    return r;
  }
  r.passed = checked == 20 && r.worst <= 1e-10;
  r.detail = std::to_string(checked) + " instances, max deviation " + detail::sci(r.worst);
  return r;
}

inline CriterionResult eigensolver_quality(const Config& cfg) {
  CriterionResult r{11, "eigensolver quality", false, "", 0.0};
  double recon = 0.0;
  double ortho = 0.0;
  double identities = 0.0;
  std::size_t errors = 0;
  for (std::size_t k = 0; k < 500; ++k) {
    const std::size_t n = 1 + k % 8;
    Rng rng(derive_seed(cfg.seed ^ 0xAA, k));
    const ComplexMatrix m = random_hermitian(rng, n);
    try {
      const HermitianEig eig = hermitian_eig(m);
      const double scale = std::max(1.0, frobenius_norm(m));
      recon = std::max(recon, distance(eig.reconstruct(), m) / scale);
      ortho = std::max(ortho, unitarity_residual(eig.vectors));
      double sum = 0.0;
      double squares = 0.0;
      for (double v : eig.values) {
        sum += v;
        squares += v * v;
      }
      const double fro = frobenius_norm(m);
      identities = std::max({identities, std::abs(sum - trace(m).real()), std::abs(squares - fro * fro)});
    } catch (const Error&) {
      ++errors;
    }
  }
  r.worst = std::max({recon, ortho, identities});
  r.passed = errors == 0 && recon <= 1e-9 && ortho <= 1e-10 && identities <= 1e-9;
  r.detail = "reconstruction " + detail::sci(recon) + ", orthonormality " + detail::sci(ortho) + ", trace/Frobenius " +
             detail::sci(identities) + ", errors " + std::to_string(errors);
  return r;
}

inline std::vector<CriterionResult> run_all(const Config& cfg) {
  return {bistochasticity(cfg),
          transport_identity(cfg),
          inequality_chain(cfg),
          equivalence_consistency(cfg),
          depolarizing_values(cfg),
          transpose_map_criterion(cfg),
          pure_state_collapse(cfg),
          weighted_isometry_membership(cfg),
          tracial_output(cfg),
          oracle_equivalence(cfg),
          eigensolver_quality(cfg)};
}

inline std::string format_line(const CriterionResult& r, bool verbose) {
  std::string line = std::string(r.passed ? "PASS" : "FAIL") + " [" + std::to_string(r.id) + "] " + r.name;
  if (verbose || !r.passed) line += ": " + r.detail;
  return line;
}

}  // namespace entropylab::acceptance

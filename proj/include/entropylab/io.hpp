#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "entropylab/channel.hpp"
#include "entropylab/error.hpp"
#include "entropylab/matrix.hpp"
#include "entropylab/pair_analysis.hpp"
#include "entropylab/theorems.hpp"

namespace entropylab::io {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// --- matrices --------------------------------------------------------------

/// Row-major nested arrays of [re, im] pairs.
inline json to_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.dim(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.dim(); ++c) row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace detail {

[[noreturn]] inline void fail(const std::string& where, const std::string& what) {
  throw ParseError(where + ": " + what);
}

inline double number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) fail(where, "non-finite number");
  return x;
}

inline const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(where, std::string("missing field \"") + key + "\"");
  return *it;
}

inline std::size_t dimension(const json& j, const std::string& where) {
  const json& n = field(j, "n", where);
  if (!n.is_number_unsigned() || n.get<std::uint64_t>() == 0) fail(where + ".n", "expected a positive integer");
  return n.get<std::size_t>();
}

inline std::vector<double> real_vector(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array");
  std::vector<double> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(number(j[k], where + "[" + std::to_string(k) + "]"));
  return out;
}

}  // namespace detail

inline ComplexMatrix matrix_from_json(const json& j, const std::string& where = "matrix") {
  if (!j.is_array() || j.empty()) detail::fail(where, "expected a non-empty array of rows");
  const std::size_t n = j.size();
  std::vector<Complex> entries;
  entries.reserve(n * n);
  for (std::size_t r = 0; r < n; ++r) {
    const json& row = j[r];
    const std::string rw = where + "[" + std::to_string(r) + "]";
    if (!row.is_array() || row.size() != n) detail::fail(rw, "expected " + std::to_string(n) + " entries");
    for (std::size_t c = 0; c < n; ++c) {
      const json& z = row[c];
      const std::string zw = rw + "[" + std::to_string(c) + "]";
      if (z.is_number()) {
        entries.emplace_back(detail::number(z, zw), 0.0);
      } else if (z.is_array() && z.size() == 2) {
        entries.emplace_back(detail::number(z[0], zw), detail::number(z[1], zw));
      } else {
        detail::fail(zw, "expected [re, im]");
      }
    }
  }
  return ComplexMatrix(n, std::move(entries));
}

inline std::vector<ComplexMatrix> matrices_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) detail::fail(where, "expected an array of matrices");
  std::vector<ComplexMatrix> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(matrix_from_json(j[k], where + "[" + std::to_string(k) + "]"));
  return out;
}

inline json to_json(const std::vector<ComplexMatrix>& ms) {
  json out = json::array();
  for (const auto& m : ms) out.push_back(to_json(m));
  return out;
}

inline json to_json(const BistochasticMatrix& b) {
  json rows = json::array();
  for (std::size_t i = 0; i < b.dim(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < b.dim(); ++j) row.push_back(b(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

// --- channels --------------------------------------------------------------

inline json to_json(const PutMap& phi) {
  const std::size_t n = phi.dim();
  json out = {{"kind", std::string(phi.kind())}, {"n", n}};
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, provenance::UnitaryConjugation>) {
          out["u"] = to_json(p.u);
        } else if constexpr (std::is_same_v<T, provenance::ConditionalExpectation>) {
          out["projections"] = to_json(p.projections);
        } else if constexpr (std::is_same_v<T, provenance::WeightedIsometry>) {
          out["a"] = to_json(p.a);
          json v = json::array();
          for (std::size_t i = 0; i < n; ++i) {
            json row = json::array();
            for (std::size_t j = 0; j < n; ++j) row.push_back(to_json(p.v[i * n + j]));
            v.push_back(std::move(row));
          }
          out["v"] = std::move(v);
        } else if constexpr (std::is_same_v<T, provenance::EntropyTarget>) {
          out["basis"] = to_json(p.basis);
          out["mu"] = p.mu;
        } else if constexpr (std::is_same_v<T, provenance::TransferRaw>) {
          out["transfer"] = to_json(phi.transfer());
          out["positivity"] = "sampled";
        } else if constexpr (std::is_same_v<T, provenance::ConvexCombination>) {
          out["weights"] = p.weights;
          json comps = json::array();
          for (const auto& c : p.components) comps.push_back(to_json(*c));
          out["components"] = std::move(comps);
        } else if constexpr (std::is_same_v<T, provenance::Composed>) {
          out["outer"] = to_json(*p.outer);
          out["inner"] = to_json(*p.inner);
        }
      },
      phi.provenance());
  return out;
}

inline PutMap channel_from_json(const json& j, const std::string& where = "channel") {
  const json& kind_j = detail::field(j, "kind", where);
  if (!kind_j.is_string()) detail::fail(where + ".kind", "expected a string");
  const std::string kind = kind_j.get<std::string>();
  const std::size_t n = detail::dimension(j, where);
  auto require_dim = [&](const PutMap& phi) {
    if (phi.dim() != n) throw DimensionError(where + ": declared n does not match the parameters");
    return phi;
  };

  if (kind == "identity") return identity_map(n);
  if (kind == "transpose") return transpose_map(n);
  if (kind == "depolarizing") return depolarizing(n);
  if (kind == "unitary-conj") return require_dim(unitary_conjugation(matrix_from_json(detail::field(j, "u", where), where + ".u")));
  if (kind == "cond-exp") {
    return require_dim(conditional_expectation(
        matrices_from_json(detail::field(j, "projections", where), where + ".projections")));
  }
  if (kind == "weighted-isometry") {
    const json& a_j = detail::field(j, "a", where);
    if (!a_j.is_array() || a_j.size() != n) detail::fail(where + ".a", "expected n rows");
    std::vector<double> a;
    for (std::size_t i = 0; i < n; ++i) {
      auto row = detail::real_vector(a_j[i], where + ".a[" + std::to_string(i) + "]");
      if (row.size() != n) detail::fail(where + ".a", "expected n columns");
      a.insert(a.end(), row.begin(), row.end());
    }
    const json& v_j = detail::field(j, "v", where);
    if (!v_j.is_array() || v_j.size() != n) detail::fail(where + ".v", "expected n rows of partial isometries");
    std::vector<ComplexMatrix> v;
    for (std::size_t i = 0; i < n; ++i) {
      auto row = matrices_from_json(v_j[i], where + ".v[" + std::to_string(i) + "]");
      if (row.size() != n) detail::fail(where + ".v", "expected n columns of partial isometries");
      v.insert(v.end(), row.begin(), row.end());
    }
    return require_dim(weighted_isometry_map(BistochasticMatrix(n, std::move(a), 1e-10), v));
  }
  if (kind == "entropy-target") {
    auto basis = matrices_from_json(detail::field(j, "basis", where), where + ".basis");
    auto mu = detail::real_vector(detail::field(j, "mu", where), where + ".mu");
    if (mu.size() != n) throw DimensionError(where + ".mu: expected n entries");
    return require_dim(entropy_target_map(basis, ProbabilityVector(std::move(mu))));
  }
  if (kind == "transfer-raw") {
    ComplexMatrix t = matrix_from_json(detail::field(j, "transfer", where), where + ".transfer");
    if (t.dim() != n * n) throw DimensionError(where + ".transfer: expected an n^2 x n^2 matrix");
    return transfer_raw(n, std::move(t));
  }
  if (kind == "convex-combo") {
    auto weights = detail::real_vector(detail::field(j, "weights", where), where + ".weights");
    const json& comps = detail::field(j, "components", where);
    if (!comps.is_array()) detail::fail(where + ".components", "expected an array");
    std::vector<PutMap> maps;
    for (std::size_t k = 0; k < comps.size(); ++k)
      maps.push_back(channel_from_json(comps[k], where + ".components[" + std::to_string(k) + "]"));
    return require_dim(convex_combination(weights, maps));
  }
  if (kind == "composed") {
    return require_dim(compose(channel_from_json(detail::field(j, "outer", where), where + ".outer"),
                               channel_from_json(detail::field(j, "inner", where), where + ".inner")));
  }
  detail::fail(where + ".kind", "unknown channel kind \"" + kind + "\"");
}

// --- instance files --------------------------------------------------------

struct GeneratorInfo {
  std::string kind;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::optional<double> target;
};

struct InstanceFile {
  int schema_version = kSchemaVersion;
  std::optional<ComplexMatrix> state;
  std::optional<PutMap> channel;
  std::optional<GeneratorInfo> generator;
};

inline json to_json(const InstanceFile& f) {
  json out = {{"schema_version", f.schema_version}};
  if (f.state) out["state"] = to_json(*f.state);
  if (f.channel) out["channel"] = to_json(*f.channel);
  if (f.generator) {
    json g = {{"kind", f.generator->kind}, {"n", f.generator->n}, {"seed", f.generator->seed}};
    if (f.generator->target) g["target"] = *f.generator->target;
    out["generator"] = std::move(g);
  }
  return out;
}

/// Canonical text form: two-space indent and a trailing newline.
inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

inline json parse_json(const std::string& text, const std::string& where) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(where + ": " + e.what());
  }
}

inline InstanceFile instance_from_json(const json& j, const std::string& where = "instance") {
  if (!j.is_object()) detail::fail(where, "expected an object");
  InstanceFile f;
  const json& version = detail::field(j, "schema_version", where);
  if (!version.is_number_integer()) detail::fail(where + ".schema_version", "expected an integer");
  f.schema_version = version.get<int>();
  if (f.schema_version != kSchemaVersion) {
    detail::fail(where + ".schema_version", "unsupported version " + std::to_string(f.schema_version));
  }
  if (j.contains("state")) f.state = matrix_from_json(j["state"], where + ".state");
  if (j.contains("channel")) f.channel = channel_from_json(j["channel"], where + ".channel");
  if (j.contains("generator")) {
    const json& g = j["generator"];
    GeneratorInfo info;
    const json& kind = detail::field(g, "kind", where + ".generator");
    if (!kind.is_string()) detail::fail(where + ".generator.kind", "expected a string");
    info.kind = kind.get<std::string>();
    info.n = detail::dimension(g, where + ".generator");
    const json& seed = detail::field(g, "seed", where + ".generator");
    if (!seed.is_number_unsigned()) detail::fail(where + ".generator.seed", "expected an unsigned integer");
    info.seed = seed.get<std::uint64_t>();
    if (g.contains("target")) info.target = detail::number(g["target"], where + ".generator.target");
    f.generator = info;
  }
  if (f.state && f.channel && f.state->dim() != f.channel->dim()) {
    throw DimensionError(where + ": state and channel dimensions differ");
  }
  return f;
}

inline InstanceFile parse_instance(const std::string& text, const std::string& where = "instance") {
  return instance_from_json(parse_json(text, where), where);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline InstanceFile load_instance(const std::string& path) { return parse_instance(read_file(path), path); }

// --- reports ---------------------------------------------------------------

struct ReportOptions {
  bool bits = false;
  bool include_witness = false;
  std::optional<double> timing_ms;
};

inline Truth overall(const std::vector<ConditionReport>& reports) {
  bool indeterminate = false;
  for (const auto& r : reports) {
    if (r.consistent == Truth::no) return Truth::no;
    if (r.consistent == Truth::indeterminate) indeterminate = true;
  }
  return indeterminate ? Truth::indeterminate : Truth::yes;
}

inline std::string_view verdict_name(Truth t) {
  switch (t) {
    case Truth::yes: return "consistent";
    case Truth::no: return "inconsistent";
    case Truth::indeterminate: return "indeterminate";
  }
  return "?";
}

inline json entropy_json(const EntropyTable& t, double unit) {
  return {{"S_rho", t.state / unit},
          {"S_out", t.output / unit},
          {"H_lambda_b", t.row_weighted / unit},
          {"H_mu_b", t.column_weighted / unit},
          {"S_rho_phi", t.averaged_out / unit},
          {"S_rho_phi_star", t.averaged_in / unit}};
}

inline json to_json(const ConditionReport& r, bool include_witness = false) {
  json conds = json::array();
  for (const auto& c : r.conditions) {
    conds.push_back({{"label", c.label},
                     {"value", std::string(to_string(c.value))},
                     {"residual", c.residual},
                     {"threshold", c.threshold}});
  }
  json out = {{"theorem", std::string(to_string(r.theorem))},
              {"consistent", std::string(to_string(r.consistent))},
              {"conditions", std::move(conds)},
              {"notes", r.notes}};
  if (!r.matching.empty()) out["matching"] = r.matching;
  if (include_witness && r.witness) out["witness"] = to_json(*r.witness);
  return out;
}

inline json validation_json(const ValidationReport& v) {
  return {{"unital_residual", v.unital_residual},
          {"trace_residual", v.trace_residual},
          {"positivity", v.positivity_certified ? "certified" : "sampled"},
          {"positivity_samples", v.positivity_samples},
          {"positivity_min_eigenvalue", v.positivity_min_eigenvalue},
          {"passed", v.passed()}};
}

/// Full analysis report. Timing is the only field that varies between runs.
inline json report_json(const PairAnalysis& pair, const std::vector<ConditionReport>& reports,
                        const ValidationReport& validation, const Tolerances& tol, const ReportOptions& options = {}) {
  const double unit = options.bits ? std::numbers::ln2 : 1.0;
  json reps = json::array();
  for (const auto& r : reports) reps.push_back(to_json(r, options.include_witness));
  json out = {{"schema_version", kSchemaVersion},
              {"n", pair.dim()},
              {"channel_kind", std::string(pair.phi.kind())},
              {"validation", validation_json(validation)},
              {"tolerance", tol.equality},
              {"units", options.bits ? "bits" : "nats"},
              {"lambda", pair.lambda().weights()},
              {"mu", pair.mu().weights()},
              {"b", to_json(pair.b)},
              {"entropies", entropy_json(pair.entropies, unit)},
              {"reports", std::move(reps)},
              {"verdict", std::string(verdict_name(overall(reports)))}};
  if (options.timing_ms) out["timing_ms"] = *options.timing_ms;
  return out;
}

namespace detail {

inline std::string fmt(double x, int precision = 12) {
  std::ostringstream ss;
  ss.precision(precision);
  ss << x;
  return ss.str();
}

inline std::string fmt_vector(std::span<const double> v) {
  std::string s = "(";
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? ", " : "") + fmt(v[k]);
  return s + ")";
}

}  // namespace detail

inline std::string report_text(const json& doc, bool verbose = false) {
  std::ostringstream out;
  out << "n = " << doc["n"].get<std::size_t>() << ", channel " << doc["channel_kind"].get<std::string>() << " ("
      << doc["validation"]["positivity"].get<std::string>() << " positivity)\n";
  out << "lambda = " << detail::fmt_vector(doc["lambda"].get<std::vector<double>>()) << "\n";
  out << "mu     = " << detail::fmt_vector(doc["mu"].get<std::vector<double>>()) << "\n";
  out << "b =\n";
  for (const auto& row : doc["b"]) out << "  " << detail::fmt_vector(row.get<std::vector<double>>()) << "\n";
  const std::string unit = doc["units"].get<std::string>();
  out << "entropies (" << unit << "):\n";
  const auto& e = doc["entropies"];
  for (const char* key : {"S_rho", "S_out", "H_lambda_b", "H_mu_b", "S_rho_phi", "S_rho_phi_star"}) {
    out << "  " << key << std::string(16 - std::string(key).size(), ' ') << detail::fmt(e[key].get<double>()) << "\n";
  }
  for (const auto& r : doc["reports"]) {
    const std::string c = r["consistent"].get<std::string>();
    out << r["theorem"].get<std::string>() << ": "
        << (c == "true" ? "consistent" : c == "false" ? "inconsistent" : "indeterminate") << "\n";
    for (const auto& c : r["conditions"]) {
      const std::string value = c["value"].get<std::string>();
      if (!verbose && value != "indeterminate") {
        out << "  " << c["label"].get<std::string>() << " = " << value << "\n";
      } else {
        out << "  " << c["label"].get<std::string>() << " = " << value << "  (residual "
            << detail::fmt(c["residual"].get<double>(), 3) << ", threshold " << detail::fmt(c["threshold"].get<double>(), 3)
            << ")\n";
      }
    }
    for (const auto& note : r["notes"]) out << "  note: " << note.get<std::string>() << "\n";
  }
  out << "verdict: " << doc["verdict"].get<std::string>() << "\n";
  return out.str();
}

}  // namespace entropylab::io

// entropylab command-line interface: analyze, generate, batch, selftest.

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "entropylab/acceptance.hpp"
#include "entropylab/generate.hpp"
#include "entropylab/io.hpp"
#include "entropylab/pair_analysis.hpp"
#include "entropylab/theorems.hpp"

#ifndef ENTROPYLAB_DEFAULT_ORACLE
#define ENTROPYLAB_DEFAULT_ORACLE "tests/data/oracle_instances.json"
#endif

namespace el = entropylab;
using el::io::json;

namespace {

enum Exit : int { kOk = 0, kInconsistent = 2, kIndeterminate = 3, kParse = 64, kValidation = 65 };

struct Common {
  std::string out;
  std::string format = "json";
  std::optional<double> tol;
  bool bits = false;
  bool verbose = false;
};

std::optional<double> equality_override(const Common& c) {
  if (c.tol) return c.tol;
  return el::equality_tolerance_from_env();
}

void emit(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw el::ParseError("cannot write " + c.out);
  f << text;
}

std::vector<std::size_t> parse_dims(const std::string& spec) {
  std::vector<std::size_t> dims;
  auto number = [&](const std::string& s) {
    std::size_t pos = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(s, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != s.size() || v == 0) throw el::ParseError("--dims: bad dimension \"" + s + "\"");
    return static_cast<std::size_t>(v);
  };
  const auto range = spec.find("..");
  if (range != std::string::npos) {
    const std::size_t lo = number(spec.substr(0, range));
    const std::size_t hi = number(spec.substr(range + 2));
    if (hi < lo) throw el::ParseError("--dims: empty range");
    for (std::size_t n = lo; n <= hi; ++n) dims.push_back(n);
    return dims;
  }
  std::size_t start = 0;
  while (start <= spec.size()) {
    const auto comma = spec.find(',', start);
    dims.push_back(number(spec.substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return dims;
}

// A channel file is either an instance file or a bare channel object.
el::PutMap load_channel(const std::string& path) {
  const json j = el::io::parse_json(el::io::read_file(path), path);
  if (j.is_object() && j.contains("schema_version")) {
    auto f = el::io::instance_from_json(j, path);
    if (!f.channel) throw el::ParseError(path + ": no channel in file");
    return *f.channel;
  }
  return el::io::channel_from_json(j, path);
}

int run_analyze(const Common& c, const std::string& state_path, const std::string& channel_path, std::size_t samples) {
  const auto start = std::chrono::steady_clock::now();
  const el::io::InstanceFile file = el::io::load_instance(state_path);
  if (!file.state) throw el::ParseError(state_path + ": no state in file");
  std::optional<el::PutMap> phi;
  if (!channel_path.empty()) {
    phi = load_channel(channel_path);
  } else if (file.channel) {
    phi = file.channel;
  } else {
    throw el::ParseError(state_path + ": no channel in file and no --channel given");
  }

  const el::ValidationReport validation = el::validate_put(*phi, samples);
  if (!validation.passed()) {
    std::cerr << "error: channel fails validation (unital residual " << validation.unital_residual
              << ", trace residual " << validation.trace_residual << ", min eigenvalue "
              << validation.positivity_min_eigenvalue << ")\n";
    return kValidation;
  }
  const el::PairAnalysis pair = el::analyze(el::DensityMatrix(*file.state), *phi);
  const el::Tolerances tol = el::Tolerances::for_dimension(pair.dim(), equality_override(c));
  const auto reports = el::check_all(pair, tol);

  el::io::ReportOptions options;
  options.bits = c.bits;
  options.include_witness = c.verbose;
  options.timing_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  const json doc = el::io::report_json(pair, reports, validation, tol, options);
  emit(c, c.format == "text" ? el::io::report_text(doc, c.verbose) : el::io::dump(doc));

  switch (el::io::overall(reports)) {
    case el::Truth::yes: return kOk;
    case el::Truth::no: return kInconsistent;
    case el::Truth::indeterminate: return kIndeterminate;
  }
  return kOk;
}

int run_generate(const Common& c, const std::string& kind, std::size_t n, std::uint64_t seed,
                 std::optional<double> target, bool pure) {
  if (!el::is_generator_kind(kind)) throw el::ParseError("unknown kind \"" + kind + "\"");
  el::GenerateOptions options;
  options.target = target;
  if (pure) options.state = el::StateMode::pure;
  const el::Instance inst = el::generate_instance(kind, n, seed, options);
  el::io::InstanceFile file;
  file.state = inst.state;
  file.channel = inst.channel;
  file.generator = el::io::GeneratorInfo{kind, n, seed, target};
  emit(c, el::io::dump(el::io::to_json(file)));
  return kOk;
}

int run_batch(const Common& c, std::size_t count, const std::string& dims_spec, std::uint64_t seed, unsigned parallel,
              const std::vector<std::string>& kinds_arg, bool pure) {
  if (count == 0) throw el::ParseError("--count must be at least 1");
  const auto dims = parse_dims(dims_spec);
  std::vector<std::string_view> kinds;
  for (const auto& k : kinds_arg) {
    if (!el::is_generator_kind(k)) throw el::ParseError("unknown kind \"" + k + "\"");
    kinds.push_back(k);
  }
  if (kinds.empty()) kinds.assign(el::kGeneratorKinds.begin(), el::kGeneratorKinds.end());
  el::GenerateOptions gen;
  if (pure) gen.state = el::StateMode::pure;

  std::vector<el::Instance> instances;
  instances.reserve(count);
  for (std::size_t k = 0; k < count; ++k) instances.push_back(el::batch_instance(k, dims, seed, kinds, gen));

  el::SuiteOptions options;
  options.equality_override = equality_override(c);
  options.threads = parallel == 0 ? std::max(1u, std::thread::hardware_concurrency()) : parallel;
  const el::SuiteReport suite = el::run_suite(instances, options);

  json tallies = json::object();
  json flagged = json::array();
  for (const auto& r : suite.results) {
    for (const auto& rep : r.reports) {
      json& t = tallies[std::string(el::to_string(rep.theorem))];
      if (t.is_null()) t = {{"evaluated", 0}, {"all_true", 0}, {"all_false", 0}, {"indeterminate", 0}, {"inconsistent", 0}};
      t["evaluated"] = t["evaluated"].get<int>() + 1;
      if (rep.all(el::Truth::yes)) t["all_true"] = t["all_true"].get<int>() + 1;
      if (rep.all(el::Truth::no)) t["all_false"] = t["all_false"].get<int>() + 1;
      if (rep.consistent == el::Truth::indeterminate) t["indeterminate"] = t["indeterminate"].get<int>() + 1;
      if (rep.consistent == el::Truth::no) t["inconsistent"] = t["inconsistent"].get<int>() + 1;
    }
    if (c.verbose || r.inconsistent() || r.indeterminate()) {
      json item = {{"index", r.index}, {"label", r.label}, {"n", r.dim}};
      if (!r.error.empty()) item["error"] = r.error;
      json reps = json::array();
      for (const auto& rep : r.reports) {
        if (c.verbose || rep.consistent != el::Truth::yes) reps.push_back(el::io::to_json(rep));
      }
      item["reports"] = std::move(reps);
      flagged.push_back(std::move(item));
    }
  }
  const json doc = {{"count", count},
                    {"dims", dims},
                    {"seed", seed},
                    {"inconsistencies", suite.inconsistencies},
                    {"indeterminate", suite.indeterminate},
                    {"chain_violations", suite.chain_violations},
                    {"errors", suite.errors},
                    {"theorems", tallies},
                    {"instances", flagged}};
  if (c.format == "text") {
    std::ostringstream out;
    out << count << " instances, n in " << dims_spec << ", seed " << seed << "\n"
        << "inconsistencies: " << suite.inconsistencies << "\n"
        << "indeterminate:   " << suite.indeterminate << "\n"
        << "chain violations: " << suite.chain_violations << "\n"
        << "errors:          " << suite.errors << "\n";
    for (const auto& [name, t] : tallies.items()) {
      out << name << ": " << t["evaluated"] << " evaluated, " << t["all_true"] << " all-true, " << t["all_false"]
          << " all-false, " << t["indeterminate"] << " indeterminate, " << t["inconsistent"] << " inconsistent\n";
    }
    for (const auto& item : flagged) out << "  #" << item["index"] << " " << item["label"].get<std::string>() << "\n";
    emit(c, out.str());
  } else {
    emit(c, el::io::dump(doc));
  }
  return suite.ok() ? kOk : kInconsistent;
}

int run_selftest(bool verbose, const std::string& data, unsigned parallel) {
  el::acceptance::Config cfg;
  cfg.oracle_file = data;
  cfg.threads = parallel == 0 ? 1 : parallel;
  bool all = true;
  for (const auto& r : el::acceptance::run_all(cfg)) {
    std::cout << el::acceptance::format_line(r, verbose) << "\n";
    all = all && r.passed;
  }
  return all ? kOk : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entropy of states under positive unital trace-preserving maps"};
  app.require_subcommand(1);
  Common common;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", common.out, "Write the result to this file instead of stdout");
    sub->add_option("--format", common.format, "Output format")->check(CLI::IsMember({"json", "text"}));
    sub->add_option("--tol", common.tol, "Equality tolerance (default 1e-8 * max(1, n), or ENTROPYLAB_TOL)")
        ->check(CLI::PositiveNumber);
    sub->add_flag("--bits", common.bits, "Display entropies in bits");
    sub->add_flag("--verbose", common.verbose, "Include residuals and per-instance detail");
  };

  std::string state_path;
  std::string channel_path;
  std::size_t samples = 200;
  auto* analyze = app.add_subcommand("analyze", "Analyze one (state, channel) pair");
  analyze->add_option("--state", state_path, "Instance file holding the state (and optionally the channel)")->required();
  analyze->add_option("--channel", channel_path, "Channel file (defaults to the channel in the state file)");
  analyze->add_option("--samples", samples, "Random pure inputs for the positivity check");
  add_common(analyze);

  std::string kind;
  std::size_t n = 3;
  std::uint64_t seed = 1;
  std::optional<double> target;
  bool pure = false;
  auto* generate = app.add_subcommand("generate", "Write a generated instance file");
  generate->add_option("--kind", kind, "Generator kind")->required();
  generate->add_option("--n,--dims", n, "Dimension")->check(CLI::PositiveNumber);
  generate->add_option("--seed", seed, "64-bit seed");
  generate->add_option("--target", target, "Entropy S(Phi(e_1)) for entropy-target, in nats");
  generate->add_flag("--pure", pure, "Draw a pure state");
  add_common(generate);

  std::size_t count = 100;
  std::string dims = "2..6";
  unsigned parallel = 1;
  std::vector<std::string> kinds;
  auto* batch = app.add_subcommand("batch", "Generate and check many instances");
  batch->add_option("--count", count, "Number of instances");
  batch->add_option("--dims", dims, "Dimensions: \"lo..hi\" or a comma list");
  batch->add_option("--seed", seed, "64-bit seed");
  batch->add_option("--parallel", parallel, "Worker threads (0 = hardware concurrency)");
  batch->add_option("--kind", kinds, "Restrict to these generator kinds");
  batch->add_flag("--pure", pure, "Draw pure states");
  add_common(batch);

  std::string data = ENTROPYLAB_DEFAULT_ORACLE;
  bool selftest_verbose = false;
  auto* selftest = app.add_subcommand("selftest", "Run the acceptance suite");
  selftest->add_option("--data", data, "Oracle instance file");
  selftest->add_option("--parallel", parallel, "Worker threads");
  selftest->add_flag("--verbose", selftest_verbose, "List residuals for every criterion");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kParse;
  }

  try {
    if (*analyze) return run_analyze(common, state_path, channel_path, samples);
    if (*generate) return run_generate(common, kind, n, seed, target, pure);
    if (*batch) return run_batch(common, count, dims, seed, parallel, kinds, pure);
    if (*selftest) return run_selftest(selftest_verbose, data, parallel);
  } catch (const el::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParse;
  } catch (const el::Error& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kValidation;
  }
  return kOk;
}

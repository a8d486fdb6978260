#pragma once

#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "etm/trace_io.hpp"

namespace etm {

// ---------------------------------------------------------------------------
// Exit codes are exhaustive and disjoint.

inline constexpr int kExitOk = 0;
inline constexpr int kExitThresholdViolation = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitRuntimeError = 3;

// ---------------------------------------------------------------------------
// File helpers. Everything is written in binary mode with LF endings so
// artifacts are byte-stable.

namespace detail {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write file: " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("short write: " + path.string());
}

inline std::string dump_pretty(const json& j) { return j.dump(2) + "\n"; }

// Line number of a byte offset, for parse errors anchored to the config file.
inline std::size_t line_of_offset(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn) {
  const std::size_t workers =
      std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

} // namespace detail

// ---------------------------------------------------------------------------
// Experiment configuration: one self-describing JSON document per invocation.

struct TargetSpec {
  enum class Kind { none, declared, oracle, file } kind = Kind::none;
  double declared_value = 0.0;
  std::optional<double> declared_tolerance;
  std::string file;
};

struct TheoremSection {
  std::string id; // "6.2-6.3" | "7.1-7.2"
  std::uint64_t horizon = 5000;
  double control_rate = 0.4;
  std::uint64_t control_horizon = 2000;
  std::string fixtures = "fixtures/thresholds.json";
};

struct ExperimentConfig {
  std::uint32_t schema_version = 1;
  std::string mode; // run | parallel-run | oracle | analyze | theorem-check
  std::optional<AlgorithmSpec> algorithm;
  std::optional<ParallelSpec> parallel;
  RunOptions run_options;
  std::vector<std::uint64_t> seeds;
  std::string output;
  double cost_normalizer = 1000.0;
  TargetSpec target;
  std::optional<double> error_r;
  std::vector<double> epsilon_grid;
  std::optional<ObjectiveSpec> objective; // oracle / analyze modes
  std::vector<std::string> trace_files;   // analyze mode
  std::optional<TheoremSection> theorem;
  std::filesystem::path base_dir; // directory of the config file, for paths
};

namespace detail {

inline std::vector<std::uint64_t> seeds_from_json(const json& j) {
  std::vector<std::uint64_t> seeds;
  if (j.is_array()) {
    for (const json& s : j) seeds.push_back(s.get<std::uint64_t>());
  } else if (j.is_object()) {
    require_keys(j, "seeds", {"from", "to"});
    const auto from = j.at("from").get<std::uint64_t>();
    const auto to = j.at("to").get<std::uint64_t>();
    if (to < from) throw DecodeError("seeds: \"to\" below \"from\"");
    for (std::uint64_t s = from; s <= to; ++s) seeds.push_back(s);
  } else {
    throw DecodeError("seeds: expected a list or {from, to}");
  }
  if (seeds.empty()) throw DecodeError("seeds: empty seed set");
  return seeds;
}

inline json seeds_to_json(const std::vector<std::uint64_t>& seeds) { return json(seeds); }

// TSP distance matrices may be referenced as a plain CSV file; the canonical
// form always inlines the matrix.
inline std::vector<std::vector<double>> load_matrix_csv(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  std::vector<std::vector<double>> matrix;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw DecodeError("matrix csv " + path.string() + ": bad cell \"" + cell + "\"");
      }
    }
    matrix.push_back(std::move(row));
  }
  if (matrix.empty()) throw DecodeError("matrix csv " + path.string() + ": empty file");
  return matrix;
}

inline void inline_matrix_csv(json& objective, const std::filesystem::path& base_dir) {
  if (!objective.is_object()) return;
  if (objective.value("type", "") != "tsp" || !objective.contains("matrix_csv")) return;
  require_keys(objective, "objective", {"type", "matrix_csv"});
  const std::string rel = objective.at("matrix_csv").get<std::string>();
  objective = json{{"type", "tsp"}, {"matrix", load_matrix_csv(base_dir / rel)}};
}

inline TargetSpec target_from_json(const json& j) {
  TargetSpec target;
  if (j.contains("declared")) {
    require_keys(j, "target", {"declared"}, {"tolerance"});
    target.kind = TargetSpec::Kind::declared;
    target.declared_value = j.at("declared").get<double>();
    if (j.contains("tolerance")) target.declared_tolerance = j.at("tolerance").get<double>();
  } else if (j.contains("oracle")) {
    require_keys(j, "target", {"oracle"});
    if (!j.at("oracle").get<bool>()) throw DecodeError("target.oracle must be true when given");
    target.kind = TargetSpec::Kind::oracle;
  } else if (j.contains("file")) {
    require_keys(j, "target", {"file"});
    target.kind = TargetSpec::Kind::file;
    target.file = j.at("file").get<std::string>();
  } else {
    throw DecodeError("target: expected one of declared / oracle / file");
  }
  return target;
}

inline json target_to_json(const TargetSpec& target) {
  switch (target.kind) {
    case TargetSpec::Kind::declared: {
      json j = {{"declared", target.declared_value}};
      if (target.declared_tolerance) j["tolerance"] = *target.declared_tolerance;
      return j;
    }
    case TargetSpec::Kind::oracle:
      return {{"oracle", true}};
    case TargetSpec::Kind::file:
      return {{"file", target.file}};
    case TargetSpec::Kind::none:
      break;
  }
  return nullptr;
}

} // namespace detail

// Parses and validates a config document. Unknown fields are rejected;
// validation happens before any artifact is written.
inline ExperimentConfig parse_experiment_config(const json& doc,
                                                const std::filesystem::path& base_dir) {
  ExperimentConfig cfg;
  cfg.base_dir = base_dir;
  if (!doc.is_object()) throw DecodeError("config: expected a JSON object");
  if (!doc.contains("mode") || !doc.at("mode").is_string())
    throw DecodeError("config: missing \"mode\"");
  cfg.mode = doc.at("mode").get<std::string>();
  if (!doc.contains("schema_version") ||
      doc.at("schema_version").get<std::uint32_t>() != 1)
    throw DecodeError("config: schema_version must be 1");

  if (cfg.mode == "run" || cfg.mode == "parallel-run") {
    if (cfg.mode == "run") {
      detail::require_keys(doc, "config",
                           {"schema_version", "mode", "algorithm", "termination", "seeds"},
                           {"output", "inductive_window", "cost_normalizer", "target",
                            "analysis"});
      json algo = doc.at("algorithm");
      if (algo.is_object() && algo.contains("objective"))
        detail::inline_matrix_csv(algo.at("objective"), base_dir);
      cfg.algorithm = algorithm_from_json(algo);
      validate_algorithm(*cfg.algorithm);
    } else {
      detail::require_keys(doc, "config",
                           {"schema_version", "mode", "parallel", "termination", "seeds"},
                           {"output", "inductive_window", "cost_normalizer", "target",
                            "analysis"});
      json par = doc.at("parallel");
      if (par.is_object() && par.contains("submachines") && par.at("submachines").is_array())
        for (json& sub : par.at("submachines"))
          if (sub.is_object() && sub.contains("algorithm") &&
              sub.at("algorithm").contains("objective"))
            detail::inline_matrix_csv(sub.at("algorithm").at("objective"), base_dir);
      cfg.parallel = parallel_from_json(par);
      validate_parallel(*cfg.parallel);
    }
    cfg.run_options = run_options_from_json(
        doc.at("termination"),
        doc.contains("inductive_window") ? doc.at("inductive_window") : json(50));
    validate_run_options(cfg.run_options);
    cfg.seeds = detail::seeds_from_json(doc.at("seeds"));
    if (doc.contains("cost_normalizer")) {
      cfg.cost_normalizer = doc.at("cost_normalizer").get<double>();
      if (!(cfg.cost_normalizer > 0.0))
        throw DecodeError("cost_normalizer must be positive");
    }
    if (doc.contains("target")) cfg.target = detail::target_from_json(doc.at("target"));
    if (doc.contains("analysis")) {
      const json& a = doc.at("analysis");
      detail::require_keys(a, "analysis", {}, {"error_r", "epsilon_grid"});
      if (a.contains("error_r")) cfg.error_r = a.at("error_r").get<double>();
      if (a.contains("epsilon_grid"))
        cfg.epsilon_grid = a.at("epsilon_grid").get<std::vector<double>>();
    }
  } else if (cfg.mode == "oracle") {
    detail::require_keys(doc, "config", {"schema_version", "mode", "objective"}, {"output"});
    json obj = doc.at("objective");
    detail::inline_matrix_csv(obj, base_dir);
    cfg.objective = objective_from_json(obj);
    validate_objective(*cfg.objective);
  } else if (cfg.mode == "analyze") {
    detail::require_keys(doc, "config", {"schema_version", "mode", "traces", "target"},
                         {"output", "objective", "analysis"});
    cfg.trace_files = doc.at("traces").get<std::vector<std::string>>();
    if (cfg.trace_files.empty()) throw DecodeError("analyze: empty trace list");
    cfg.target = detail::target_from_json(doc.at("target"));
    if (doc.contains("objective")) {
      json obj = doc.at("objective");
      detail::inline_matrix_csv(obj, base_dir);
      cfg.objective = objective_from_json(obj);
      validate_objective(*cfg.objective);
    }
    if (doc.contains("analysis")) {
      const json& a = doc.at("analysis");
      detail::require_keys(a, "analysis", {}, {"error_r", "epsilon_grid"});
      if (a.contains("error_r")) cfg.error_r = a.at("error_r").get<double>();
      if (a.contains("epsilon_grid"))
        cfg.epsilon_grid = a.at("epsilon_grid").get<std::vector<double>>();
    }
    if (cfg.target.kind == TargetSpec::Kind::oracle && !cfg.objective)
      throw DecodeError("analyze: an oracle target needs an \"objective\"");
  } else if (cfg.mode == "theorem-check") {
    detail::require_keys(doc, "config",
                         {"schema_version", "mode", "theorem", "seeds"},
                         {"output", "algorithm", "parallel", "target"});
    const json& t = doc.at("theorem");
    detail::require_keys(t, "theorem", {"id"},
                         {"horizon", "control_rate", "control_horizon", "fixtures"});
    TheoremSection section;
    section.id = t.at("id").get<std::string>();
    if (section.id != "6.2-6.3" && section.id != "7.1-7.2")
      throw DecodeError("theorem.id must be \"6.2-6.3\" or \"7.1-7.2\"");
    if (t.contains("horizon")) section.horizon = t.at("horizon").get<std::uint64_t>();
    if (t.contains("control_rate")) section.control_rate = t.at("control_rate").get<double>();
    if (t.contains("control_horizon"))
      section.control_horizon = t.at("control_horizon").get<std::uint64_t>();
    if (t.contains("fixtures")) section.fixtures = t.at("fixtures").get<std::string>();
    cfg.theorem = section;
    cfg.seeds = detail::seeds_from_json(doc.at("seeds"));
    if (section.id == "6.2-6.3") {
      if (!doc.contains("algorithm"))
        throw DecodeError("theorem 6.2-6.3 needs an \"algorithm\"");
      json algo = doc.at("algorithm");
      if (algo.contains("objective")) detail::inline_matrix_csv(algo.at("objective"), base_dir);
      cfg.algorithm = algorithm_from_json(algo);
      validate_algorithm(*cfg.algorithm);
    } else {
      if (!doc.contains("parallel"))
        throw DecodeError("theorem 7.1-7.2 needs a \"parallel\" spec");
      json par = doc.at("parallel");
      if (par.contains("submachines") && par.at("submachines").is_array())
        for (json& sub : par.at("submachines"))
          if (sub.contains("algorithm") && sub.at("algorithm").contains("objective"))
            detail::inline_matrix_csv(sub.at("algorithm").at("objective"), base_dir);
      cfg.parallel = parallel_from_json(par);
      validate_parallel(*cfg.parallel);
    }
    if (doc.contains("target")) cfg.target = detail::target_from_json(doc.at("target"));
  } else {
    throw DecodeError("config: unknown mode \"" + cfg.mode + "\"");
  }

  if (doc.contains("output")) cfg.output = doc.at("output").get<std::string>();
  return cfg;
}

// Canonical (normalized) form of a parsed config; parsing its dump yields an
// identical document.
inline json canonical_config_json(const ExperimentConfig& cfg) {
  json j;
  j["schema_version"] = cfg.schema_version;
  j["mode"] = cfg.mode;
  if (cfg.algorithm) j["algorithm"] = json_of(*cfg.algorithm);
  if (cfg.parallel) j["parallel"] = json_of(*cfg.parallel);
  if (cfg.mode == "run" || cfg.mode == "parallel-run") {
    json terms = json::array();
    for (const auto& c : cfg.run_options.terminations) terms.push_back(json_of(c));
    j["termination"] = terms;
    j["inductive_window"] = cfg.run_options.inductive_window
                                ? json(*cfg.run_options.inductive_window)
                                : json(nullptr);
    j["cost_normalizer"] = cfg.cost_normalizer;
    if (!cfg.epsilon_grid.empty() || cfg.error_r) {
      json a = json::object();
      if (cfg.error_r) a["error_r"] = *cfg.error_r;
      if (!cfg.epsilon_grid.empty()) a["epsilon_grid"] = cfg.epsilon_grid;
      j["analysis"] = a;
    }
  }
  if (!cfg.seeds.empty()) j["seeds"] = detail::seeds_to_json(cfg.seeds);
  if (cfg.target.kind != TargetSpec::Kind::none)
    j["target"] = detail::target_to_json(cfg.target);
  if (cfg.objective) j["objective"] = json_of(*cfg.objective);
  if (!cfg.trace_files.empty()) j["traces"] = cfg.trace_files;
  if (cfg.theorem) {
    j["theorem"] = {{"id", cfg.theorem->id},
                    {"horizon", cfg.theorem->horizon},
                    {"control_rate", cfg.theorem->control_rate},
                    {"control_horizon", cfg.theorem->control_horizon},
                    {"fixtures", cfg.theorem->fixtures}};
  }
  if (!cfg.output.empty()) j["output"] = cfg.output;
  return j;
}

} // namespace etm

#include "etm/detail/experiment_impl.hpp"

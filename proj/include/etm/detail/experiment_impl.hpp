#pragma once

// Command implementations behind the experiment runner; included from
// etm/experiment.hpp.

namespace etm {

struct RunOverrides {
  std::optional<std::string> out;
  std::optional<std::vector<std::uint64_t>> seeds;
  bool pilot = false;
};

namespace detail {

struct ResolvedTarget {
  double value = 0.0;
  double tolerance = 0.0;
  json echo; // what the summary reports as the target
};

inline OptimalSet read_optimal_set_file(const std::filesystem::path& path,
                                        ObjectiveSpec& objective_out) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw DecodeError("optimal set file " + path.string() + ": " + e.what());
  }
  require_keys(doc, "optimal_set_file", {"schema_version", "objective", "optimal_set"});
  objective_out = objective_from_json(doc.at("objective"));
  return optimal_set_from_json(doc.at("optimal_set"), natural_representation(objective_out));
}

inline ResolvedTarget resolve_target(const TargetSpec& target, const ObjectiveSpec& objective,
                                     const std::filesystem::path& base_dir) {
  ResolvedTarget resolved;
  switch (target.kind) {
    case TargetSpec::Kind::declared:
      resolved.value = target.declared_value;
      resolved.tolerance = target.declared_tolerance.value_or(optimum_tolerance(objective));
      break;
    case TargetSpec::Kind::oracle: {
      const OptimalSet set = brute_force_optimum(objective);
      resolved.value = *set.optimum_value;
      resolved.tolerance = optimum_tolerance(objective);
      break;
    }
    case TargetSpec::Kind::file: {
      ObjectiveSpec file_objective;
      const OptimalSet set =
          read_optimal_set_file(base_dir / target.file, file_objective);
      if (!set.optimum_value)
        throw AnalysisError("optimal set file carries no optimum value");
      resolved.value = *set.optimum_value;
      resolved.tolerance = optimum_tolerance(file_objective);
      break;
    }
    case TargetSpec::Kind::none:
      throw AnalysisError("no target configured");
  }
  resolved.echo = {{"optimum_value", resolved.value}, {"tolerance", resolved.tolerance}};
  return resolved;
}

// Joint optimum of a parallel spec: per-component exhaustive optima combined
// by f13 (monotone in every component, so component-wise optimality is joint
// optimality).
inline ResolvedTarget resolve_parallel_target(const TargetSpec& target,
                                              const ParallelSpec& spec,
                                              const std::filesystem::path& base_dir) {
  if (target.kind == TargetSpec::Kind::declared || target.kind == TargetSpec::Kind::file)
    return resolve_target(target, spec.submachines.front().algorithm.objective, base_dir);
  ResolvedTarget resolved;
  std::vector<double> components;
  bool all_integer = true;
  for (const auto& sub : spec.submachines) {
    const OptimalSet set = brute_force_optimum(sub.algorithm.objective);
    components.push_back(*set.optimum_value);
    all_integer = all_integer && integer_valued(sub.algorithm.objective);
  }
  resolved.value = combine(spec.combiner, components);
  resolved.tolerance = all_integer ? 0.0 : 1e-9;
  resolved.echo = {{"optimum_value", resolved.value},
                   {"tolerance", resolved.tolerance},
                   {"components", components}};
  return resolved;
}

inline ComputationClass classify_parallel(const ParallelSpec& spec, const RunOptions& opts) {
  AlgorithmSpec probe = spec.submachines.front().algorithm;
  bool all_elitist = true;
  for (const auto& sub : spec.submachines)
    all_elitist = all_elitist && sub.algorithm.selection.elitism;
  probe.selection.elitism = all_elitist;
  return classify_computation(probe, opts);
}

inline json aggregate_json(const AggregateValue& value) {
  if (const auto* scalar = std::get_if<double>(&value)) return *scalar;
  const auto& pair = std::get<std::pair<double, double>>(value);
  return json::array({pair.first, pair.second});
}

struct SeedArtifact {
  std::string csv;
  json summary;
  std::vector<double> distances; // empty when no target is configured
};

inline json base_summary(const ExperimentConfig& cfg, std::string_view class_label) {
  json j;
  j["schema_version"] = 1;
  j["rng_version"] = std::string(rng::kVersion);
  j["mode"] = cfg.mode;
  j["computation_class"] = std::string(class_label);
  j["config"] = canonical_config_json(cfg);
  return j;
}

inline void fill_outcome_summary(json& run_json, const ExperimentConfig& cfg,
                                 const AggregatorSpec& aggregator,
                                 std::span<const GenerationRecord> records,
                                 const HaltReason& halt,
                                 const std::optional<InductiveResult>& inductive) {
  const GenerationRecord& last = records.back();
  run_json["halt_reason"] = std::string(halt_kind_name(halt.kind));
  run_json["halt_condition_index"] = halt.condition_index;
  run_json["generations"] = last.t;
  run_json["best_f3"] = last.best_f3;
  run_json["best_genome"] = json_of(last.best_genome);
  run_json["evaluations"] = last.cost.evaluations;
  run_json["variations"] = last.cost.variations;
  const double f2 = search_cost_value(last.cost, cfg.cost_normalizer);
  run_json["f2"] = f2;
  run_json["f1"] = aggregate_json(aggregate(aggregator, f2, last.best_f3));
  if (inductive) {
    run_json["inductive"] = {{"genome", json_of(inductive->genome)},
                             {"f3", inductive->f3},
                             {"stable_since", inductive->stable_since},
                             {"emitted_at", inductive->emitted_at}};
  } else {
    run_json["inductive"] = nullptr;
  }
}

inline int cmd_run(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
  const bool is_parallel = cfg.mode == "parallel-run";
  std::optional<ResolvedTarget> target;
  if (cfg.target.kind != TargetSpec::Kind::none)
    target = is_parallel
                 ? resolve_parallel_target(cfg.target, *cfg.parallel, cfg.base_dir)
                 : resolve_target(cfg.target, cfg.algorithm->objective, cfg.base_dir);

  const std::string class_label{computation_class_name(
      is_parallel ? classify_parallel(*cfg.parallel, cfg.run_options)
                  : classify_computation(*cfg.algorithm, cfg.run_options))};

  std::vector<SeedArtifact> artifacts(cfg.seeds.size());
  parallel_for(cfg.seeds.size(), [&](std::size_t i) {
    const std::uint64_t seed = cfg.seeds[i];
    SeedArtifact art;
    art.summary["seed"] = seed;
    if (!is_parallel) {
      AlgorithmSpec spec = *cfg.algorithm;
      spec.master_seed += seed;
      const Population x0 =
          init_population(spec.representation, spec.population_size, spec.master_seed);
      const RunTrace trace = run(spec, x0, cfg.run_options);
      art.csv = trace_csv(trace);
      art.summary["master_seed"] = spec.master_seed;
      fill_outcome_summary(art.summary, cfg, spec.aggregator, trace.records,
                           trace.halt_reason, trace.inductive);
      if (target) {
        art.distances = distance_series(trace, declared_optimum(target->value));
        art.summary["verdict"] = json_of(verdict_from_distance_series(
            art.distances, target->tolerance, cfg.error_r, cfg.epsilon_grid));
      }
    } else {
      ParallelSpec spec = *cfg.parallel;
      for (auto& sub : spec.submachines) sub.algorithm.master_seed += seed;
      const Population x0 = init_population(
          spec.submachines.front().algorithm.representation, spec.whole_size(),
          spec.submachines.front().algorithm.master_seed);
      const ParallelRunTrace trace = run_parallel(spec, x0, cfg.run_options);
      art.csv = trace_csv(trace);
      art.summary["master_seed"] = spec.submachines.front().algorithm.master_seed;
      fill_outcome_summary(art.summary, cfg,
                           spec.submachines.front().algorithm.aggregator, trace.records,
                           trace.halt_reason, trace.inductive);
      art.summary["f3_components"] = trace.records.back().parallel->joint.components;
      if (target) {
        art.distances = distance_series(trace, target->value);
        art.summary["verdict"] = json_of(verdict_from_distance_series(
            art.distances, target->tolerance, cfg.error_r, cfg.epsilon_grid));
      }
    }
    artifacts[i] = std::move(art);
  });

  std::filesystem::create_directories(out_dir);
  json summary = base_summary(cfg, class_label);
  if (target) summary["target"] = target->echo;
  json runs = json::array();
  for (std::size_t i = 0; i < artifacts.size(); ++i) {
    const std::string name = "trace_seed" + std::to_string(cfg.seeds[i]) + ".csv";
    write_file(out_dir / name, artifacts[i].csv);
    artifacts[i].summary["trace"] = name;
    runs.push_back(artifacts[i].summary);
  }
  summary["runs"] = runs;
  if (target) {
    std::vector<std::vector<double>> series;
    series.reserve(artifacts.size());
    for (auto& art : artifacts) series.push_back(std::move(art.distances));
    summary["expected_distance_verdict"] = json_of(verdict_from_distance_series(
        expected_distance_series(series), target->tolerance, cfg.error_r, cfg.epsilon_grid));
  }
  write_file(out_dir / "summary.json", dump_pretty(summary));
  return kExitOk;
}

inline int cmd_oracle(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
  const OptimalSet set = brute_force_optimum(*cfg.objective);
  json doc;
  doc["schema_version"] = 1;
  doc["objective"] = json_of(*cfg.objective);
  doc["optimal_set"] = json_of(set);
  std::filesystem::create_directories(out_dir);
  write_file(out_dir / "optimal_set.json", dump_pretty(doc));
  return kExitOk;
}

inline int cmd_analyze(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
  ResolvedTarget target;
  if (cfg.target.kind == TargetSpec::Kind::declared && !cfg.objective &&
      !cfg.target.declared_tolerance)
    throw DecodeError("analyze: a declared target needs a tolerance or an objective");
  if (cfg.target.kind == TargetSpec::Kind::declared && cfg.objective)
    target = resolve_target(cfg.target, *cfg.objective, cfg.base_dir);
  else if (cfg.target.kind == TargetSpec::Kind::declared) {
    target.value = cfg.target.declared_value;
    target.tolerance = *cfg.target.declared_tolerance;
    target.echo = {{"optimum_value", target.value}, {"tolerance", target.tolerance}};
  } else if (cfg.target.kind == TargetSpec::Kind::oracle) {
    target = resolve_target(cfg.target, *cfg.objective, cfg.base_dir);
  } else {
    target = resolve_target(cfg.target, OneMaxMin{1} /* unused for file targets */,
                            cfg.base_dir);
  }

  json traces = json::array();
  std::vector<std::vector<double>> all_series;
  for (const std::string& rel : cfg.trace_files) {
    const TraceSeries series = read_trace_csv(read_file(cfg.base_dir / rel));
    std::vector<double> dist;
    dist.reserve(series.best_f3.size());
    for (double v : series.best_f3) dist.push_back(std::abs(v - target.value));
    const ConvergenceVerdict verdict = verdict_from_distance_series(
        dist, target.tolerance, cfg.error_r, cfg.epsilon_grid);
    traces.push_back({{"path", rel}, {"verdict", json_of(verdict)}});
    all_series.push_back(std::move(dist));
  }

  json doc;
  doc["schema_version"] = 1;
  doc["target"] = target.echo;
  doc["traces"] = traces;
  doc["expected_distance_verdict"] = json_of(verdict_from_distance_series(
      expected_distance_series(all_series), target.tolerance, cfg.error_r,
      cfg.epsilon_grid));
  std::filesystem::create_directories(out_dir);
  write_file(out_dir / "verdicts.json", dump_pretty(doc));
  return kExitOk;
}

// ---------------------------------------------------------------------------
// Thresholds: pinned defaults live in TheoremThresholds; the committed
// fixtures file freezes them together with the pilot observations.

inline json json_of(const TheoremThresholds& t) {
  return {{"min_hit_rate_6_2", t.min_hit_rate_6_2},
          {"min_maintenance_rate", t.min_maintenance_rate},
          {"min_found_then_lost_seeds", t.min_found_then_lost_seeds},
          {"max_hit_rate_zero_mutation", t.max_hit_rate_zero_mutation},
          {"transition_tolerance", t.transition_tolerance},
          {"min_hit_rate_7_1", t.min_hit_rate_7_1},
          {"max_hit_rate_7_2", t.max_hit_rate_7_2}};
}

inline TheoremThresholds thresholds_from_json(const json& j) {
  require_keys(j, "thresholds",
               {"min_hit_rate_6_2", "min_maintenance_rate", "min_found_then_lost_seeds",
                "max_hit_rate_zero_mutation", "transition_tolerance", "min_hit_rate_7_1",
                "max_hit_rate_7_2"});
  TheoremThresholds t;
  t.min_hit_rate_6_2 = j.at("min_hit_rate_6_2").get<double>();
  t.min_maintenance_rate = j.at("min_maintenance_rate").get<double>();
  t.min_found_then_lost_seeds = j.at("min_found_then_lost_seeds").get<std::uint64_t>();
  t.max_hit_rate_zero_mutation = j.at("max_hit_rate_zero_mutation").get<double>();
  t.transition_tolerance = j.at("transition_tolerance").get<double>();
  t.min_hit_rate_7_1 = j.at("min_hit_rate_7_1").get<double>();
  t.max_hit_rate_7_2 = j.at("max_hit_rate_7_2").get<double>();
  return t;
}

inline int cmd_theorem_check(const ExperimentConfig& cfg,
                             const std::filesystem::path& out_dir, bool force_pilot) {
  const TheoremSection& section = *cfg.theorem;
  const std::filesystem::path fixtures_path = cfg.base_dir / section.fixtures;

  TheoremThresholds thresholds; // spec defaults, pinned in code
  bool pilot = force_pilot || !std::filesystem::exists(fixtures_path);
  if (!pilot) {
    json doc;
    try {
      doc = json::parse(read_file(fixtures_path));
    } catch (const json::exception& e) {
      throw DecodeError("fixtures " + fixtures_path.string() + ": " + e.what());
    }
    require_keys(doc, "fixtures", {"schema_version", "rng_version", "thresholds"},
                 {"pilot"});
    thresholds = thresholds_from_json(doc.at("thresholds"));
  }

  std::vector<TheoremReport> reports;
  if (section.id == "6.2-6.3") {
    ElitismTheoremInput input;
    input.algorithm = *cfg.algorithm;
    TargetSpec target = cfg.target;
    if (target.kind == TargetSpec::Kind::none) target.kind = TargetSpec::Kind::oracle;
    const ResolvedTarget resolved =
        resolve_target(target, cfg.algorithm->objective, cfg.base_dir);
    input.target = declared_optimum(resolved.value);
    input.seeds = cfg.seeds;
    input.horizon = section.horizon;
    input.control_rate = section.control_rate;
    input.control_horizon = section.control_horizon;
    const std::string configuration = json{{"algorithm", json_of(*cfg.algorithm)},
                                           {"horizon", section.horizon},
                                           {"control_rate", section.control_rate},
                                           {"control_horizon", section.control_horizon}}
                                          .dump();
    auto [optimality, completeness] = check_theorem_6_2_6_3(input, thresholds, configuration);
    reports.push_back(std::move(optimality));
    reports.push_back(std::move(completeness));
  } else {
    ParallelTheoremInput input;
    input.parallel = *cfg.parallel;
    const ResolvedTarget resolved =
        resolve_parallel_target(cfg.target, *cfg.parallel, cfg.base_dir);
    input.joint_optimum = resolved.value;
    input.tolerance = resolved.tolerance;
    input.seeds = cfg.seeds;
    input.horizon = section.horizon;
    const std::string configuration = json{{"parallel", json_of(*cfg.parallel)},
                                           {"horizon", section.horizon},
                                           {"joint_optimum", resolved.value}}
                                          .dump();
    auto [cooperative, competitive] = check_theorem_7_1_7_2(input, thresholds, configuration);
    reports.push_back(std::move(cooperative));
    reports.push_back(std::move(competitive));
  }

  json doc;
  doc["schema_version"] = 1;
  doc["pilot"] = pilot;
  doc["thresholds"] = json_of(thresholds);
  json report_array = json::array();
  bool all_passed = true;
  for (const TheoremReport& r : reports) {
    report_array.push_back(json_of(r));
    all_passed = all_passed && r.passed;
  }
  doc["reports"] = report_array;
  std::filesystem::create_directories(out_dir);
  write_file(out_dir / "theorem_report.json", dump_pretty(doc));

  if (pilot) {
    json fixtures;
    if (std::filesystem::exists(fixtures_path)) {
      try {
        fixtures = json::parse(read_file(fixtures_path));
      } catch (const json::exception&) {
        fixtures = json::object();
      }
    }
    fixtures["schema_version"] = 1;
    fixtures["rng_version"] = std::string(rng::kVersion);
    fixtures["thresholds"] = json_of(thresholds);
    if (!fixtures.contains("pilot")) fixtures["pilot"] = json::object();
    for (const TheoremReport& r : reports) {
      json obs = {{"hit_rate", r.hit_rate},
                  {"maintenance_rate", r.maintenance_rate},
                  {"success_count", r.success_count},
                  {"seed_count", r.seeds.size()}};
      for (const auto& [k, v] : r.metrics) obs[k] = v;
      fixtures["pilot"][r.theorem_id] = obs;
    }
    std::filesystem::create_directories(fixtures_path.parent_path());
    write_file(fixtures_path, dump_pretty(fixtures));
    return kExitOk;
  }
  return all_passed ? kExitOk : kExitThresholdViolation;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Entry point shared by the CLI and the tests.

inline int run_experiment(const std::filesystem::path& config_path,
                          const RunOverrides& overrides = {}) {
  const std::string text = detail::read_file(config_path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DecodeError(config_path.string() + ":" +
                      std::to_string(detail::line_of_offset(text, e.byte)) + ": " +
                      e.what());
  }
  ExperimentConfig cfg = parse_experiment_config(doc, config_path.parent_path());
  if (overrides.seeds) {
    if (cfg.mode == "oracle" || cfg.mode == "analyze")
      throw DecodeError("--seeds does not apply to mode \"" + cfg.mode + "\"");
    cfg.seeds = *overrides.seeds;
  }

  std::filesystem::path out_dir;
  if (overrides.out)
    out_dir = *overrides.out;
  else if (!cfg.output.empty())
    out_dir = cfg.base_dir / cfg.output;
  else
    throw DecodeError("no output directory: set \"output\" in the config or pass --out");

  if (cfg.mode == "run" || cfg.mode == "parallel-run")
    return detail::cmd_run(cfg, out_dir);
  if (cfg.mode == "oracle") return detail::cmd_oracle(cfg, out_dir);
  if (cfg.mode == "analyze") return detail::cmd_analyze(cfg, out_dir);
  return detail::cmd_theorem_check(cfg, out_dir, overrides.pilot);
}

// Seed specs on the command line: "7", "1,2,9" or "0..99".
inline std::vector<std::uint64_t> parse_seed_spec(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  const auto parse_one = [](const std::string& s) {
    try {
      return static_cast<std::uint64_t>(std::stoull(s));
    } catch (const std::exception&) {
      throw ConfigError("bad seed \"" + s + "\"");
    }
  };
  const std::size_t dots = text.find("..");
  if (dots != std::string::npos) {
    const std::uint64_t from = parse_one(text.substr(0, dots));
    const std::uint64_t to = parse_one(text.substr(dots + 2));
    if (to < from) throw ConfigError("seed range end below start");
    for (std::uint64_t s = from; s <= to; ++s) seeds.push_back(s);
    return seeds;
  }
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string piece =
        text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (!piece.empty()) seeds.push_back(parse_one(piece));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (seeds.empty()) throw ConfigError("empty seed spec");
  return seeds;
}

} // namespace etm

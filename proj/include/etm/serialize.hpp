#pragma once

#include <initializer_list>
#include <string>
#include <string_view>

#include "json.hpp"

#include "etm/parallel.hpp"

namespace etm {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Strict decoding: unknown fields are rejected, required fields must be
// present. Canonical form is nlohmann's compact dump, which sorts object keys
// and prints shortest round-trip numbers, so two encodings of the same spec
// content are byte-identical.

namespace detail {

inline void require_keys(const json& j, std::string_view what,
                         std::initializer_list<std::string_view> required,
                         std::initializer_list<std::string_view> optional = {}) {
  if (!j.is_object())
    throw DecodeError(std::string(what) + ": expected a JSON object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (auto k : required)
      if (item.key() == k) known = true;
    for (auto k : optional)
      if (item.key() == k) known = true;
    if (!known)
      throw DecodeError(std::string(what) + ": unknown field \"" + item.key() + "\"");
  }
  for (auto k : required)
    if (!j.contains(k))
      throw DecodeError(std::string(what) + ": missing field \"" + std::string(k) + "\"");
}

template <typename T>
T get_as(const json& j, std::string_view what, std::string_view key) {
  try {
    return j.at(std::string(key)).get<T>();
  } catch (const json::exception& e) {
    throw DecodeError(std::string(what) + "." + std::string(key) + ": " + e.what());
  }
}

inline std::string type_tag(const json& j, std::string_view what) {
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string())
    throw DecodeError(std::string(what) + ": missing \"type\" tag");
  return j.at("type").get<std::string>();
}

} // namespace detail

// ---------------------------------------------------------------------------
// Representation specs.

inline json json_of(const RepresentationSpec& spec) {
  if (const auto* bs = std::get_if<BitStringSpec>(&spec))
    return {{"type", "bitstring"}, {"n", bs->n}};
  if (const auto* rv = std::get_if<RealVectorSpec>(&spec)) {
    json bounds = json::array();
    for (const Bounds& b : rv->bounds) bounds.push_back({b.lo, b.hi});
    return {{"type", "real_vector"}, {"d", rv->d}, {"bounds", bounds}};
  }
  const auto& pm = std::get<PermutationSpec>(spec);
  return {{"type", "permutation"}, {"n", pm.n}};
}

inline RepresentationSpec representation_from_json(const json& j) {
  const std::string type = detail::type_tag(j, "representation");
  if (type == "bitstring") {
    detail::require_keys(j, "representation", {"type", "n"});
    return BitStringSpec{detail::get_as<std::uint32_t>(j, "representation", "n")};
  }
  if (type == "real_vector") {
    detail::require_keys(j, "representation", {"type", "d", "bounds"});
    RealVectorSpec rv;
    rv.d = detail::get_as<std::uint32_t>(j, "representation", "d");
    const json& bounds = j.at("bounds");
    if (!bounds.is_array())
      throw DecodeError("representation.bounds: expected an array of [lo, hi] pairs");
    for (const json& b : bounds) {
      if (!b.is_array() || b.size() != 2)
        throw DecodeError("representation.bounds: each entry must be [lo, hi]");
      rv.bounds.push_back(Bounds{b[0].get<double>(), b[1].get<double>()});
    }
    return rv;
  }
  if (type == "permutation") {
    detail::require_keys(j, "representation", {"type", "n"});
    return PermutationSpec{detail::get_as<std::uint32_t>(j, "representation", "n")};
  }
  throw DecodeError("representation: unknown type \"" + type + "\"");
}

// ---------------------------------------------------------------------------
// Genomes: bitstrings as 0/1 strings, real vectors as decimal lists,
// permutations as index lists — used verbatim in reports.

inline json json_of(const Genome& g) {
  if (std::holds_alternative<BitString>(g)) return json(genome_to_string(g));
  if (const auto* r = std::get_if<RealVector>(&g)) return json(r->values);
  const auto& p = std::get<Permutation>(g);
  return json(p.order);
}

inline Genome genome_from_json(const json& j, const RepresentationSpec& repr) {
  Genome g;
  if (std::holds_alternative<BitStringSpec>(repr)) {
    if (!j.is_string()) throw DecodeError("genome: expected a 0/1 string");
    BitString b;
    for (char c : j.get<std::string>()) {
      if (c != '0' && c != '1') throw DecodeError("genome: expected a 0/1 string");
      b.bits.push_back(c == '1' ? 1 : 0);
    }
    g = std::move(b);
  } else if (std::holds_alternative<RealVectorSpec>(repr)) {
    if (!j.is_array()) throw DecodeError("genome: expected a list of reals");
    RealVector r;
    for (const json& v : j) r.values.push_back(v.get<double>());
    g = std::move(r);
  } else {
    if (!j.is_array()) throw DecodeError("genome: expected an index list");
    Permutation p;
    for (const json& v : j) p.order.push_back(v.get<std::uint32_t>());
    g = std::move(p);
  }
  if (!genome_matches(repr, g))
    throw DecodeError("genome does not satisfy the representation invariants");
  return g;
}

// ---------------------------------------------------------------------------
// Objectives.

inline json json_of(const ObjectiveSpec& spec) {
  if (const auto* om = std::get_if<OneMaxMin>(&spec))
    return {{"type", "onemax_min"}, {"n", om->n}};
  if (const auto* sp = std::get_if<Sphere>(&spec)) return {{"type", "sphere"}, {"d", sp->d}};
  if (const auto* tsp = std::get_if<TspTour>(&spec))
    return {{"type", "tsp"}, {"matrix", tsp->matrix}};
  const auto& ks = std::get<KnapsackPenalty>(spec);
  return {{"type", "knapsack"},
          {"weights", ks.weights},
          {"values", ks.values},
          {"capacity", ks.capacity},
          {"penalty", ks.penalty_coefficient}};
}

inline ObjectiveSpec objective_from_json(const json& j) {
  const std::string type = detail::type_tag(j, "objective");
  if (type == "onemax_min") {
    detail::require_keys(j, "objective", {"type", "n"});
    return OneMaxMin{detail::get_as<std::uint32_t>(j, "objective", "n")};
  }
  if (type == "sphere") {
    detail::require_keys(j, "objective", {"type", "d"});
    return Sphere{detail::get_as<std::uint32_t>(j, "objective", "d")};
  }
  if (type == "tsp") {
    detail::require_keys(j, "objective", {"type", "matrix"});
    TspTour tsp;
    tsp.matrix = detail::get_as<std::vector<std::vector<double>>>(j, "objective", "matrix");
    return tsp;
  }
  if (type == "knapsack") {
    detail::require_keys(j, "objective",
                         {"type", "weights", "values", "capacity", "penalty"});
    KnapsackPenalty ks;
    ks.weights = detail::get_as<std::vector<double>>(j, "objective", "weights");
    ks.values = detail::get_as<std::vector<double>>(j, "objective", "values");
    ks.capacity = detail::get_as<double>(j, "objective", "capacity");
    ks.penalty_coefficient = detail::get_as<double>(j, "objective", "penalty");
    return ks;
  }
  throw DecodeError("objective: unknown type \"" + type + "\"");
}

// ---------------------------------------------------------------------------
// Operators.

inline json json_of(const VariationSpec& spec) {
  if (const auto* bf = std::get_if<BitFlip>(&spec))
    return {{"type", "bit_flip"}, {"rate", bf->rate}};
  if (const auto* xo = std::get_if<OnePointCrossover>(&spec))
    return {{"type", "one_point_crossover"}, {"rate", xo->rate}};
  if (const auto* gm = std::get_if<GaussianMutation>(&spec))
    return {{"type", "gaussian_mutation"}, {"sigma", gm->sigma}};
  const auto& sm = std::get<SwapMutation>(spec);
  return {{"type", "swap_mutation"}, {"rate", sm.rate}};
}

inline VariationSpec variation_from_json(const json& j) {
  const std::string type = detail::type_tag(j, "variation");
  if (type == "bit_flip") {
    detail::require_keys(j, "variation", {"type", "rate"});
    return BitFlip{detail::get_as<double>(j, "variation", "rate")};
  }
  if (type == "one_point_crossover") {
    detail::require_keys(j, "variation", {"type", "rate"});
    return OnePointCrossover{detail::get_as<double>(j, "variation", "rate")};
  }
  if (type == "gaussian_mutation") {
    detail::require_keys(j, "variation", {"type", "sigma"});
    return GaussianMutation{detail::get_as<double>(j, "variation", "sigma")};
  }
  if (type == "swap_mutation") {
    detail::require_keys(j, "variation", {"type", "rate"});
    return SwapMutation{detail::get_as<double>(j, "variation", "rate")};
  }
  throw DecodeError("variation: unknown type \"" + type + "\"");
}

inline json json_of(const SelectionSpec& spec) {
  json method;
  if (const auto* tr = std::get_if<Truncation>(&spec.method))
    method = {{"type", "truncation"}, {"keep_fraction", tr->keep_fraction}};
  else if (const auto* to = std::get_if<Tournament>(&spec.method))
    method = {{"type", "tournament"}, {"k", to->k}};
  else
    method = {{"type", "proportional"}};
  return {{"method", method}, {"elitism", spec.elitism}};
}

inline SelectionSpec selection_from_json(const json& j) {
  detail::require_keys(j, "selection", {"method", "elitism"});
  const json& m = j.at("method");
  const std::string type = detail::type_tag(m, "selection.method");
  SelectionSpec spec;
  if (type == "truncation") {
    detail::require_keys(m, "selection.method", {"type", "keep_fraction"});
    spec.method = Truncation{detail::get_as<double>(m, "selection.method", "keep_fraction")};
  } else if (type == "tournament") {
    detail::require_keys(m, "selection.method", {"type", "k"});
    spec.method = Tournament{detail::get_as<std::uint32_t>(m, "selection.method", "k")};
  } else if (type == "proportional") {
    detail::require_keys(m, "selection.method", {"type"});
    spec.method = Proportional{};
  } else {
    throw DecodeError("selection.method: unknown type \"" + type + "\"");
  }
  spec.elitism = detail::get_as<bool>(j, "selection", "elitism");
  return spec;
}

inline json json_of(const SelfAdaptiveExtension& ext) {
  if (!ext.enabled) return {{"enabled", false}};
  return {{"enabled", true},
          {"param_min", ext.param_min},
          {"param_max", ext.param_max},
          {"meta_sigma", ext.meta_sigma},
          {"init_param", ext.init_param}};
}

inline SelfAdaptiveExtension self_adaptive_from_json(const json& j) {
  SelfAdaptiveExtension ext;
  if (!j.is_object() || !j.contains("enabled"))
    throw DecodeError("self_adaptive: missing \"enabled\"");
  ext.enabled = detail::get_as<bool>(j, "self_adaptive", "enabled");
  if (!ext.enabled) {
    detail::require_keys(j, "self_adaptive", {"enabled"});
    return ext;
  }
  detail::require_keys(j, "self_adaptive",
                       {"enabled", "param_min", "param_max", "meta_sigma", "init_param"});
  ext.param_min = detail::get_as<double>(j, "self_adaptive", "param_min");
  ext.param_max = detail::get_as<double>(j, "self_adaptive", "param_max");
  ext.meta_sigma = detail::get_as<double>(j, "self_adaptive", "meta_sigma");
  ext.init_param = detail::get_as<double>(j, "self_adaptive", "init_param");
  return ext;
}

inline json json_of(const AggregatorSpec& agg) {
  if (const auto* ws = std::get_if<WeightedSum>(&agg))
    return {{"type", "weighted_sum"}, {"w2", ws->w2}, {"w3", ws->w3}};
  if (std::holds_alternative<ProductAggregator>(agg)) return {{"type", "product"}};
  return {{"type", "pareto"}};
}

inline AggregatorSpec aggregator_from_json(const json& j) {
  const std::string type = detail::type_tag(j, "aggregator");
  if (type == "weighted_sum") {
    detail::require_keys(j, "aggregator", {"type", "w2", "w3"});
    return WeightedSum{detail::get_as<double>(j, "aggregator", "w2"),
                       detail::get_as<double>(j, "aggregator", "w3")};
  }
  if (type == "product") {
    detail::require_keys(j, "aggregator", {"type"});
    return ProductAggregator{};
  }
  if (type == "pareto") {
    detail::require_keys(j, "aggregator", {"type"});
    return ParetoAggregator{};
  }
  throw DecodeError("aggregator: unknown type \"" + type + "\"");
}

// ---------------------------------------------------------------------------
// Algorithm spec c(E).

inline json json_of(const AlgorithmSpec& spec) {
  return {{"representation", json_of(spec.representation)},
          {"population_size", spec.population_size},
          {"variation", json_of(spec.variation)},
          {"selection", json_of(spec.selection)},
          {"self_adaptive", json_of(spec.self_adaptive)},
          {"objective", json_of(spec.objective)},
          {"aggregator", json_of(spec.aggregator)},
          {"master_seed", spec.master_seed}};
}

inline AlgorithmSpec algorithm_from_json(const json& j) {
  detail::require_keys(j, "algorithm",
                       {"representation", "population_size", "variation", "selection",
                        "self_adaptive", "objective", "aggregator", "master_seed"});
  AlgorithmSpec spec;
  spec.representation = representation_from_json(j.at("representation"));
  spec.population_size = detail::get_as<std::uint32_t>(j, "algorithm", "population_size");
  spec.variation = variation_from_json(j.at("variation"));
  spec.selection = selection_from_json(j.at("selection"));
  spec.self_adaptive = self_adaptive_from_json(j.at("self_adaptive"));
  spec.objective = objective_from_json(j.at("objective"));
  spec.aggregator = aggregator_from_json(j.at("aggregator"));
  spec.master_seed = detail::get_as<std::uint64_t>(j, "algorithm", "master_seed");
  return spec;
}

// The canonical encoding: compact dump with sorted keys.
inline std::string serialize_algorithm(const AlgorithmSpec& spec) {
  return json_of(spec).dump();
}

inline AlgorithmSpec decode_algorithm(const std::string& encoded) {
  json j;
  try {
    j = json::parse(encoded);
  } catch (const json::exception& e) {
    throw DecodeError(std::string("algorithm encoding: ") + e.what());
  }
  AlgorithmSpec spec = algorithm_from_json(j);
  try {
    validate_algorithm(spec);
  } catch (const ConfigError& e) {
    throw DecodeError(std::string("algorithm encoding invalid: ") + e.what());
  }
  return spec;
}

// ---------------------------------------------------------------------------
// Termination and run options.

inline json json_of(const TerminationCondition& cond) {
  if (const auto* mg = std::get_if<MaxGenerations>(&cond))
    return {{"type", "max_generations"}, {"limit", mg->limit}};
  if (const auto* opt = std::get_if<OptimumReached>(&cond))
    return {{"type", "optimum_reached"}, {"target", opt->target}, {"tolerance", opt->tolerance}};
  if (const auto* st = std::get_if<Stagnation>(&cond))
    return {{"type", "stagnation"},
            {"window", st->window},
            {"min_improvement", st->min_improvement}};
  const auto& hz = std::get<Horizon>(cond);
  return {{"type", "horizon"}, {"budget", hz.budget}, {"open", hz.open}};
}

inline TerminationCondition termination_from_json(const json& j) {
  const std::string type = detail::type_tag(j, "termination");
  if (type == "max_generations") {
    detail::require_keys(j, "termination", {"type", "limit"});
    return MaxGenerations{detail::get_as<std::uint64_t>(j, "termination", "limit")};
  }
  if (type == "optimum_reached") {
    detail::require_keys(j, "termination", {"type", "target", "tolerance"});
    return OptimumReached{detail::get_as<double>(j, "termination", "target"),
                          detail::get_as<double>(j, "termination", "tolerance")};
  }
  if (type == "stagnation") {
    detail::require_keys(j, "termination", {"type", "window", "min_improvement"});
    return Stagnation{detail::get_as<std::uint64_t>(j, "termination", "window"),
                      detail::get_as<double>(j, "termination", "min_improvement")};
  }
  if (type == "horizon") {
    detail::require_keys(j, "termination", {"type", "budget", "open"});
    return Horizon{detail::get_as<std::uint64_t>(j, "termination", "budget"),
                   detail::get_as<bool>(j, "termination", "open")};
  }
  throw DecodeError("termination: unknown type \"" + type + "\"");
}

inline json json_of(const RunOptions& opts) {
  json terms = json::array();
  for (const auto& c : opts.terminations) terms.push_back(json_of(c));
  json j = {{"termination", terms}};
  j["inductive_window"] = opts.inductive_window ? json(*opts.inductive_window) : json(nullptr);
  return j;
}

inline RunOptions run_options_from_json(const json& terminations, const json& window) {
  RunOptions opts;
  if (!terminations.is_array())
    throw DecodeError("termination: expected an array of conditions");
  for (const json& c : terminations) opts.terminations.push_back(termination_from_json(c));
  if (window.is_null())
    opts.inductive_window.reset();
  else
    opts.inductive_window = window.get<std::uint64_t>();
  return opts;
}

// ---------------------------------------------------------------------------
// Parallel spec.

inline json json_of(const ParallelSpec& spec) {
  json subs = json::array();
  for (const auto& sub : spec.submachines)
    subs.push_back({{"algorithm", json_of(sub.algorithm)}, {"size", sub.size}});
  json combiner = {{"type", std::string(combiner_kind_name(spec.combiner.kind))}};
  if (spec.combiner.kind == CombinerSpec::Kind::weighted_sum)
    combiner["weights"] = spec.combiner.weights;
  return {{"submachines", subs},
          {"combiner", combiner},
          {"policy", std::string(acceptance_policy_name(spec.policy))}};
}

inline ParallelSpec parallel_from_json(const json& j) {
  detail::require_keys(j, "parallel", {"submachines", "combiner", "policy"});
  ParallelSpec spec;
  const json& subs = j.at("submachines");
  if (!subs.is_array()) throw DecodeError("parallel.submachines: expected an array");
  for (const json& s : subs) {
    detail::require_keys(s, "submachine", {"algorithm", "size"});
    SubmachineSpec sub;
    sub.algorithm = algorithm_from_json(s.at("algorithm"));
    sub.size = detail::get_as<std::uint32_t>(s, "submachine", "size");
    spec.submachines.push_back(std::move(sub));
  }
  const json& c = j.at("combiner");
  const std::string kind = detail::type_tag(c, "parallel.combiner");
  if (kind == "sum") {
    detail::require_keys(c, "parallel.combiner", {"type"});
    spec.combiner.kind = CombinerSpec::Kind::sum;
  } else if (kind == "min") {
    detail::require_keys(c, "parallel.combiner", {"type"});
    spec.combiner.kind = CombinerSpec::Kind::min;
  } else if (kind == "weighted_sum") {
    detail::require_keys(c, "parallel.combiner", {"type", "weights"});
    spec.combiner.kind = CombinerSpec::Kind::weighted_sum;
    spec.combiner.weights = detail::get_as<std::vector<double>>(c, "parallel.combiner", "weights");
  } else {
    throw DecodeError("parallel.combiner: unknown type \"" + kind + "\"");
  }
  const std::string policy = detail::get_as<std::string>(j, "parallel", "policy");
  if (policy == "free")
    spec.policy = AcceptancePolicy::free;
  else if (policy == "cooperative-only")
    spec.policy = AcceptancePolicy::cooperative_only;
  else if (policy == "competitive-only")
    spec.policy = AcceptancePolicy::competitive_only;
  else
    throw DecodeError("parallel.policy: unknown policy \"" + policy + "\"");
  return spec;
}

// ---------------------------------------------------------------------------
// Optimal sets.

inline json json_of(const OptimalSet& set) {
  json j;
  j["optimum_value"] = set.optimum_value ? json(*set.optimum_value) : json(nullptr);
  json optima = json::array();
  for (const Genome& g : set.optima) optima.push_back(json_of(g));
  j["optima"] = optima;
  j["provenance"] = set.provenance == Provenance::brute_force ? "brute-force" : "declared";
  j["space_size"] = set.space_size;
  return j;
}

inline OptimalSet optimal_set_from_json(const json& j, const RepresentationSpec& repr) {
  detail::require_keys(j, "optimal_set",
                       {"optimum_value", "optima", "provenance", "space_size"});
  OptimalSet set;
  if (!j.at("optimum_value").is_null())
    set.optimum_value = j.at("optimum_value").get<double>();
  for (const json& g : j.at("optima")) set.optima.push_back(genome_from_json(g, repr));
  const std::string prov = detail::get_as<std::string>(j, "optimal_set", "provenance");
  if (prov == "brute-force")
    set.provenance = Provenance::brute_force;
  else if (prov == "declared")
    set.provenance = Provenance::declared;
  else
    throw DecodeError("optimal_set.provenance: unknown value \"" + prov + "\"");
  set.space_size = detail::get_as<std::uint64_t>(j, "optimal_set", "space_size");
  return set;
}

// ---------------------------------------------------------------------------
// The universal runner: interprets an encoding c(E) and reproduces the
// encoded machine's behavior generation by generation.

inline RunTrace run_universal(const std::string& encoded, const Population& x0,
                              const RunOptions& opts) {
  const AlgorithmSpec spec = decode_algorithm(encoded);
  return run(spec, x0, opts);
}

} // namespace etm

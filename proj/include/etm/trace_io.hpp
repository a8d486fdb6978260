#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "etm/analysis.hpp"
#include "etm/serialize.hpp"

namespace etm {

// ---------------------------------------------------------------------------
// Trace CSV: '.' decimal point, no thousands separators, LF line endings —
// artifacts must compare byte-for-byte across platforms.

namespace detail {

inline void csv_common_row(std::string& out, const GenerationRecord& rec) {
  out += std::to_string(rec.t);
  out += ',';
  out += format_double(rec.best_f3);
  out += ',';
  out += format_double(rec.mean_f3);
  out += ',';
  out += std::to_string(rec.cost.evaluations);
  out += ',';
  out += rec.inductive_emitted ? '1' : '0';
}

} // namespace detail

inline constexpr std::string_view kTraceCsvHeader = "t,best_f3,mean_f3,evaluations,inductive_flag";

inline std::string trace_csv(const RunTrace& trace) {
  std::string out{kTraceCsvHeader};
  out += '\n';
  for (const GenerationRecord& rec : trace.records) {
    detail::csv_common_row(out, rec);
    out += '\n';
  }
  return out;
}

// Parallel traces add the joint fitness, the per-component values, the
// interaction labels of the realized transition and the acceptance flag.
inline std::string trace_csv(const ParallelRunTrace& trace) {
  const std::size_t p = trace.spec.submachines.size();
  std::string out{kTraceCsvHeader};
  out += ",f3_whole";
  for (std::size_t j = 1; j <= p; ++j) out += ",f3_comp_" + std::to_string(j);
  out += ",population_label,individual_labels,accepted\n";
  for (const GenerationRecord& rec : trace.records) {
    detail::csv_common_row(out, rec);
    const ParallelGenData& data = *rec.parallel;
    out += ',';
    out += format_double(data.joint.whole);
    for (double c : data.joint.components) {
      out += ',';
      out += format_double(c);
    }
    out += ',';
    if (data.label) {
      out += interaction_name(data.label->population);
      out += ',';
      std::string labels;
      for (const IndividualInteraction& ind : data.label->individuals) {
        if (!labels.empty()) labels += ';';
        labels += std::to_string(ind.index);
        labels += ':';
        labels += ind.cooperates ? "cooperates" : "competes";
      }
      out += labels;
    } else {
      out += "none,";
    }
    out += ',';
    out += data.accepted ? '1' : '0';
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Strict CSV reading; re-analysis only needs the generation and best_f3
// columns, which plain and parallel traces share.

struct TraceSeries {
  std::vector<std::uint64_t> t;
  std::vector<double> best_f3;
};

inline TraceSeries read_trace_csv(const std::string& text) {
  TraceSeries series;
  std::size_t pos = 0;
  const auto next_line = [&]() -> std::string {
    if (pos >= text.size()) return {};
    const std::size_t end = text.find('\n', pos);
    std::string line = text.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
    pos = end == std::string::npos ? text.size() : end + 1;
    return line;
  };

  const std::string header = next_line();
  if (header.rfind(std::string(kTraceCsvHeader), 0) != 0)
    throw DecodeError("trace csv: unexpected header \"" + header + "\"");

  while (pos < text.size()) {
    const std::string line = next_line();
    if (line.empty()) continue;
    const std::size_t c1 = line.find(',');
    const std::size_t c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      throw DecodeError("trace csv: malformed row \"" + line + "\"");
    try {
      series.t.push_back(std::stoull(line.substr(0, c1)));
      series.best_f3.push_back(std::stod(line.substr(c1 + 1, c2 - c1 - 1)));
    } catch (const std::exception&) {
      throw DecodeError("trace csv: malformed row \"" + line + "\"");
    }
  }
  if (series.t.empty()) throw DecodeError("trace csv: no data rows");
  for (std::size_t i = 0; i < series.t.size(); ++i)
    if (series.t[i] != i) throw DecodeError("trace csv: generations are not contiguous");
  return series;
}

// ---------------------------------------------------------------------------
// Verdict and theorem-report JSON.

inline json json_of(const ConvergenceVerdict& v) {
  json j;
  j["kind"] = std::string(verdict_kind_name(v.kind));
  j["horizon"] = v.horizon;
  j["scope"] = std::string(kVerdictScope);
  switch (v.kind) {
    case VerdictKind::convergent:
      j["tau"] = v.tau;
      break;
    case VerdictKind::convergent_with_error:
      j["tau"] = v.tau;
      j["error_bound"] = v.error_bound;
      break;
    case VerdictKind::asymptotic_evidence: {
      json taus = json::array();
      for (const EpsilonTau& et : v.epsilon_taus)
        taus.push_back({{"epsilon", et.epsilon}, {"tau", et.tau}});
      j["epsilon_taus"] = taus;
      break;
    }
    case VerdictKind::divergent:
      break;
  }
  return j;
}

inline json json_of(const TheoremReport& report) {
  json j;
  j["theorem"] = report.theorem_id;
  j["configuration"] = json::parse(report.configuration);
  j["seeds"] = report.seeds;
  j["success_count"] = report.success_count;
  j["hit_rate"] = report.hit_rate;
  j["maintained_count"] = report.maintained_count;
  j["maintenance_rate"] = report.maintenance_rate;
  json metrics = json::object();
  for (const auto& [k, v] : report.metrics) metrics[k] = v;
  j["metrics"] = metrics;
  json outcomes = json::array();
  for (const SeedOutcome& o : report.outcomes)
    outcomes.push_back({{"seed", o.seed},
                        {"hit", o.hit},
                        {"first_hit", o.first_hit},
                        {"maintained", o.maintained},
                        {"found_then_lost", o.found_then_lost},
                        {"final_best", o.final_best},
                        {"evaluations_at_first_hit", o.evaluations_at_first_hit}});
  j["outcomes"] = outcomes;
  j["passed"] = report.passed;
  j["verdict"] = report.verdict;
  return j;
}

} // namespace etm

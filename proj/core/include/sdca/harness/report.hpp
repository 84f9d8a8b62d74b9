#pragma once

#include <string>
#include <vector>

#include "sdca/dc/solver.hpp"
#include "sdca/harness/experiment.hpp"

namespace sdca::harness {

/// Deterministic part of the report: one record per run (repetition, alpha,
/// lambda) plus mean/std per (alpha, lambda) and for the best-validation
/// runs. Wall-clock fields are left out so that a replay matches bitwise.
std::string summary_json(const RunReport& report);

/// Wall seconds per run and their mean/std per (alpha, lambda).
std::string timing_json(const RunReport& report);

/// Spec, derived seeds and data shape; ExperimentSpec::from_json accepts
/// the "spec" member for replay.
std::string manifest_json(const RunReport& report);

/// iteration,epoch,objective,surrogate_gap,seconds with 17 significant
/// digits; objective and gap are "nan" where not evaluated.
std::string trace_csv(const dc::ConvergenceTrace& trace);

struct TraceRow {
  std::size_t iteration = 0;
  std::size_t epoch = 0;
  double objective = 0.0;
  double surrogate_gap = 0.0;
  double seconds = 0.0;
};

std::vector<TraceRow> parse_trace_csv(const std::string& text);

/// Relative path of a run's trace inside the report directory.
std::string trace_path(const RunRecord& run);

/// Writes summary.json, timing.json, manifest.json and traces/*.csv into
/// `directory` (created if missing). Every file is written to a temporary
/// name first; summary.json is renamed into place last, so a failure never
/// leaves a summary behind.
void emit_report(const RunReport& report, const std::string& directory);

/// Reads the spec out of a manifest file.
ExperimentSpec read_manifest(const std::string& path);

/// Plain-text table of a summary.json document.
std::string render_summary(const std::string& summary_json_text);

}  // namespace sdca::harness

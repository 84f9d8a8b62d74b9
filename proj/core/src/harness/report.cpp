#include "sdca/harness/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace sdca::harness {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json mean_std_json(const MeanStd& m) { return {{"mean", m.mean}, {"std", m.std}}; }

json head_json(const ExperimentSpec& spec) {
  return {{"algorithm", to_string(spec.method)},
          {"q", mlr::to_string(spec.q)},
          {"penalty", spec.method == Method::kSpgd ? std::string("l21") : mlr::to_string(spec.penalty)}};
}

// JSON has no NaN; unevaluated objectives become null.
json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  out.close();
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace

std::string summary_json(const RunReport& report) {
  const json head = head_json(report.spec);
  json runs = json::array();
  for (const RunRecord& r : report.runs) {
    json row = head;
    row["repetition"] = r.repetition;
    row["alpha"] = r.alpha;
    row["lambda"] = r.lambda;
    row["test_accuracy"] = r.test_accuracy;
    row["validation_accuracy"] = r.validation_accuracy;
    row["sparsity"] = r.sparsity;
    row["objective"] = number_or_null(r.objective);
    row["epochs"] = r.epochs;
    row["iterations"] = r.iterations;
    row["stop_reason"] = dc::to_string(r.stop_reason);
    if (!r.error.empty()) row["error"] = r.error;
    row["selected"] = r.selected;
    row["trace"] = trace_path(r);
    runs.push_back(std::move(row));
  }
  json aggregates = json::array();
  for (const Aggregate& a : aggregate(report)) {
    json row = head;
    row["alpha"] = a.alpha;
    row["lambda"] = a.lambda;
    row["test_accuracy"] = mean_std_json(a.test_accuracy);
    row["validation_accuracy"] = mean_std_json(a.validation_accuracy);
    row["sparsity"] = mean_std_json(a.sparsity);
    row["epochs"] = mean_std_json(a.epochs);
    aggregates.push_back(std::move(row));
  }
  json best = head;
  json picks = json::array();
  for (std::size_t idx : report.best_runs()) {
    const RunRecord& r = report.runs[idx];
    picks.push_back({{"repetition", r.repetition}, {"alpha", r.alpha}, {"lambda", r.lambda}});
  }
  const Aggregate b = aggregate_best(report);
  best["selection"] = "max validation accuracy, ties to larger lambda then earlier alpha";
  best["picks"] = picks;
  best["test_accuracy"] = mean_std_json(b.test_accuracy);
  best["sparsity"] = mean_std_json(b.sparsity);
  best["epochs"] = mean_std_json(b.epochs);

  json doc;
  doc["dimension"] = report.dimension;
  doc["num_classes"] = report.num_classes;
  doc["runs"] = std::move(runs);
  doc["aggregates"] = std::move(aggregates);
  doc["best"] = std::move(best);
  return doc.dump(2) + "\n";
}

std::string timing_json(const RunReport& report) {
  json runs = json::array();
  for (const RunRecord& r : report.runs) {
    runs.push_back({{"repetition", r.repetition}, {"alpha", r.alpha}, {"lambda", r.lambda}, {"seconds", r.seconds}});
  }
  json aggregates = json::array();
  for (const Aggregate& a : aggregate(report)) {
    aggregates.push_back({{"alpha", a.alpha}, {"lambda", a.lambda}, {"seconds", mean_std_json(a.seconds)}});
  }
  json doc;
  doc["runs"] = std::move(runs);
  doc["aggregates"] = std::move(aggregates);
  doc["best"] = {{"seconds", mean_std_json(aggregate_best(report).seconds)}};
  return doc.dump(2) + "\n";
}

std::string manifest_json(const RunReport& report) {
  json doc;
  doc["format"] = "sdca-manifest 1";
  doc["spec"] = json::parse(report.spec.to_json());
  json seeds = json::array();
  for (const RunRecord& r : report.runs) {
    seeds.push_back({{"repetition", r.repetition},
                     {"alpha_index", r.alpha_index},
                     {"lambda_index", r.lambda_index},
                     {"split_seed", split_seed(report.spec, r.repetition)},
                     {"solver_seed", r.seed}});
  }
  doc["seeds"] = std::move(seeds);
  doc["dimension"] = report.dimension;
  doc["num_classes"] = report.num_classes;
  return doc.dump(2) + "\n";
}

std::string trace_csv(const dc::ConvergenceTrace& trace) {
  std::ostringstream out;
  out << "iteration,epoch,objective,surrogate_gap,seconds\n";
  for (const dc::TraceRecord& r : trace.records) {
    out << r.iteration << ',' << r.epoch << ',' << format_double(r.objective) << ','
        << format_double(r.surrogate_gap()) << ',' << format_double(r.seconds) << '\n';
  }
  return out.str();
}

std::vector<TraceRow> parse_trace_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "iteration,epoch,objective,surrogate_gap,seconds") {
    throw std::runtime_error("trace: unexpected header");
  }
  std::vector<TraceRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string cell[5];
    for (auto& c : cell) {
      if (!std::getline(fields, c, ',')) {
        throw std::runtime_error("trace line " + std::to_string(lineno) + ": expected 5 fields");
      }
    }
    TraceRow row;
    try {
      row.iteration = std::stoull(cell[0]);
      row.epoch = std::stoull(cell[1]);
      // strtod reads "nan"; std::stod would too but throws on overflow
      row.objective = std::strtod(cell[2].c_str(), nullptr);
      row.surrogate_gap = std::strtod(cell[3].c_str(), nullptr);
      row.seconds = std::strtod(cell[4].c_str(), nullptr);
    } catch (const std::exception&) {
      throw std::runtime_error("trace line " + std::to_string(lineno) + ": bad number");
    }
    rows.push_back(row);
  }
  return rows;
}

std::string trace_path(const RunRecord& run) {
  return "traces/r" + std::to_string(run.repetition) + "_a" + std::to_string(run.alpha_index) + "_l" +
         std::to_string(run.lambda_index) + ".csv";
}

void emit_report(const RunReport& report, const std::string& directory) {
  const fs::path root(directory);
  std::error_code ec;
  fs::create_directories(root / "traces", ec);
  if (ec) throw std::runtime_error("cannot create report directory " + directory + ": " + ec.message());

  // render everything before touching the sink
  const std::string summary = summary_json(report);
  const std::string timing = timing_json(report);
  const std::string manifest = manifest_json(report);

  const fs::path summary_path = root / "summary.json";
  fs::remove(summary_path, ec);
  for (const RunRecord& r : report.runs) write_file(root / trace_path(r), trace_csv(r.trace));
  write_file(root / "timing.json", timing);
  write_file(root / "manifest.json", manifest);
  const fs::path tmp = root / "summary.json.tmp";
  write_file(tmp, summary);
  fs::rename(tmp, summary_path, ec);
  if (ec) throw std::runtime_error("cannot move summary into place: " + ec.message());
}

ExperimentSpec read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw dc::ConfigError("cannot open manifest " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw dc::ConfigError("manifest " + path + " is not valid JSON: " + e.what());
  }
  if (!doc.contains("spec")) throw dc::ConfigError("manifest " + path + " has no spec");
  return ExperimentSpec::from_json(doc.at("spec").dump());
}

std::string render_summary(const std::string& summary_json_text) {
  const json doc = json::parse(summary_json_text);
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-8s %-4s %-6s %8s %10s %18s %18s %12s\n", "algo", "q", "pen",
                "alpha", "lambda", "test acc %", "sparsity %", "epochs");
  out << line;
  for (const json& row : doc.at("aggregates")) {
    std::snprintf(line, sizeof line, "%-8s %-4s %-6s %8.3g %10.3g %9.2f +- %5.2f %9.2f +- %5.2f %12.1f\n",
                  row.at("algorithm").get<std::string>().c_str(), row.at("q").get<std::string>().c_str(),
                  row.at("penalty").get<std::string>().c_str(), row.at("alpha").get<double>(),
                  row.at("lambda").get<double>(), row.at("test_accuracy").at("mean").get<double>(),
                  row.at("test_accuracy").at("std").get<double>(), row.at("sparsity").at("mean").get<double>(),
                  row.at("sparsity").at("std").get<double>(), row.at("epochs").at("mean").get<double>());
    out << line;
  }
  const json& best = doc.at("best");
  std::snprintf(line, sizeof line, "best-validation: test acc %.2f +- %.2f %%, sparsity %.2f +- %.2f %%\n",
                best.at("test_accuracy").at("mean").get<double>(), best.at("test_accuracy").at("std").get<double>(),
                best.at("sparsity").at("mean").get<double>(), best.at("sparsity").at("std").get<double>());
  out << line;
  return out.str();
}

}  // namespace sdca::harness

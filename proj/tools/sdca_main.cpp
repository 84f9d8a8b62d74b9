// sdca: generate data, train one model, run a solution path, render reports.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "sdca/data/io.hpp"
#include "sdca/data/synthetic.hpp"
#include "sdca/harness/experiment.hpp"
#include "sdca/harness/report.hpp"
#include "sdca/mlr/model.hpp"
#include "sdca/mlr/problem.hpp"
#include "sdca/mlr/serialize.hpp"

namespace {

using nlohmann::json;
using namespace sdca;

// exit codes
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitSolver = 4;
constexpr int kExitOther = 1;

int fail(int code, const std::string& type, const std::string& message, json extra = json::object()) {
  json err = {{"error", type}, {"message", message}};
  err.update(extra);
  std::cerr << err.dump() << std::endl;
  return code;
}

struct GenArgs {
  std::string kind = "sim1";
  std::size_t n = 1000;
  std::size_t d = 0;
  std::uint64_t seed = 0;
  std::string spec_file;
  std::string out;
  std::string format = "libsvm";
};

struct TrainArgs {
  std::string data;
  std::string format = "libsvm";
  std::string label_column = "label";
  std::string algo = "sdca";
  std::string q = "2";
  std::string penalty = "exp";
  double alpha = 1.0;
  double lambda = 1e-2;
  double batch_frac = 0.1;
  std::size_t patience = 5;
  double eps_stop = 1e-6;
  std::uint64_t seed = 0;
  std::size_t max_epochs = 1000;
  double time_limit = 7200.0;
  bool no_standardize = false;
  std::string out;
  std::string trace;
};

struct PathArgs {
  std::string spec;
  std::string out;
  std::size_t workers = 0;
};

struct ReportArgs {
  std::string manifest;
  bool replay = false;
  std::string out;
};

void run_gen(const GenArgs& a) {
  data::GeneratorSpec spec;
  if (!a.spec_file.empty()) {
    spec = data::GeneratorSpec::load(a.spec_file);
  } else {
    spec.kind = a.kind;
    spec.n = a.n;
    spec.d = a.d;
    spec.seed = a.seed;
  }
  const data::Dataset ds = data::generate(spec);
  data::write_sparse_text(ds, a.out, data::parse_format(a.format));
  json out = {{"output", a.out}, {"rows", ds.size()}, {"dimension", ds.dimension()},
              {"classes", ds.num_classes()}, {"provenance", ds.provenance}};
  std::cout << out.dump() << std::endl;
}

void run_train(const TrainArgs& a) {
  harness::ExperimentSpec spec;
  spec.data.path = a.data;
  spec.data.load.format = data::parse_format(a.format);
  spec.data.load.label_column = a.label_column;
  spec.method = harness::method_from_string(a.algo);
  spec.q = mlr::norm_from_string(a.q);
  spec.penalty = mlr::penalty_kind_from_string(a.penalty);
  spec.alphas = {a.alpha};
  spec.lambdas = {a.lambda};
  spec.batch_fraction = a.batch_frac;
  spec.patience = a.patience;
  spec.eps_stop = a.eps_stop;
  spec.seed = a.seed;
  spec.max_epochs = a.max_epochs;
  spec.time_limit_seconds = a.time_limit;
  spec.repetitions = 1;
  spec.standardize = !a.no_standardize;
  spec.validate();

  data::Scaler scaler;
  const data::DataSplit split = harness::prepare_data(spec, 0, &scaler);
  const auto init = mlr::ModelState::zeros(split.train.dimension(), split.train.num_classes());
  const harness::SolveOutcome o = harness::solve_one(spec, split, a.alpha, a.lambda, init,
                                                     harness::solver_seed(spec, 0, 0, 0), a.time_limit);
  const harness::RunRecord& r = o.record;

  if (!a.out.empty()) {
    mlr::ModelFile file;
    file.model = o.model;
    file.penalty.kind = spec.penalty;
    file.penalty.alpha = a.alpha;
    file.penalty.lambda = a.lambda;
    file.penalty.q = spec.q;
    file.rho = (1.0 + mlr::kRhoMargin) * mlr::estimate_lipschitz(split.train);
    file.metadata["algorithm"] = a.algo;
    file.metadata["seed"] = std::to_string(a.seed);
    file.metadata["data"] = a.data;
    if (spec.standardize) {
      const std::string scaler_path = a.out + ".scaler";
      std::ofstream s(scaler_path);
      if (!s) throw std::runtime_error("cannot write " + scaler_path);
      scaler.write(s);
      file.metadata["scaler"] = std::filesystem::path(scaler_path).filename().string();
    }
    mlr::write_model(a.out, file);
  }
  if (!a.trace.empty()) {
    std::ofstream t(a.trace);
    if (!t) throw std::runtime_error("cannot write " + a.trace);
    t << harness::trace_csv(r.trace);
  }

  json out = {{"algorithm", a.algo},
              {"test_accuracy", r.test_accuracy},
              {"validation_accuracy", r.validation_accuracy},
              {"sparsity", r.sparsity},
              {"objective", std::isfinite(r.objective) ? json(r.objective) : json(nullptr)},
              {"epochs", r.epochs},
              {"iterations", r.iterations},
              {"seconds", r.seconds},
              {"stop_reason", dc::to_string(r.stop_reason)}};
  if (!r.error.empty()) out["error"] = r.error;
  std::cout << out.dump(2) << std::endl;
}

void run_path_cmd(const PathArgs& a) {
  harness::ExperimentSpec spec = harness::ExperimentSpec::load(a.spec);
  if (a.workers > 0) spec.workers = a.workers;
  const harness::RunReport report = harness::run_path(spec);
  harness::emit_report(report, a.out);
  std::cout << harness::render_summary(harness::summary_json(report));
}

void run_report(const ReportArgs& a) {
  if (a.replay) {
    if (a.out.empty()) throw dc::ConfigError("--replay needs --out");
    const harness::RunReport report = harness::run_path(harness::read_manifest(a.manifest));
    harness::emit_report(report, a.out);
    std::cout << harness::render_summary(harness::summary_json(report));
    return;
  }
  const auto summary = std::filesystem::path(a.manifest).parent_path() / "summary.json";
  std::ifstream in(summary);
  if (!in) throw dc::ConfigError("no summary.json next to " + a.manifest);
  std::ostringstream text;
  text << in.rdbuf();
  harness::read_manifest(a.manifest);  // validates the manifest
  std::cout << harness::render_summary(text.str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic DCA for group-sparse multinomial logistic regression"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "generate a synthetic dataset");
  g->add_option("--kind", gen.kind, "sim1, sim2 or sim3")->check(CLI::IsMember({"sim1", "sim2", "sim3"}));
  g->add_option("--n", gen.n, "number of rows (total)");
  g->add_option("--d", gen.d, "dimension (sim3 only, default 500)");
  g->add_option("--seed", gen.seed, "random seed");
  g->add_option("--spec", gen.spec_file, "generator spec file (overrides kind/n/d/seed)");
  g->add_option("--format", gen.format, "libsvm or csv")->check(CLI::IsMember({"libsvm", "csv"}));
  g->add_option("--out", gen.out, "output path")->required();

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "train one model at a fixed (alpha, lambda)");
  t->add_option("--data", tr.data, "dataset path")->required();
  t->add_option("--format", tr.format, "libsvm or csv")->check(CLI::IsMember({"libsvm", "csv"}));
  t->add_option("--label-column", tr.label_column, "CSV label column");
  t->add_option("--algo", tr.algo)->check(CLI::IsMember({"dca", "sdca", "isdca", "spgd"}));
  t->add_option("--q", tr.q)->check(CLI::IsMember({"1", "2", "inf"}));
  t->add_option("--penalty", tr.penalty)->check(CLI::IsMember({"exp", "capl1"}));
  t->add_option("--alpha", tr.alpha);
  t->add_option("--lambda", tr.lambda);
  t->add_option("--batch-frac", tr.batch_frac);
  t->add_option("--patience", tr.patience);
  t->add_option("--eps-stop", tr.eps_stop);
  t->add_option("--seed", tr.seed);
  t->add_option("--max-epochs", tr.max_epochs);
  t->add_option("--time-limit", tr.time_limit, "seconds");
  t->add_flag("--no-standardize", tr.no_standardize);
  t->add_option("--out", tr.out, "model output path");
  t->add_option("--trace", tr.trace, "objective trace CSV path");

  PathArgs pa;
  auto* p = app.add_subcommand("path", "run the full solution-path protocol");
  p->add_option("--spec", pa.spec, "experiment spec (JSON)")->required();
  p->add_option("--out", pa.out, "report directory")->required();
  p->add_option("--workers", pa.workers, "parallel (repetition, alpha) cells");

  ReportArgs re;
  auto* r = app.add_subcommand("report", "render or replay a report from its manifest");
  r->add_option("--manifest", re.manifest)->required();
  r->add_flag("--replay", re.replay, "rerun the experiment");
  r->add_option("--out", re.out, "report directory for --replay");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(kExitConfig, "usage", e.what());
  }

  try {
    if (*g) run_gen(gen);
    if (*t) run_train(tr);
    if (*p) run_path_cmd(pa);
    if (*r) run_report(re);
  } catch (const dc::ConfigError& e) {
    return fail(kExitConfig, "config", e.what());
  } catch (const std::invalid_argument& e) {
    return fail(kExitConfig, "config", e.what());
  } catch (const data::DataError& e) {
    return fail(kExitData, "data", e.what());
  } catch (const dc::SolverError& e) {
    return fail(kExitSolver, "solver", e.what(), {{"iteration", e.iteration()}});
  } catch (const mlr::NumericError& e) {
    return fail(kExitSolver, "numeric", e.what(), {{"class", e.class_index()}});
  } catch (const std::exception& e) {
    return fail(kExitOther, "error", e.what());
  }
  return 0;
}

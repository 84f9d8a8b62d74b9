#include "sdca/harness/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "sdca/baselines/spgd.hpp"
#include "sdca/mlr/problem.hpp"
#include "sdca/random.hpp"

namespace sdca::harness {

using nlohmann::json;

std::string to_string(Method method) {
  switch (method) {
    case Method::kDca: return "dca";
    case Method::kSdca: return "sdca";
    case Method::kIsdca: return "isdca";
    case Method::kSpgd: return "spgd";
  }
  return "?";
}

Method method_from_string(const std::string& name) {
  if (name == "dca") return Method::kDca;
  if (name == "sdca") return Method::kSdca;
  if (name == "isdca") return Method::kIsdca;
  if (name == "spgd") return Method::kSpgd;
  throw dc::ConfigError("unknown algorithm '" + name + "' (expected dca, sdca, isdca or spgd)");
}

void ExperimentSpec::validate() const {
  if (data.generator.has_value() == !data.path.empty()) {
    throw dc::ConfigError("data source needs exactly one of a generator or a path");
  }
  if (alphas.empty()) throw dc::ConfigError("alpha grid is empty");
  for (double a : alphas) {
    if (!(a > 0.0 && std::isfinite(a))) throw dc::ConfigError("alpha values must be positive");
  }
  if (lambdas.empty()) throw dc::ConfigError("lambda path is empty");
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] >= 0.0 && std::isfinite(lambdas[i]))) {
      throw dc::ConfigError("lambda values must be finite and nonnegative");
    }
    if (i > 0 && !(lambdas[i] < lambdas[i - 1])) {
      throw dc::ConfigError("lambda path must be strictly decreasing");
    }
  }
  if (!(batch_fraction > 0.0 && batch_fraction <= 1.0)) {
    throw dc::ConfigError("batch_fraction must lie in (0, 1]");
  }
  if (patience == 0) throw dc::ConfigError("patience must be positive");
  if (repetitions == 0) throw dc::ConfigError("repetitions must be at least 1");
  if (max_epochs == 0) throw dc::ConfigError("max_epochs must be positive");
  if (!(time_limit_seconds > 0.0)) throw dc::ConfigError("time limit must be positive");
  if (workers == 0) throw dc::ConfigError("workers must be at least 1");
  if (method == Method::kSpgd && q != prox::Norm::kL2) {
    throw dc::ConfigError("spgd solves the l_{2,1} problem; q must be 2");
  }
  if (spgd_fixed_step && !(*spgd_fixed_step > 0.0)) {
    throw dc::ConfigError("spgd fixed step must be positive");
  }
}

std::string ExperimentSpec::to_json() const {
  json j;
  json source;
  if (data.generator) {
    source["generator"] = {{"kind", data.generator->kind},
                           {"n", data.generator->n},
                           {"d", data.generator->d},
                           {"seed", data.generator->seed}};
  } else {
    source["path"] = data.path;
    source["format"] = data.load.format == data::Format::kCsv ? "csv" : "libsvm";
    source["label_column"] = data.load.label_column;
    if (data.load.dimension) source["dimension"] = *data.load.dimension;
  }
  j["data"] = source;
  j["algorithm"] = to_string(method);
  j["q"] = mlr::to_string(q);
  j["penalty"] = mlr::to_string(penalty);
  j["alphas"] = alphas;
  j["lambdas"] = lambdas;
  j["batch_fraction"] = batch_fraction;
  j["patience"] = patience;
  j["eps_stop"] = eps_stop;
  j["time_limit"] = time_limit_seconds;
  j["repetitions"] = repetitions;
  j["seed"] = seed;
  j["max_epochs"] = max_epochs;
  j["test_fraction"] = test_fraction;
  j["validation_fraction"] = validation_fraction;
  j["standardize"] = standardize;
  j["workers"] = workers;
  if (spgd_fixed_step) j["spgd_fixed_step"] = *spgd_fixed_step;
  return j.dump(2);
}

ExperimentSpec ExperimentSpec::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw dc::ConfigError(std::string("experiment spec is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw dc::ConfigError("experiment spec must be a JSON object");
  static const std::set<std::string> kKeys{
      "data", "algorithm", "method", "q", "penalty", "alphas", "lambdas", "lambda_path",
      "batch_fraction", "patience", "eps_stop", "time_limit", "repetitions", "seed", "max_epochs",
      "test_fraction", "validation_fraction", "standardize", "workers", "spgd_fixed_step"};
  for (const auto& item : j.items()) {
    if (!kKeys.count(item.key())) throw dc::ConfigError("experiment spec: unknown key '" + item.key() + "'");
  }
  ExperimentSpec spec;
  try {
    const json& source = j.at("data");
    if (source.contains("generator")) {
      const json& g = source.at("generator");
      data::GeneratorSpec gen;
      gen.kind = g.value("kind", gen.kind);
      gen.n = g.value("n", gen.n);
      gen.d = g.value("d", gen.d);
      gen.seed = g.value("seed", gen.seed);
      spec.data.generator = gen;
    }
    if (source.contains("path")) {
      spec.data.path = source.at("path").get<std::string>();
      spec.data.load.format = data::parse_format(source.value("format", std::string("libsvm")));
      spec.data.load.label_column = source.value("label_column", std::string("label"));
      if (source.contains("dimension")) spec.data.load.dimension = source.at("dimension").get<std::size_t>();
    }
    if (j.contains("algorithm")) {
      spec.method = method_from_string(j.at("algorithm").get<std::string>());
    } else if (j.contains("method")) {
      spec.method = method_from_string(j.at("method").get<std::string>());
    }
    if (j.contains("q")) spec.q = mlr::norm_from_string(j.at("q").get<std::string>());
    if (j.contains("penalty")) {
      spec.penalty = mlr::penalty_kind_from_string(j.at("penalty").get<std::string>());
    }
    if (j.contains("alphas")) spec.alphas = j.at("alphas").get<std::vector<double>>();
    if (j.contains("lambdas")) {
      spec.lambdas = j.at("lambdas").get<std::vector<double>>();
    } else if (j.contains("lambda_path")) {
      const json& p = j.at("lambda_path");
      spec.lambdas = lambda_path(p.value("head", 1e4), p.value("tail", 1e-3));
    }
    spec.batch_fraction = j.value("batch_fraction", spec.batch_fraction);
    spec.patience = j.value("patience", spec.patience);
    spec.eps_stop = j.value("eps_stop", spec.eps_stop);
    spec.time_limit_seconds = j.value("time_limit", spec.time_limit_seconds);
    spec.repetitions = j.value("repetitions", spec.repetitions);
    spec.seed = j.value("seed", spec.seed);
    spec.max_epochs = j.value("max_epochs", spec.max_epochs);
    spec.test_fraction = j.value("test_fraction", spec.test_fraction);
    spec.validation_fraction = j.value("validation_fraction", spec.validation_fraction);
    spec.standardize = j.value("standardize", spec.standardize);
    spec.workers = j.value("workers", spec.workers);
    if (j.contains("spgd_fixed_step")) spec.spgd_fixed_step = j.at("spgd_fixed_step").get<double>();
  } catch (const json::exception& e) {
    throw dc::ConfigError(std::string("experiment spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

ExperimentSpec ExperimentSpec::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw dc::ConfigError("cannot open experiment spec " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return from_json(buffer.str());
}

std::uint64_t split_seed(const ExperimentSpec& spec, std::size_t repetition) {
  return spec.seed + repetition;
}

std::uint64_t solver_seed(const ExperimentSpec& spec, std::size_t repetition, std::size_t alpha_index,
                          std::size_t lambda_index) {
  SplitMix64 mix(spec.seed ^ 0x9e3779b97f4a7c15ULL);
  std::uint64_t s = mix();
  for (std::uint64_t part : {repetition, alpha_index, lambda_index}) {
    SplitMix64 step(s ^ part);
    s = step();
  }
  return s;
}

data::DataSplit prepare_data(const ExperimentSpec& spec, std::size_t repetition, data::Scaler* scaler) {
  data::Dataset full;
  if (spec.data.generator) {
    data::GeneratorSpec gen = *spec.data.generator;
    gen.seed += repetition;
    full = data::generate(gen);
  } else {
    full = data::load_sparse_text(spec.data.path, spec.data.load);
  }
  data::SplitSpec split_spec;
  split_spec.test_fraction = spec.test_fraction;
  split_spec.validation_fraction = spec.validation_fraction;
  split_spec.seed = split_seed(spec, repetition);
  data::DataSplit split = data::split(full, split_spec);
  if (spec.standardize) {
    data::Scaler fitted = data::standardize(split);
    if (scaler) *scaler = std::move(fitted);
  }
  return split;
}

namespace {

mlr::Algorithm dc_algorithm(Method method) {
  switch (method) {
    case Method::kDca: return mlr::Algorithm::kDca;
    case Method::kSdca: return mlr::Algorithm::kSdca;
    case Method::kIsdca: return mlr::Algorithm::kIsdca;
    case Method::kSpgd: break;
  }
  throw dc::ConfigError("spgd is not a DC algorithm");
}

double last_objective(const dc::ConvergenceTrace& trace) {
  for (auto it = trace.records.rbegin(); it != trace.records.rend(); ++it) {
    if (!std::isnan(it->objective)) return it->objective;
  }
  return std::nan("");
}

}  // namespace

SolveOutcome solve_one(const ExperimentSpec& spec, const data::DataSplit& split, double alpha,
                       double lambda, const mlr::ModelState& init, std::uint64_t seed,
                       double time_budget_seconds) {
  const std::size_t d = split.train.dimension();
  const std::size_t classes = split.train.num_classes();

  SolveOutcome out;
  RunRecord& rec = out.record;
  rec.alpha = alpha;
  rec.lambda = lambda;
  rec.seed = seed;

  EarlyStopper stopper(spec.patience);
  dc::EpochCallback early_stop = [&](const dc::EpochEvent& e) {
    const mlr::ModelState m = mlr::ModelState::unpack(e.x, d, classes);
    return stopper.update(accuracy_metric(m, split.validation));
  };
  const bool stochastic = spec.method != Method::kDca;

  const auto start = std::chrono::steady_clock::now();
  try {
    if (spec.method == Method::kSpgd) {
      baselines::SpgdConfig cfg;
      cfg.batch_fraction = spec.batch_fraction;
      cfg.lambda = lambda;
      if (spec.spgd_fixed_step) {
        cfg.step_rule = baselines::SpgdConfig::StepRule::kFixed;
        cfg.fixed_step = *spec.spgd_fixed_step;
      }
      cfg.max_epochs = spec.max_epochs;
      cfg.seed = seed;
      cfg.time_limit_seconds = time_budget_seconds;
      auto res = baselines::run_spgd(split.train, cfg, init, early_stop);
      out.model = std::move(res.model);
      rec.trace = std::move(res.trace);
      rec.stop_reason = res.stop_reason;
      rec.epochs = res.epochs;
      rec.iterations = res.iterations;
    } else {
      mlr::PenaltyConfig penalty;
      penalty.kind = spec.penalty;
      penalty.alpha = alpha;
      penalty.lambda = lambda;
      penalty.q = spec.q;
      const mlr::MlrProblem problem(split.train, penalty);
      dc::SolverConfig cfg;
      cfg.batch_fraction = spec.batch_fraction;
      cfg.max_epochs = spec.max_epochs;
      cfg.eps_stop = spec.eps_stop;
      cfg.seed = seed;
      cfg.time_limit_seconds = time_budget_seconds;
      dc::SolverHooks hooks;
      if (stochastic) hooks.on_epoch = early_stop;
      auto res = mlr::fit(problem, dc_algorithm(spec.method), init, cfg, hooks);
      out.model = std::move(res.model);
      rec.trace = std::move(res.solver.trace);
      rec.stop_reason = res.solver.stop_reason;
      rec.epochs = res.solver.epochs;
      rec.iterations = res.solver.iterations;
    }
  } catch (const dc::SolverError& e) {
    rec.stop_reason = dc::StopReason::kAborted;
    rec.error = e.what();
    rec.iterations = e.iteration();
    out.model = init;
  } catch (const mlr::NumericError& e) {
    rec.stop_reason = dc::StopReason::kAborted;
    rec.error = e.what();
    out.model = init;
  }
  rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  rec.objective = last_objective(rec.trace);
  rec.test_accuracy = accuracy_metric(out.model, split.test);
  rec.validation_accuracy = accuracy_metric(out.model, split.validation);
  rec.selected = selected_features(out.model);
  rec.sparsity = sparsity_metric(out.model);
  return out;
}

const RunRecord& RunReport::at(std::size_t repetition, std::size_t alpha_index,
                               std::size_t lambda_index) const {
  const std::size_t na = spec.alphas.size();
  const std::size_t nl = spec.lambdas.size();
  return runs.at((repetition * na + alpha_index) * nl + lambda_index);
}

std::vector<std::size_t> RunReport::best_runs() const {
  const std::size_t na = spec.alphas.size();
  const std::size_t nl = spec.lambdas.size();
  std::vector<std::size_t> best;
  for (std::size_t r = 0; r < spec.repetitions; ++r) {
    std::size_t pick = (r * na) * nl;
    for (std::size_t a = 0; a < na; ++a) {
      for (std::size_t l = 0; l < nl; ++l) {
        const std::size_t idx = (r * na + a) * nl + l;
        const RunRecord& cand = runs[idx];
        const RunRecord& cur = runs[pick];
        if (cand.validation_accuracy > cur.validation_accuracy ||
            (cand.validation_accuracy == cur.validation_accuracy && cand.lambda > cur.lambda)) {
          pick = idx;
        }
      }
    }
    best.push_back(pick);
  }
  return best;
}

namespace {

Aggregate summarize(const std::vector<const RunRecord*>& runs, double alpha, double lambda) {
  std::vector<double> acc, val, sp, sec, ep;
  for (const RunRecord* r : runs) {
    acc.push_back(r->test_accuracy);
    val.push_back(r->validation_accuracy);
    sp.push_back(r->sparsity);
    sec.push_back(r->seconds);
    ep.push_back(static_cast<double>(r->epochs));
  }
  Aggregate a;
  a.alpha = alpha;
  a.lambda = lambda;
  a.test_accuracy = mean_std(acc);
  a.validation_accuracy = mean_std(val);
  a.sparsity = mean_std(sp);
  a.seconds = mean_std(sec);
  a.epochs = mean_std(ep);
  return a;
}

}  // namespace

std::vector<Aggregate> aggregate(const RunReport& report) {
  std::vector<Aggregate> out;
  for (std::size_t a = 0; a < report.spec.alphas.size(); ++a) {
    for (std::size_t l = 0; l < report.spec.lambdas.size(); ++l) {
      std::vector<const RunRecord*> cell;
      for (std::size_t r = 0; r < report.spec.repetitions; ++r) cell.push_back(&report.at(r, a, l));
      out.push_back(summarize(cell, report.spec.alphas[a], report.spec.lambdas[l]));
    }
  }
  return out;
}

Aggregate aggregate_best(const RunReport& report) {
  std::vector<const RunRecord*> picks;
  for (std::size_t idx : report.best_runs()) picks.push_back(&report.runs[idx]);
  return summarize(picks, std::nan(""), std::nan(""));
}

RunReport run_path(const ExperimentSpec& spec) {
  spec.validate();
  RunReport report;
  report.spec = spec;

  std::vector<data::DataSplit> splits;
  for (std::size_t r = 0; r < spec.repetitions; ++r) splits.push_back(prepare_data(spec, r));
  report.dimension = splits.front().train.dimension();
  report.num_classes = splits.front().train.num_classes();

  const std::size_t na = spec.alphas.size();
  const std::size_t nl = spec.lambdas.size();
  report.runs.resize(spec.repetitions * na * nl);

  // one cell = one repetition and one alpha, walked sequentially over lambda
  auto run_cell = [&](std::size_t cell) {
    const std::size_t r = cell / na;
    const std::size_t a = cell % na;
    const data::DataSplit& split = splits[r];
    mlr::ModelState model = mlr::ModelState::zeros(split.train.dimension(), split.train.num_classes());
    const auto start = std::chrono::steady_clock::now();
    for (std::size_t l = 0; l < nl; ++l) {
      RunRecord& slot = report.runs[(r * na + a) * nl + l];
      const double used = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      const double budget = spec.time_limit_seconds - used;
      const std::uint64_t seed = solver_seed(spec, r, a, l);
      if (budget <= 0.0) {
        // out of time: report the last model without solving
        slot.alpha = spec.alphas[a];
        slot.lambda = spec.lambdas[l];
        slot.seed = seed;
        slot.stop_reason = dc::StopReason::kTimeLimit;
        slot.test_accuracy = accuracy_metric(model, split.test);
        slot.validation_accuracy = accuracy_metric(model, split.validation);
        slot.selected = selected_features(model);
        slot.sparsity = sparsity_metric(model);
        slot.objective = std::nan("");
      } else {
        SolveOutcome o = solve_one(spec, split, spec.alphas[a], spec.lambdas[l], model, seed, budget);
        model = std::move(o.model);
        slot = std::move(o.record);
      }
      slot.repetition = r;
      slot.alpha_index = a;
      slot.lambda_index = l;
    }
  };

  const std::size_t cells = spec.repetitions * na;
  const std::size_t workers = std::min(spec.workers, cells);
  if (workers <= 1) {
    for (std::size_t c = 0; c < cells; ++c) run_cell(c);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t c = next++; c < cells; c = next++) run_cell(c);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  return report;
}

}  // namespace sdca::harness

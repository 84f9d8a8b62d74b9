#include <random>

#include <benchmark/benchmark.h>

#include "sdca/data/split.hpp"
#include "sdca/data/standardize.hpp"
#include "sdca/data/synthetic.hpp"
#include "sdca/dc/blocks.hpp"
#include "sdca/dc/solver.hpp"
#include "sdca/mlr/problem.hpp"
#include "sdca/prox/prox.hpp"
#include "sdca/random.hpp"

namespace {

using namespace sdca;

void BM_Prox(benchmark::State& state, prox::Norm q) {
  SplitMix64 rng(1);
  std::normal_distribution<double> normal;
  prox::ProxQuery query;
  query.u.resize(state.range(0));
  for (Eigen::Index k = 0; k < query.u.size(); ++k) query.u[k] = normal(rng);
  query.c = 0.5 * prox::dual_norm(query.u, q);
  query.rho = 2.0;
  query.q = q;
  for (auto _ : state) benchmark::DoNotOptimize(prox::prox(query));
}
BENCHMARK_CAPTURE(BM_Prox, l1, prox::Norm::kL1)->Arg(4)->Arg(20);
BENCHMARK_CAPTURE(BM_Prox, l2, prox::Norm::kL2)->Arg(4)->Arg(20);
BENCHMARK_CAPTURE(BM_Prox, linf, prox::Norm::kLinf)->Arg(4)->Arg(20);

struct Sim1Fixture {
  data::Dataset train;
  Sim1Fixture() {
    data::DataSplit split = data::split(data::generate_sim1(10000, 3), {});
    data::standardize(split);
    train = std::move(split.train);
  }
};

const Sim1Fixture& sim1() {
  static const Sim1Fixture fixture;
  return fixture;
}

mlr::PenaltyConfig penalty() {
  mlr::PenaltyConfig p;
  p.alpha = 1.0;
  p.lambda = 1e-2;
  return p;
}

// one block of a 10-block partition
void BM_LinearizeBlock(benchmark::State& state) {
  const mlr::MlrProblem problem(sim1().train, penalty());
  dc::BlockSampler sampler(problem.size(), 0.1, 5);
  const dc::Vector x = problem.point(mlr::ModelState::zeros(problem.num_features(), problem.num_classes()));
  const double eps = static_cast<double>(state.range(0)) * 1e-3;
  for (auto _ : state) benchmark::DoNotOptimize(problem.linearize(sampler.partition().block(0), x, eps));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(sampler.partition().block(0).size()));
}
BENCHMARK(BM_LinearizeBlock)->Arg(0)->Arg(1);

void BM_Objective(benchmark::State& state) {
  const mlr::MlrProblem problem(sim1().train, penalty());
  const dc::Vector x = problem.point(mlr::ModelState::zeros(problem.num_features(), problem.num_classes()));
  for (auto _ : state) benchmark::DoNotOptimize(problem.objective(x));
}
BENCHMARK(BM_Objective);

void BM_SdcaEpoch(benchmark::State& state) {
  const mlr::MlrProblem problem(sim1().train, penalty());
  const auto init = mlr::ModelState::zeros(problem.num_features(), problem.num_classes());
  dc::SolverConfig cfg;
  cfg.max_epochs = 1;
  cfg.eps_stop = 0.0;
  const auto algo = state.range(0) == 0 ? mlr::Algorithm::kDca : mlr::Algorithm::kSdca;
  for (auto _ : state) benchmark::DoNotOptimize(mlr::fit(problem, algo, init, cfg));
}
BENCHMARK(BM_SdcaEpoch)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();

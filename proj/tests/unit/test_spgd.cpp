#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "sdca/baselines/spgd.hpp"
#include "sdca/dc/solver.hpp"
#include "sdca/prox/prox.hpp"

using namespace sdca;
using baselines::SpgdConfig;

TEST_SUITE("spgd") {
  TEST_CASE("decaying step") {
    CHECK(baselines::decaying_step(1000, 10) == doctest::Approx(10.0));
    CHECK(baselines::decaying_step(1000, 1) == doctest::Approx(100.0));
    CHECK_THROWS(baselines::decaying_step(1000, 0));
  }

  TEST_CASE("config validation") {
    SpgdConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.batch_fraction = 0.0;
    CHECK_THROWS(cfg.validate());
    cfg.batch_fraction = 0.1;
    cfg.lambda = -1.0;
    CHECK_THROWS(cfg.validate());
    cfg.lambda = 0.0;
    cfg.step_rule = SpgdConfig::StepRule::kFixed;
    CHECK_THROWS(cfg.validate());
  }

  TEST_CASE("group soft threshold agrees with prox_l2 row by row") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const mlr::ModelState m = testing::random_model(12, 5, seed, 2.0, prox::Norm::kL2);
      const double thr = 0.5 + 0.2 * static_cast<double>(seed);
      const mlr::Matrix direct = baselines::group_soft_threshold(m.W, thr);
      for (Eigen::Index j = 0; j < m.W.rows(); ++j) {
        const prox::Vector row = m.W.row(j).transpose();
        const prox::Vector res = prox::prox_l2({row, thr, 1.0, prox::Norm::kL2});
        CHECK((res - direct.row(j).transpose()).lpNorm<Eigen::Infinity>() <= 1e-12);
        if (row.norm() <= thr) CHECK(direct.row(j).isZero(0.0));
      }
    }
  }

  TEST_CASE("large lambda zeroes every row") {
    const auto ds = testing::random_dataset(100, 8, 3, 1);
    SpgdConfig cfg;
    cfg.lambda = 1e4;
    cfg.max_epochs = 5;
    const auto res = baselines::run_spgd(ds, cfg, mlr::ModelState::zeros(8, 3));
    CHECK(res.model.W.isZero(0.0));
    CHECK(res.stop_reason == dc::StopReason::kMaxEpochs);
    CHECK(res.trace.epoch_records().size() == 6);
  }

  TEST_CASE("full batch small fixed step decreases the objective") {
    const auto ds = testing::random_dataset(120, 6, 3, 2);
    SpgdConfig cfg;
    cfg.batch_fraction = 1.0;
    cfg.step_rule = SpgdConfig::StepRule::kFixed;
    cfg.fixed_step = 0.1;
    cfg.max_epochs = 50;
    for (double lambda : {0.0, 0.05}) {
      cfg.lambda = lambda;
      const auto res = baselines::run_spgd(ds, cfg, mlr::ModelState::zeros(6, 3));
      const auto epochs = res.trace.epoch_records();
      REQUIRE(epochs.size() == 51);
      for (std::size_t e = 1; e < epochs.size(); ++e) {
        CHECK(epochs[e].objective <= epochs[e - 1].objective + 1e-12);
      }
      CHECK(epochs.back().objective ==
            doctest::Approx(baselines::l21_objective(ds, res.model, lambda)).epsilon(1e-14));
    }
  }

  TEST_CASE("objective at zero is log Q") {
    const auto ds = testing::random_dataset(30, 4, 5, 3);
    CHECK(baselines::l21_objective(ds, mlr::ModelState::zeros(4, 5), 3.0) == doctest::Approx(std::log(5.0)));
  }

  TEST_CASE("callback stops the run and sees synced group norms") {
    const auto ds = testing::random_dataset(100, 5, 3, 4);
    SpgdConfig cfg;
    cfg.lambda = 1e-3;
    cfg.max_epochs = 100;
    std::size_t calls = 0;
    const auto res = baselines::run_spgd(ds, cfg, mlr::ModelState::zeros(5, 3), [&](const dc::EpochEvent& ev) {
      const auto m = mlr::ModelState::unpack(ev.x, 5, 3);
      for (std::size_t j = 0; j < 5; ++j) {
        CHECK(m.t[static_cast<Eigen::Index>(j)] == doctest::Approx(mlr::row_norm(m.W, j, prox::Norm::kL2)));
      }
      return ++calls == 3;
    });
    CHECK(calls == 3);
    CHECK(res.stop_reason == dc::StopReason::kEarlyStopping);
    CHECK(res.epochs == 3);
  }

  TEST_CASE("same seed same iterates") {
    const auto ds = testing::random_dataset(90, 5, 3, 5);
    SpgdConfig cfg;
    cfg.lambda = 1e-2;
    cfg.max_epochs = 10;
    cfg.seed = 77;
    const auto a = baselines::run_spgd(ds, cfg, mlr::ModelState::zeros(5, 3));
    const auto b = baselines::run_spgd(ds, cfg, mlr::ModelState::zeros(5, 3));
    CHECK(a.model.W == b.model.W);
    CHECK(a.model.b == b.model.b);
  }

  TEST_CASE("divergence raises SolverError") {
    const auto ds = testing::random_dataset(50, 5, 3, 6, 50.0);
    SpgdConfig cfg;
    cfg.step_rule = SpgdConfig::StepRule::kFixed;
    cfg.fixed_step = 1e300;
    cfg.max_epochs = 20;
    CHECK_THROWS_AS(baselines::run_spgd(ds, cfg, mlr::ModelState::zeros(5, 3)), dc::SolverError);
  }
}

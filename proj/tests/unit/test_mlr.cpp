#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "sdca/dc/eps_subgradient.hpp"
#include "sdca/mlr/model.hpp"
#include "sdca/mlr/penalty.hpp"
#include "sdca/mlr/problem.hpp"
#include "sdca/mlr/serialize.hpp"
#include "sdca/random.hpp"

using namespace sdca;
using mlr::Matrix;
using mlr::ModelState;
using mlr::Vector;
namespace fs = std::filesystem;

namespace {

const prox::Norm kNorms[] = {prox::Norm::kL1, prox::Norm::kL2, prox::Norm::kLinf};
const mlr::PenaltyKind kKinds[] = {mlr::PenaltyKind::kExponential, mlr::PenaltyKind::kCappedL1};

data::Dataset dense_rows(std::size_t d, std::size_t q, const std::vector<std::vector<double>>& rows,
                         const std::vector<int>& labels) {
  data::Dataset ds(d, q);
  for (std::size_t i = 0; i < rows.size(); ++i) ds.add_dense_row(rows[i], labels[i]);
  return ds;
}

mlr::PenaltyConfig penalty(mlr::PenaltyKind kind, double alpha, double lambda, prox::Norm q) {
  mlr::PenaltyConfig p;
  p.kind = kind;
  p.alpha = alpha;
  p.lambda = lambda;
  p.q = q;
  return p;
}

// surrogate (rho/2)||(W,b)||^2 - <U,W> - <v,b> - <z,t> on Omega
double surrogate_objective(const ModelState& m, const Matrix& U, const Vector& v, const Vector& z,
                           double rho, prox::Norm q) {
  for (std::size_t j = 0; j < m.dimension(); ++j) {
    if (mlr::row_norm(m.W, j, q) > m.t[static_cast<Eigen::Index>(j)] * (1 + 1e-12) + 1e-15) {
      return std::numeric_limits<double>::infinity();
    }
  }
  return 0.5 * rho * (m.W.squaredNorm() + m.b.squaredNorm()) - (U.array() * m.W.array()).sum() - v.dot(m.b) -
         z.dot(m.t);
}

}  // namespace

TEST_SUITE("mlr") {
  TEST_CASE("softmax closed forms") {
    const auto ds = dense_rows(2, 3, {{1.0, -2.0}}, {1});
    ModelState m = ModelState::zeros(2, 3);
    Vector p = mlr::softmax_probabilities(m, ds.row(0));
    for (int k = 0; k < 3; ++k) CHECK(p[k] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

    m.b << 0.0, std::log(2.0), std::log(3.0);
    p = mlr::softmax_probabilities(m, ds.row(0));
    CHECK(p[0] == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
    CHECK(p[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(p[2] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(std::abs(p.sum() - 1.0) <= 1e-12);

    m.W << 0.3, -1.0, 2.0, 0.7, 0.1, -0.4;
    const Vector before = mlr::softmax_probabilities(m, ds.row(0));
    m.b.array() += 123.0;
    CHECK((mlr::softmax_probabilities(m, ds.row(0)) - before).lpNorm<Eigen::Infinity>() <= 1e-12);

    m.W(1, 2) = std::numeric_limits<double>::infinity();
    try {
      mlr::softmax_probabilities(m, ds.row(0));
      FAIL("expected NumericError");
    } catch (const mlr::NumericError& e) {
      CHECK(e.class_index() == 3);
    }
  }

  TEST_CASE("negative log likelihood") {
    const auto ds = dense_rows(2, 4, {{1.0, -2.0}}, {3});
    const ModelState zero = ModelState::zeros(2, 4);
    CHECK(mlr::nll_loss(zero, ds.row(0), 3) == doctest::Approx(std::log(4.0)).epsilon(1e-15));
    const ModelState zero2 = ModelState::zeros(2, 2);
    CHECK(mlr::nll_loss(zero2, ds.row(0), 1) == doctest::Approx(0.693147180559945).epsilon(1e-14));

    const auto data = testing::random_dataset(200, 8, 5, 3, 2.0);
    for (std::size_t i = 0; i < data.size(); ++i) {
      const ModelState m = testing::random_model(8, 5, 100 + i, 1.5, prox::Norm::kL2);
      const double got = mlr::nll_loss(m, data.row(i), data.label(i));
      const long double want = testing::nll_long_double(m, data.row(i), data.label(i));
      CHECK(std::abs(got - static_cast<double>(want)) <= 1e-10 * std::max(1.0, std::abs(got)));
      CHECK(got >= 0.0);
    }
  }

  TEST_CASE("prediction breaks ties toward the smallest class") {
    const auto ds = dense_rows(1, 3, {{1.0}}, {1});
    ModelState m = ModelState::zeros(1, 3);
    CHECK(mlr::predict(m, ds.row(0)) == 1);
    m.b << 0.0, 2.0, 2.0;
    CHECK(mlr::predict(m, ds.row(0)) == 2);
  }

  TEST_CASE("penalty values and slopes") {
    const auto exp5 = penalty(mlr::PenaltyKind::kExponential, 5.0, 0.1, prox::Norm::kL2);
    CHECK(mlr::penalty_value(0.0, exp5) == 0.0);
    CHECK(mlr::penalty_slope(0.0, exp5) == doctest::Approx(-0.5));
    const auto cap2 = penalty(mlr::PenaltyKind::kCappedL1, 2.0, 0.1, prox::Norm::kL2);
    CHECK(mlr::penalty_value(0.3, cap2) == doctest::Approx(0.6));
    CHECK(mlr::penalty_value(5.0, cap2) == 1.0);
    CHECK(mlr::penalty_slope(0.5, cap2) == doctest::Approx(-0.2));  // alpha t == 1 takes -lambda alpha
    CHECK(mlr::penalty_slope(0.2, cap2) == doctest::Approx(-0.2));
    CHECK(mlr::penalty_slope(0.6, cap2) == 0.0);
    for (auto kind : kKinds) {
      const auto cfg = penalty(kind, 1.7, 1.0, prox::Norm::kL2);
      double prev = 0.0;
      for (double t = 0.0; t < 5.0; t += 0.01) {
        const double v = mlr::penalty_value(t, cfg);
        CHECK(v >= prev);
        CHECK(v <= 1.0);
        CHECK(mlr::penalty_slope(t, cfg) <= 0.0);
        prev = v;
      }
    }
    CHECK_THROWS_AS(penalty(mlr::PenaltyKind::kExponential, 0.0, 1.0, prox::Norm::kL2).validate(),
                    std::invalid_argument);
    CHECK_THROWS_AS(penalty(mlr::PenaltyKind::kExponential, 1.0, -1.0, prox::Norm::kL2).validate(),
                    std::invalid_argument);
  }

  TEST_CASE("large alpha approximates the row count") {
    const double lambda = 0.7;
    sdca::SplitMix64 rng(4);
    for (auto kind : kKinds) {
      const auto cfg = penalty(kind, 100.0, lambda, prox::Norm::kL2);
      // exponential: 1 - exp(-100 t) misses 1 by at most exp(-10) per row at t = 0.1
      const double floor_t = kind == mlr::PenaltyKind::kCappedL1 ? 0.1 : 0.14;
      double sum = 0.0;
      int nonzero = 0;
      for (int j = 0; j < 30; ++j) {
        const double t = (j % 3 == 0) ? 0.0 : floor_t + 3.0 * rng.uniform();
        sum += mlr::penalty_value(t, cfg);
        nonzero += t > 0.0;
      }
      CHECK(std::abs(lambda * sum - lambda * nonzero) <= 1e-6 * 30);
    }
  }

  TEST_CASE("component subgradient formulas") {
    const auto ds = testing::random_dataset(30, 20, 4, 5);
    const auto cfg = penalty(mlr::PenaltyKind::kExponential, 5.0, 0.1, prox::Norm::kL2);
    const mlr::MlrProblem problem(ds, cfg);
    const ModelState m = ModelState::zeros(20, 4);
    const auto sg = mlr::component_subgradient(0, m, problem.spec());
    for (Eigen::Index j = 0; j < 20; ++j) CHECK(sg.z[j] == doctest::Approx(-0.5));
    const auto cap = penalty(mlr::PenaltyKind::kCappedL1, 2.0, 0.3, prox::Norm::kL2);
    const mlr::MlrProblem capped(ds, cap);
    ModelState m2 = testing::random_model(20, 4, 8, 0.3, prox::Norm::kL2);
    const auto sg2 = mlr::component_subgradient(3, m2, capped.spec());
    for (Eigen::Index j = 0; j < 20; ++j) {
      CHECK(sg2.z[j] == (2.0 * m2.t[j] <= 1.0 ? -0.6 : 0.0));
    }
    // the packed form used by the engine agrees with the structured one
    const dc::Vector v = capped.subgradient_h(3, m2.pack());
    const dc::Vector packed = ModelState{sg2.U, sg2.v, sg2.z}.pack();
    CHECK((v - packed).lpNorm<Eigen::Infinity>() <= 1e-14);
  }

  TEST_CASE("smooth part matches central differences") {
    const std::size_t d = 20, q = 4;
    const auto ds = testing::random_dataset(100, d, q, 6);
    const mlr::MlrProblem problem(ds, penalty(mlr::PenaltyKind::kExponential, 1.0, 0.1, prox::Norm::kL2));
    const double rho = problem.spec().rho;
    double worst = 0.0;
    for (std::size_t probe = 0; probe < 100; ++probe) {
      const ModelState m = testing::random_model(d, q, 1000 + probe, 0.5, prox::Norm::kL2);
      const auto sg = mlr::component_subgradient(probe, m, problem.spec());
      Vector analytic(static_cast<Eigen::Index>(d * q + q));
      analytic << Eigen::Map<const Vector>(sg.U.data(), sg.U.size()), sg.v;
      Vector wb(analytic.size());
      wb << Eigen::Map<const Vector>(m.W.data(), m.W.size()), m.b;
      const auto f = [&](const Vector& y) {
        return testing::smooth_h_part(y, ds.row(probe), ds.label(probe), d, q, rho);
      };
      const Vector fd = testing::finite_difference_gradient(f, wb);
      worst = std::max(worst, (fd - analytic).norm() / analytic.norm());
    }
    CHECK(worst <= 1e-5);
  }

  TEST_CASE("lipschitz estimate") {
    CHECK(mlr::estimate_lipschitz(dense_rows(2, 1, {{0.0, 0.0}}, {1})) == 0.5);
    CHECK(mlr::estimate_lipschitz(dense_rows(2, 1, {{3.0, 4.0}}, {1})) == doctest::Approx(13.0));

    const std::size_t d = 6, q = 3;
    const auto ds = testing::random_dataset(40, d, q, 7, 1.5);
    const double L = mlr::estimate_lipschitz(ds);
    const mlr::MlrProblem problem(ds, penalty(mlr::PenaltyKind::kExponential, 1.0, 0.0, prox::Norm::kL2));
    const double rho = problem.spec().rho;
    auto loss_grad = [&](std::size_t i, const ModelState& m) {
      const auto sg = mlr::component_subgradient(i, m, problem.spec());
      Vector g(static_cast<Eigen::Index>(d * q + q));
      g << Eigen::Map<const Vector>(m.W.data(), m.W.size()) * rho - Eigen::Map<const Vector>(sg.U.data(), sg.U.size()),
          rho * m.b - sg.v;
      return g;
    };
    for (std::size_t pair = 0; pair < 100; ++pair) {
      const ModelState a = testing::random_model(d, q, 2 * pair, 1.0, prox::Norm::kL2);
      const ModelState b = testing::random_model(d, q, 2 * pair + 1, 1.0, prox::Norm::kL2);
      const std::size_t i = pair % ds.size();
      const double dist = std::sqrt((a.W - b.W).squaredNorm() + (a.b - b.b).squaredNorm());
      CHECK((loss_grad(i, a) - loss_grad(i, b)).norm() <= L * dist * (1 + 1e-12));
    }
  }

  TEST_CASE("surrogate closed form") {
    const auto ds = dense_rows(3, 2, {{0.0, 0.0, 0.0}, {0.1, 0.0, 0.0}}, {1, 2});
    const mlr::MlrProblem problem(ds, penalty(mlr::PenaltyKind::kExponential, 1.0, 0.1, prox::Norm::kL2), 2.0);
    const Matrix U = Matrix::Constant(3, 2, 1.0);
    Vector v(2);
    v << 2.0, -4.0;
    const ModelState out = mlr::solve_surrogate(U, v, Vector::Zero(3), problem.spec());
    CHECK(out.b[0] == 1.0);
    CHECK(out.b[1] == -2.0);
    CHECK(out.W == U / 2.0);
    CHECK_THROWS_AS(mlr::solve_surrogate(U, v, Vector::Constant(3, 0.1), problem.spec()), std::invalid_argument);
  }

  TEST_CASE("surrogate solution beats random perturbations") {
    const std::size_t d = 6, q = 4;
    const auto ds = testing::random_dataset(20, d, q, 9);
    sdca::SplitMix64 rng(21);
    std::normal_distribution<double> normal;
    for (auto norm : kNorms) {
      const mlr::MlrProblem problem(ds, penalty(mlr::PenaltyKind::kExponential, 1.0, 1.0, norm));
      const double rho = problem.spec().rho;
      Matrix U(d, q);
      for (Eigen::Index k = 0; k < U.size(); ++k) U.data()[k] = 3.0 * normal(rng);
      Vector v(q), z(d);
      for (Eigen::Index k = 0; k < v.size(); ++k) v[k] = normal(rng);
      for (Eigen::Index k = 0; k < z.size(); ++k) z[k] = -4.0 * rng.uniform();
      const ModelState best = mlr::solve_surrogate(U, v, z, problem.spec());
      const double f = surrogate_objective(best, U, v, z, rho, norm);
      int worse = 0;
      for (int probe = 0; probe < 1000; ++probe) {
        ModelState y = best;
        const double scale = std::pow(10.0, -3.0 + 3.0 * rng.uniform());
        for (Eigen::Index k = 0; k < y.W.size(); ++k) y.W.data()[k] += scale * normal(rng);
        for (Eigen::Index k = 0; k < y.b.size(); ++k) y.b[k] += scale * normal(rng);
        y.sync_group_norms(norm);
        worse += surrogate_objective(y, U, v, z, rho, norm) >= f - 1e-12;
      }
      CHECK(worse == 1000);
      for (std::size_t j = 0; j < d; ++j) CHECK(best.t[static_cast<Eigen::Index>(j)] == mlr::row_norm(best.W, j, norm));
    }
  }

  TEST_CASE("objective and lifted objective agree") {
    const auto ds = testing::random_dataset(50, 5, 3, 10);
    for (auto norm : kNorms) {
      for (auto kind : kKinds) {
        const mlr::MlrProblem problem(ds, penalty(kind, 2.0, 0.3, norm));
        for (int r = 0; r < 10; ++r) {
          const ModelState m = testing::random_model(5, 3, 50 + r, 0.4, norm);
          CHECK(std::abs(problem.objective(problem.point(m)) - problem.penalized_objective(m)) <= 1e-12);
        }
        ModelState infeasible = testing::random_model(5, 3, 3, 0.4, norm);
        infeasible.t[0] *= 0.5;
        CHECK(std::isinf(problem.objective(infeasible.pack())));
      }
      const mlr::MlrProblem plain(ds, penalty(mlr::PenaltyKind::kExponential, 1.0, 0.0, norm));
      CHECK(plain.objective(plain.point(ModelState::zeros(5, 3))) == doctest::Approx(std::log(3.0)));
      const ModelState m = testing::random_model(5, 3, 77, 0.4, norm);
      CHECK(plain.objective(plain.point(m)) == doctest::Approx(plain.loss(m)).epsilon(1e-14));
    }
  }

  TEST_CASE("h_i is convex along random segments") {
    const auto ds = testing::random_dataset(30, 5, 3, 11, 2.0);
    for (auto kind : kKinds) {
      const mlr::MlrProblem problem(ds, penalty(kind, 3.0, 0.5, prox::Norm::kL2));
      int failures = 0;
      for (int pair = 0; pair < 1000; ++pair) {
        const dc::Vector a = problem.point(testing::random_model(5, 3, 3 * pair, 1.0, prox::Norm::kL2));
        const dc::Vector b = problem.point(testing::random_model(5, 3, 3 * pair + 1, 1.0, prox::Norm::kL2));
        const std::size_t i = static_cast<std::size_t>(pair) % ds.size();
        const double mid = problem.h_value(i, 0.5 * (a + b));
        failures += mid > 0.5 * (problem.h_value(i, a) + problem.h_value(i, b)) + 1e-9;
      }
      CHECK(failures == 0);
    }
  }

  TEST_CASE("factored linearization matches the per-sample default") {
    const auto ds = testing::random_dataset(60, 7, 4, 12);
    const mlr::MlrProblem problem(ds, penalty(mlr::PenaltyKind::kCappedL1, 2.0, 0.2, prox::Norm::kLinf));
    const dc::Vector x = problem.point(testing::random_model(7, 4, 5, 0.7, prox::Norm::kLinf));
    std::vector<std::size_t> idx{3, 17, 4, 59, 22, 0};
    for (double eps : {0.0, 1e-3}) {
      const auto fast = problem.linearize(idx, x, eps);
      const auto slow = problem.dc::DcProblem::linearize(idx, x, eps);
      CHECK((fast.slope - slow.slope).norm() <= 1e-10 * slow.slope.norm());
      CHECK(std::abs(fast.offset - slow.offset) <= 1e-10 * std::max(1.0, std::abs(slow.offset)));
    }
  }

  TEST_CASE("truncated softmax stays in the eps-subdifferential") {
    const std::size_t d = 4, q = 6;
    const auto ds = testing::random_dataset(40, d, q, 13, 0.5);
    const mlr::MlrProblem problem(ds, penalty(mlr::PenaltyKind::kExponential, 1.0, 0.1, prox::Norm::kL2),
                                  1.5 * mlr::estimate_lipschitz(ds));
    sdca::SplitMix64 rng(31);
    std::normal_distribution<double> normal;
    int truncated = 0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      const dc::Vector x = problem.point(testing::random_model(d, q, 400 + i, 3.0, prox::Norm::kL2));
      CHECK(problem.eps_subgradient_h(i, x, 0.0) == problem.subgradient_h(i, x));
      const double eps = 0.5;
      const dc::Vector v = problem.eps_subgradient_h(i, x, eps);
      truncated += (v - problem.subgradient_h(i, x)).norm() > 0.0;
      std::vector<dc::Vector> probes;
      for (int p = 0; p < 50; ++p) {
        ModelState y = problem.state(x);
        const double scale = std::pow(10.0, -2.0 + 2.5 * rng.uniform());
        for (Eigen::Index k = 0; k < y.W.size(); ++k) y.W.data()[k] += scale * normal(rng);
        for (Eigen::Index k = 0; k < y.b.size(); ++k) y.b[k] += scale * normal(rng);
        probes.push_back(problem.point(y));
      }
      const auto check = dc::check_eps_subgradient([&](const dc::Vector& y) { return problem.h_value(i, y); }, x, v,
                                                   eps, problem.strong_convexity_modulus(), probes);
      CHECK(check.holds);
    }
    CHECK(truncated > 0);
  }

  TEST_CASE("full batch DCA descends for every norm and penalty") {
    const auto ds = testing::random_dataset(50, 5, 3, 14);
    for (auto norm : kNorms) {
      for (auto kind : kKinds) {
        const mlr::MlrProblem problem(ds, penalty(kind, 2.0, 0.05, norm));
        dc::SolverConfig cfg;
        cfg.max_epochs = 100;
        cfg.eps_stop = 0.0;
        const auto res = mlr::fit(problem, mlr::Algorithm::kDca, ModelState::zeros(5, 3), cfg);
        for (std::size_t l = 1; l < res.solver.trace.records.size(); ++l) {
          CHECK(res.solver.trace.records[l].objective <= res.solver.trace.records[l - 1].objective + 1e-10);
        }
        for (std::size_t j = 0; j < 5; ++j) {
          CHECK(res.model.t[static_cast<Eigen::Index>(j)] == mlr::row_norm(res.model.W, j, norm));
        }
      }
    }
  }

  TEST_CASE("sdca with one block is dca") {
    const auto ds = testing::random_dataset(80, 6, 3, 15);
    const mlr::MlrProblem problem(ds, penalty(mlr::PenaltyKind::kExponential, 1.0, 0.02, prox::Norm::kL2));
    dc::SolverConfig cfg;
    cfg.max_epochs = 40;
    cfg.batch_fraction = 1.0;
    const auto a = mlr::fit(problem, mlr::Algorithm::kDca, ModelState::zeros(6, 3), cfg);
    const auto b = mlr::fit(problem, mlr::Algorithm::kSdca, ModelState::zeros(6, 3), cfg);
    CHECK(a.solver.x == b.solver.x);
    CHECK(a.solver.iterations == b.solver.iterations);
  }

  TEST_CASE("model file round trip") {
    const fs::path dir = fs::temp_directory_path() / "sdca_unit_mlr";
    fs::create_directories(dir);
    mlr::ModelFile file;
    file.model = testing::random_model(7, 3, 5, 1.0, prox::Norm::kLinf);
    file.model.W(2, 1) = -0.0;
    file.model.W(4, 0) = 1e-300;
    file.penalty = penalty(mlr::PenaltyKind::kCappedL1, 0.5, 3e-3, prox::Norm::kLinf);
    file.rho = 12.345678901234567;
    file.metadata["algorithm"] = "sdca";
    const std::string path = (dir / "m.bin").string();
    mlr::write_model(path, file);
    const mlr::ModelFile back = mlr::read_model(path);
    CHECK(back.model.W == file.model.W);
    CHECK(std::signbit(back.model.W(2, 1)));
    CHECK(back.model.b == file.model.b);
    CHECK(back.model.t == file.model.t);
    CHECK(back.penalty.kind == file.penalty.kind);
    CHECK(back.penalty.q == file.penalty.q);
    CHECK(back.penalty.alpha == file.penalty.alpha);
    CHECK(back.penalty.lambda == file.penalty.lambda);
    CHECK(back.rho == file.rho);
    CHECK(back.metadata == file.metadata);

    std::ifstream in(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::ofstream(path, std::ios::binary) << bytes.substr(0, bytes.size() - 8);
    CHECK_THROWS(mlr::read_model(path));
  }

  TEST_CASE("pack and unpack") {
    const ModelState m = testing::random_model(4, 3, 1, 1.0, prox::Norm::kL1);
    const dc::Vector x = m.pack();
    CHECK(x.size() == 4 * 3 + 3 + 4);
    CHECK(x[1] == m.W(0, 1));
    const ModelState back = ModelState::unpack(x, 4, 3);
    CHECK(back.W == m.W);
    CHECK(back.b == m.b);
    CHECK(back.t == m.t);
  }
}

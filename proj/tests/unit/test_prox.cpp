#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "sdca/prox/prox.hpp"
#include "sdca/random.hpp"

using sdca::prox::Norm;
using sdca::prox::ProxQuery;
using sdca::prox::Vector;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index k = 0;
  for (double x : xs) v[k++] = x;
  return v;
}

ProxQuery random_query(sdca::SplitMix64& rng, Norm q) {
  std::normal_distribution<double> normal;
  ProxQuery query;
  const auto dim = static_cast<Eigen::Index>(2 + rng() % 19);
  query.u.resize(dim);
  for (Eigen::Index k = 0; k < dim; ++k) query.u[k] = 3.0 * normal(rng);
  query.rho = 0.1 + 5.0 * rng.uniform();
  // mix of thresholds below and above the dual norm
  query.c = 1.5 * rng.uniform() * sdca::prox::dual_norm(query.u, q);
  query.q = q;
  return query;
}

const Norm kNorms[] = {Norm::kL1, Norm::kL2, Norm::kLinf};

}  // namespace

TEST_SUITE("prox") {
  TEST_CASE("l1 soft threshold arithmetic") {
    const Vector w = sdca::prox::prox_l1({vec({3, -1}), 2.0, 1.0, Norm::kL1});
    CHECK(w[0] == 1.0);
    CHECK(w[1] == 0.0);
  }

  TEST_CASE("l2 block soft threshold arithmetic") {
    const Vector w = sdca::prox::prox_l2({vec({3, 4}), 2.0, 1.0, Norm::kL2});
    CHECK(w[0] == doctest::Approx(1.8).epsilon(1e-15));
    CHECK(w[1] == doctest::Approx(2.4).epsilon(1e-15));
    const Vector z = sdca::prox::prox_l2({vec({3, 4}), 5.0, 1.0, Norm::kL2});
    CHECK(z.isZero(0.0));
  }

  TEST_CASE("linf via the l1 ball") {
    const Vector w = sdca::prox::prox_linf({vec({3, 1}), 2.0, 1.0, Norm::kLinf});
    CHECK(w[0] == doctest::Approx(1.0));
    CHECK(w[1] == doctest::Approx(1.0));
    const Vector z = sdca::prox::prox_linf({vec({1.5, -0.5}), 2.0, 1.0, Norm::kLinf});
    CHECK(z.isZero(0.0));
  }

  TEST_CASE("zero threshold is the identity") {
    const Vector u = vec({0.3, -2.0, 7.0});
    for (Norm q : kNorms) {
      const Vector w = sdca::prox::prox({u, 0.0, 4.0, q});
      CHECK(w == u / 4.0);
    }
  }

  TEST_CASE("l1 ball projection") {
    const Vector p = sdca::prox::project_l1_ball(vec({1.5, 0.5}), 1.0);
    CHECK(p[0] == doctest::Approx(1.0));
    CHECK(p[1] == 0.0);
    CHECK(sdca::prox::l1_ball_threshold(vec({1.5, 0.5}), 1.0) == doctest::Approx(0.5));
    const Vector inside = vec({0.2, -0.3});
    CHECK(sdca::prox::project_l1_ball(inside, 1.0) == inside);

    sdca::SplitMix64 rng(11);
    std::normal_distribution<double> normal;
    for (int trial = 0; trial < 500; ++trial) {
      Vector w(static_cast<Eigen::Index>(2 + rng() % 19));
      for (Eigen::Index k = 0; k < w.size(); ++k) w[k] = 2.0 * normal(rng);
      const Vector got = sdca::prox::project_l1_ball(w, 1.0);
      const Vector want = sdca::testing::l1_ball_oracle(w, 1.0);
      CHECK((got - want).lpNorm<Eigen::Infinity>() <= 1e-8);
    }
  }

  TEST_CASE("invalid queries are rejected") {
    CHECK_THROWS_AS(sdca::prox::prox({vec({1, 2}), -1.0, 1.0, Norm::kL2}), std::invalid_argument);
    CHECK_THROWS_AS(sdca::prox::prox({vec({1, 2}), 1.0, 0.0, Norm::kL2}), std::invalid_argument);
    CHECK_THROWS_AS(sdca::prox::project_l1_ball(vec({1, 2}), 0.0), std::invalid_argument);
  }

  TEST_CASE("numeric oracle agreement") {
    sdca::SplitMix64 rng(2024);
    for (Norm q : kNorms) {
      CAPTURE(static_cast<int>(q));
      double worst = -1.0;
      for (int trial = 0; trial < 200; ++trial) {
        const ProxQuery query = random_query(rng, q);
        const Vector got = sdca::prox::prox(query);
        const Vector ref = sdca::testing::prox_oracle(query);
        const double gap = sdca::prox::prox_objective(query, got) - sdca::prox::prox_objective(query, ref);
        worst = std::max(worst, gap);
        if (q == Norm::kL2) CHECK((got - ref).norm() <= 1e-6);
      }
      CHECK(worst <= 1e-9);
    }
  }

  TEST_CASE("threshold to exact zero at the dual norm") {
    sdca::SplitMix64 rng(5);
    for (Norm q : kNorms) {
      for (int trial = 0; trial < 100; ++trial) {
        ProxQuery query = random_query(rng, q);
        query.c = sdca::prox::dual_norm(query.u, q) * (1.0 + rng.uniform());
        CHECK(sdca::prox::prox(query).isZero(0.0));
      }
    }
  }

  TEST_CASE("nonexpansive") {
    sdca::SplitMix64 rng(6);
    for (Norm q : kNorms) {
      for (int trial = 0; trial < 200; ++trial) {
        ProxQuery a = random_query(rng, q);
        ProxQuery b = a;
        for (Eigen::Index k = 0; k < b.u.size(); ++k) b.u[k] += rng.uniform() - 0.5;
        const double lhs = (sdca::prox::prox(a) - sdca::prox::prox(b)).norm();
        CHECK(lhs <= (a.u - b.u).norm() / a.rho + 1e-12);
      }
    }
  }

  TEST_CASE("sign and permutation equivariance") {
    sdca::SplitMix64 rng(7);
    for (Norm q : kNorms) {
      for (int trial = 0; trial < 100; ++trial) {
        const ProxQuery query = random_query(rng, q);
        const auto m = query.u.size();
        Eigen::PermutationMatrix<Eigen::Dynamic> perm(m);
        perm.setIdentity();
        std::shuffle(perm.indices().data(), perm.indices().data() + m, rng);
        Vector signs(m);
        for (Eigen::Index k = 0; k < m; ++k) signs[k] = (rng() & 1) ? 1.0 : -1.0;

        ProxQuery moved = query;
        moved.u = perm * query.u.cwiseProduct(signs);
        const Vector expected = perm * sdca::prox::prox(query).cwiseProduct(signs);
        CHECK((sdca::prox::prox(moved) - expected).lpNorm<Eigen::Infinity>() <= 1e-12);
      }
    }
  }
}

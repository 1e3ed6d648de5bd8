#include <doctest.h>

#include <cmath>

#include "dml/metric.hpp"
#include "support/oracles.hpp"

using dml::MahalanobisMetric;

TEST_CASE("distance on the identity metric is squared Euclidean") {
  const auto m = MahalanobisMetric::identity(2);
  Eigen::Vector2d x(1, 0), y(0, 1);
  CHECK(dml::distance(m, x, y) == 2.0);
  CHECK(dml::distance(m, x, x) == 0.0);

  dml::Rng rng(1);
  for (int t = 0; t < 50; ++t) {
    const auto a = oracles::random_vector(rng, 7);
    const auto b = oracles::random_vector(rng, 7);
    const double want = (a - b).squaredNorm();
    const double got = dml::distance(MahalanobisMetric::identity(7), a, b);
    CHECK(std::abs(got - want) <= 1e-12 * std::max(1.0, want));
  }
}

TEST_CASE("distance evaluates the quadratic form and is exactly symmetric") {
  Eigen::MatrixXd a(2, 2);
  a << 2, 0, 0, 1;
  const MahalanobisMetric m(a);
  Eigen::Vector2d x(1, 2), y(0, 0);
  CHECK(dml::distance(m, x, y) == doctest::Approx(6.0).epsilon(1e-14));

  dml::Rng rng(2);
  for (int t = 0; t < 50; ++t) {
    const MahalanobisMetric r(oracles::random_pd_matrix(rng, 5));
    const auto u = oracles::random_vector(rng, 5);
    const auto v = oracles::random_vector(rng, 5);
    CHECK(dml::distance(r, u, v) == dml::distance(r, v, u));
    CHECK(dml::distance(r, u, u) == 0.0);
  }
}

TEST_CASE("distance rejects mismatched dimensions") {
  const auto m = MahalanobisMetric::identity(3);
  Eigen::Vector2d x(0, 0);
  Eigen::Vector3d y(0, 0, 0);
  CHECK_THROWS_AS(dml::distance(m, x, y), dml::Error);
}

TEST_CASE("logdet divergence closed-form values") {
  const auto eye = MahalanobisMetric::identity(2);
  CHECK(dml::logdet_divergence(eye, eye) == 0.0);

  const MahalanobisMetric two(2.0 * Eigen::MatrixXd::Identity(2, 2));
  const double log2 = std::log(2.0);
  CHECK(dml::logdet_divergence(two, eye) ==
        doctest::Approx(2.0 - 2.0 * log2).epsilon(1e-9));
  CHECK(dml::logdet_divergence(eye, two) ==
        doctest::Approx(2.0 * log2 - 1.0).epsilon(1e-9));

  const auto eye5 = MahalanobisMetric::identity(5);
  CHECK(dml::logdet_divergence(eye5, eye5) == 0.0);
}

TEST_CASE("logdet divergence is nonnegative and separates metrics") {
  dml::Rng rng(3);
  for (int t = 0; t < 40; ++t) {
    const MahalanobisMetric p(oracles::random_pd_matrix(rng, 4));
    const MahalanobisMetric a(oracles::random_pd_matrix(rng, 4));
    const double div = dml::logdet_divergence(a, p);
    CHECK(div >= 0.0);
    const double max_diff = (a.matrix() - p.matrix()).cwiseAbs().maxCoeff();
    if (div <= 1e-10) {
      CHECK(max_diff <= 1e-8);
    }
    if (max_diff <= 1e-8) {
      CHECK(div <= 1e-10);
    }
    CHECK(dml::logdet_divergence(p, p) <= 1e-12);
  }
}

TEST_CASE("logdet divergence near-equality calibration") {
  dml::Rng rng(7);
  const Eigen::MatrixXd base = oracles::random_pd_matrix(rng, 5);
  const MahalanobisMetric p(base);

  Eigen::MatrixXd tiny = base;
  tiny(1, 2) += 5e-9;
  tiny(2, 1) += 5e-9;
  CHECK(dml::logdet_divergence(MahalanobisMetric(tiny), p) <= 1e-10);

  Eigen::MatrixXd off = base;
  off(0, 0) += 1e-3;
  CHECK(dml::logdet_divergence(MahalanobisMetric(off), p) > 1e-10);
}

TEST_CASE("logdet divergence rejects singular priors and handles singular A") {
  Eigen::MatrixXd singular = Eigen::MatrixXd::Zero(2, 2);
  singular(0, 0) = 1.0;
  const MahalanobisMetric p(singular);
  const auto eye = MahalanobisMetric::identity(2);
  CHECK_THROWS_AS(dml::logdet_divergence(eye, p), dml::Error);
  CHECK(std::isinf(dml::logdet_divergence(p, eye)));

  CHECK_THROWS_AS(
      dml::logdet_divergence(eye, MahalanobisMetric::identity(3)), dml::Error);
}

TEST_CASE("rank_one_update worked examples") {
  const auto eye = MahalanobisMetric::identity(2);
  Eigen::Vector2d e1(1, 0);
  const auto up = dml::rank_one_update(eye, e1, 0.5);
  Eigen::MatrixXd want(2, 2);
  want << 1.5, 0, 0, 1;
  CHECK(oracles::exact_equal(up.matrix(), want));

  const auto unchanged = dml::rank_one_update(eye, e1, 0.0);
  CHECK(oracles::exact_equal(unchanged.matrix(), eye.matrix()));

  Eigen::MatrixXd one(1, 1);
  one << 1.0;
  Eigen::VectorXd z(1);
  z << 2.0;
  const auto scalar = dml::rank_one_update(MahalanobisMetric(one), z, -0.15);
  CHECK(scalar.matrix()(0, 0) == doctest::Approx(0.4).epsilon(1e-14));
}

TEST_CASE("rank_one_update rejects updates that break semidefiniteness") {
  Eigen::MatrixXd one(1, 1);
  one << 1.0;
  Eigen::VectorXd z(1);
  z << 1.0;
  try {
    dml::rank_one_update(MahalanobisMetric(one), z, -1.0);
    FAIL("expected PsdViolation");
  } catch (const dml::Error& e) {
    CHECK(e.code() == dml::Errc::psd_violation);
  }
}

TEST_CASE("rank_one_update matches the explicit expression and keeps PSD") {
  dml::Rng rng(4);
  for (int t = 0; t < 60; ++t) {
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(rng.below(8));
    const MahalanobisMetric m(oracles::random_pd_matrix(rng, d));
    const auto z = oracles::random_vector(rng, d);
    const double quad = z.dot(m.matrix() * z);
    // Admissible beta: 1 + beta*quad > 0. Sample both signs.
    const double beta = rng.uniform() < 0.5
                            ? rng.uniform() * 2.0
                            : -rng.uniform() * 0.9 / std::max(quad, 1e-9);
    const auto up = dml::rank_one_update(m, z, beta);
    const auto want = oracles::rank_one_update_reference(m.matrix(), z, beta);
    CHECK((up.matrix() - want).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(dml::is_psd(up));
    CHECK(oracles::exact_equal(up.matrix(), up.matrix().transpose()));
  }
}

TEST_CASE("is_psd classifies definite, indefinite, and boundary matrices") {
  CHECK(dml::is_psd(MahalanobisMetric::identity(3)));
  CHECK(dml::is_psd(MahalanobisMetric(Eigen::MatrixXd::Zero(2, 2))));

  Eigen::MatrixXd indefinite(2, 2);
  indefinite << 1, 2, 2, 1;  // eigenvalues 3 and -1
  CHECK_FALSE(dml::is_psd(MahalanobisMetric(indefinite)));
}

TEST_CASE("metric construction validates symmetry and finiteness") {
  Eigen::MatrixXd asym(2, 2);
  asym << 1, 0.5, 0.25, 1;
  CHECK_THROWS_AS(MahalanobisMetric{asym}, dml::Error);

  Eigen::MatrixXd nan(1, 1);
  nan << std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(MahalanobisMetric{nan}, dml::Error);

  CHECK_THROWS_AS(MahalanobisMetric{Eigen::MatrixXd::Zero(2, 3)}, dml::Error);
}

#include <doctest.h>

#include <set>

#include "dml/classifier.hpp"
#include "support/oracles.hpp"

namespace {

dml::Dataset three_points() {
  Eigen::MatrixXd x(3, 1);
  x << 0, 1, 10;
  return dml::Dataset(x, {"A", "A", "B"});
}

}  // namespace

TEST_CASE("knn_predict basic votes") {
  const auto ds = three_points();
  const auto eye = dml::MahalanobisMetric::identity(1);
  Eigen::VectorXd q(1);
  q << 0.4;
  CHECK(dml::knn_predict(ds, eye, q, 1) == "A");
  CHECK(dml::knn_predict(ds, eye, q, 3) == "A");  // 2 votes vs 1
}

TEST_CASE("knn_predict resolves exact vote ties by label order") {
  Eigen::MatrixXd x(2, 1);
  x << 0, 2;
  const dml::Dataset ds(x, {"A", "B"});
  Eigen::VectorXd q(1);
  q << 1;
  CHECK(dml::knn_predict(ds, dml::MahalanobisMetric::identity(1), q, 2) == "A");
}

TEST_CASE("knn_predict resolves vote ties by summed distance first") {
  // k=2: one A at distance 1, one B at distance 4; votes tie 1-1, B loses.
  Eigen::MatrixXd x(4, 1);
  x << 1, -2, 50, 60;
  const dml::Dataset ds(x, {"B", "A", "A", "B"});
  Eigen::VectorXd q(1);
  q << 0;
  CHECK(dml::knn_predict(ds, dml::MahalanobisMetric::identity(1), q, 2) == "B");
}

TEST_CASE("knn_predict argument validation") {
  const auto ds = three_points();
  const auto eye = dml::MahalanobisMetric::identity(1);
  Eigen::VectorXd q(1);
  q << 0;
  CHECK_THROWS_AS(dml::knn_predict(ds, eye, q, 0), dml::Error);
  CHECK_THROWS_AS(dml::knn_predict(ds, eye, q, 4), dml::Error);
  Eigen::VectorXd wrong(2);
  wrong << 0, 0;
  CHECK_THROWS_AS(dml::knn_predict(ds, eye, wrong, 1), dml::Error);
}

TEST_CASE("knn_predict is invariant under positive metric rescaling") {
  dml::Rng rng(51);
  const auto ds = oracles::random_dataset(rng, 25, 4, 3);
  const Eigen::MatrixXd base = oracles::random_pd_matrix(rng, 4);
  const dml::MahalanobisMetric m1(base);
  const dml::MahalanobisMetric m2(8.0 * base);
  for (int t = 0; t < 20; ++t) {
    const auto q = oracles::random_vector(rng, 4);
    for (const int k : {1, 3, 5}) {
      CHECK(dml::knn_predict(ds, m1, q, k) == dml::knn_predict(ds, m2, q, k));
    }
  }
}

TEST_CASE("knn_predict with k=1 recovers a training point's own label") {
  dml::Rng rng(52);
  const auto ds = oracles::random_dataset(rng, 20, 3, 4);
  const auto m = dml::MahalanobisMetric(oracles::random_pd_matrix(rng, 3));
  for (Eigen::Index i = 0; i < ds.size(); ++i) {
    CHECK(dml::knn_predict(ds, m, ds.feature(i).transpose(), 1) == ds.label(i));
  }
}

TEST_CASE("evaluate scores self-matching and separated clusters at 100%") {
  dml::Rng rng(53);
  const auto ds = oracles::random_dataset(rng, 15, 3, 3);
  const auto eye = dml::MahalanobisMetric::identity(3);
  const auto self_acc = dml::evaluate(ds, ds, eye, {1});
  CHECK(self_acc.at(1) == 100.0);

  dml::SyntheticSpec spec;
  spec.classes = 2;
  spec.per_class = 10;
  spec.dim = 3;
  spec.informative_dim = 3;
  spec.separation = 50.0;
  spec.seed = 1;
  const auto clusters = dml::generate_synthetic(spec);
  const auto folds = dml::stratified_kfold(clusters, 2, 1);
  const auto train_ds = clusters.subset(folds[0].train);
  const auto test_ds = clusters.subset(folds[0].test);
  const auto acc = dml::evaluate(train_ds, test_ds,
                                 dml::MahalanobisMetric::identity(3), {1, 2, 3});
  CHECK(acc.at(1) == 100.0);
  CHECK(acc.at(2) == 100.0);
  CHECK(acc.at(3) == 100.0);
}

TEST_CASE("evaluate on permuted labels sits near chance") {
  dml::SyntheticSpec spec;
  spec.classes = 2;
  spec.per_class = 100;
  spec.dim = 4;
  spec.informative_dim = 2;
  spec.separation = 5.0;
  spec.seed = 13;
  const auto ds = dml::generate_synthetic(spec);

  // Destroy the label structure with a seeded permutation.
  std::vector<std::string> labels = ds.labels();
  dml::Rng rng(99);
  rng.shuffle(labels);
  const dml::Dataset shuffled(ds.features(), labels);

  const auto splits = dml::stratified_kfold(shuffled, 2, 99);
  const auto acc =
      dml::evaluate(shuffled.subset(splits[0].train),
                    shuffled.subset(splits[0].test),
                    dml::MahalanobisMetric::identity(4), {1});
  CHECK(acc.at(1) >= 35.0);
  CHECK(acc.at(1) <= 65.0);
}

TEST_CASE("evaluate argument validation") {
  const auto ds = three_points();
  const auto eye = dml::MahalanobisMetric::identity(1);
  CHECK_THROWS_AS(dml::evaluate(ds, ds, eye, {}), dml::Error);
  CHECK_THROWS_AS(dml::evaluate(ds, ds, eye, {9}), dml::Error);
}

TEST_CASE("cross_validate with zero cycles equals the baseline exactly") {
  dml::SyntheticSpec spec;
  spec.classes = 5;
  spec.per_class = 6;
  spec.dim = 6;
  spec.informative_dim = 3;
  spec.separation = 2.0;
  spec.noise_scale = 1.5;
  spec.seed = 4;
  const auto ds = dml::generate_synthetic(spec);

  dml::SolverConfig cfg;
  cfg.cycles = 0;
  const std::vector<int> ks = {1, 2, 3, 4, 5};
  const auto report = dml::cross_validate(ds, cfg, ks, 3, 4);
  for (const int k : ks) {
    CHECK(report.learned.at(k).mean == report.baseline.at(k).mean);
    CHECK(report.learned.at(k).per_fold == report.baseline.at(k).per_fold);
  }
}

TEST_CASE("cross_validate report shape and determinism") {
  dml::SyntheticSpec spec;
  spec.classes = 4;
  spec.per_class = 6;
  spec.dim = 5;
  spec.informative_dim = 2;
  spec.separation = 3.0;
  spec.noise_scale = 2.0;
  spec.seed = 8;
  const auto ds = dml::generate_synthetic(spec);

  dml::SolverConfig cfg;
  cfg.cycles = 2;
  const std::vector<int> ks = {1, 2, 3, 4, 5};
  const auto r1 = dml::cross_validate(ds, cfg, ks, 3, 8);
  REQUIRE(r1.ks == ks);
  CHECK(r1.folds == 3);
  CHECK(r1.train_time_ms.size() == 3);
  int cells = 0;
  for (const int k : ks) {
    CHECK(r1.learned.at(k).per_fold.size() == 3);
    CHECK(r1.baseline.at(k).per_fold.size() == 3);
    cells += static_cast<int>(r1.learned.at(k).per_fold.size()) +
             static_cast<int>(r1.baseline.at(k).per_fold.size());
    for (const double a : r1.learned.at(k).per_fold) {
      CHECK(a >= 0.0);
      CHECK(a <= 100.0);
    }
  }
  CHECK(cells == 30);  // 5 k-values x 3 folds x 2 methods

  const auto r2 = dml::cross_validate(ds, cfg, ks, 3, 8);
  for (const int k : ks) {
    CHECK(r1.learned.at(k).per_fold == r2.learned.at(k).per_fold);
    CHECK(r1.baseline.at(k).per_fold == r2.baseline.at(k).per_fold);
  }
  CHECK(r1.to_table() == r2.to_table());
}

TEST_CASE("report rendering carries both methods and parses as JSON") {
  dml::SyntheticSpec spec;
  spec.classes = 3;
  spec.per_class = 5;
  spec.dim = 4;
  spec.informative_dim = 2;
  spec.separation = 3.0;
  spec.seed = 2;
  const auto ds = dml::generate_synthetic(spec);

  dml::SolverConfig cfg;
  cfg.cycles = 1;
  const auto report = dml::cross_validate(ds, cfg, {1, 2}, 3, 2);
  const auto table = report.to_table();
  CHECK(table.find("Euclidean distance") != std::string::npos);
  CHECK(table.find("Ours") != std::string::npos);
  CHECK(table.find("k=1") != std::string::npos);
  CHECK(table.find("ms") == std::string::npos);  // timing stays out

  const auto json_text = report.to_json();
  CHECK(json_text.find("\"timing\"") != std::string::npos);
  CHECK(json_text.find("\"per_fold\"") != std::string::npos);
}

#pragma once

#include <map>
#include <string>
#include <vector>

#include "dml/dataset.hpp"
#include "dml/metric.hpp"
#include "dml/solver.hpp"

namespace dml {

/// Majority vote among the k nearest training samples under the metric.
/// Neighbor ties at the cutoff distance break to the smallest index;
/// vote ties break to the smallest summed neighbor distance, then to the
/// lexicographically smallest label.
std::string knn_predict(const Dataset& train, const MahalanobisMetric& metric,
                        const Eigen::Ref<const Eigen::VectorXd>& query, int k);

/// Accuracy (percent of correct predictions) on `test`, for each k.
std::map<int, double> evaluate(const Dataset& train, const Dataset& test,
                               const MahalanobisMetric& metric,
                               const std::vector<int>& ks);

struct KAccuracy {
  double mean = 0.0;
  std::vector<double> per_fold;
};

/// Cross-validation results for the learned metric and the Euclidean
/// (identity) baseline, in the row-per-method table layout.
struct EvaluationReport {
  std::vector<int> ks;
  int folds = 0;
  std::map<int, KAccuracy> learned;
  std::map<int, KAccuracy> baseline;
  std::vector<double> train_time_ms;  // per fold, separated from accuracies
  SolverConfig config;

  /// Accuracy table only (no timing), "%.2f" cells.
  std::string to_table() const;
  /// Full per-fold data as JSON; timing lives under its own key.
  std::string to_json() const;
};

/// Stratified k-fold protocol: per fold, trains the metric on the training
/// split only and evaluates both it and the identity baseline on the test
/// split for every k. Test samples never influence training.
EvaluationReport cross_validate(const Dataset& ds, const SolverConfig& cfg,
                                const std::vector<int>& ks, int folds,
                                std::uint64_t seed);

}  // namespace dml

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dml/error.hpp"

namespace dml {

/// One labeled feature vector. Used as a construction element; inside a
/// Dataset the features live in a contiguous matrix.
struct Sample {
  Eigen::VectorXd features;
  std::string label;
};

/// Immutable labeled feature data: an n-by-d feature matrix (one sample per
/// row), per-sample string labels, and an index of class memberships.
class Dataset {
 public:
  /// Validates shape, finiteness, and label count. Throws InvalidDimensions
  /// on empty data or NaN/Inf features.
  Dataset(Eigen::MatrixXd features, std::vector<std::string> labels);
  explicit Dataset(const std::vector<Sample>& samples);

  Eigen::Index size() const { return features_.rows(); }
  Eigen::Index dim() const { return features_.cols(); }

  const Eigen::MatrixXd& features() const { return features_; }
  Eigen::MatrixXd::ConstRowXpr feature(Eigen::Index i) const {
    return features_.row(i);
  }
  const std::string& label(Eigen::Index i) const {
    return labels_[static_cast<std::size_t>(i)];
  }
  const std::vector<std::string>& labels() const { return labels_; }

  /// Label -> member indices, ordered by label. Partitions [0, size()).
  const std::map<std::string, std::vector<Eigen::Index>>& class_table() const {
    return class_table_;
  }
  std::size_t class_count() const { return class_table_.size(); }

  /// New dataset holding the given rows, in the given order.
  Dataset subset(std::span<const Eigen::Index> indices) const;

 private:
  Eigen::MatrixXd features_;
  std::vector<std::string> labels_;
  std::map<std::string, std::vector<Eigen::Index>> class_table_;
};

/// Per-column centering/scaling recorded by standardize() so held-out data
/// can be transformed identically.
struct ScalingParams {
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;  // 1.0 for zero-variance columns

  Eigen::MatrixXd apply(const Eigen::MatrixXd& features) const;
  Dataset apply(const Dataset& ds) const;
};

/// Selects the label column of a CSV file by header name or 0-based position.
struct LabelColumn {
  static LabelColumn by_name(std::string name);
  static LabelColumn by_index(int index);
  /// CLI-flag resolution: an exact header-name match wins; otherwise an
  /// all-digit selector is read as a 0-based column index.
  static LabelColumn parse(const std::string& selector);

  std::string name;
  int index = -1;
  bool use_index = false;
};

/// Reads a headered, comma-separated, unquoted CSV. All non-label columns
/// must parse as decimal numbers.
Dataset load_csv(const std::filesystem::path& path, const LabelColumn& label);

/// Writes the ingestion format: header "label,f1,...,fd", one row per sample,
/// features printed with shortest round-trip precision.
void write_csv(const Dataset& ds, const std::filesystem::path& path);

/// Transforms every column to sample mean 0 and population stddev 1
/// (divisor n). Zero-variance columns are left centered with stddev
/// recorded as 1.
std::pair<Dataset, ScalingParams> standardize(const Dataset& ds);

struct FoldSplit {
  std::vector<Eigen::Index> train;
  std::vector<Eigen::Index> test;
};

/// Deterministic stratified k-fold split: each class's shuffled members are
/// dealt round-robin to folds, so per-class per-fold counts differ by at
/// most one. Throws ClassTooSmall if any class has fewer members than folds.
std::vector<FoldSplit> stratified_kfold(const Dataset& ds, int folds,
                                        std::uint64_t seed);

struct SyntheticSpec {
  int classes = 2;
  int per_class = 10;
  int dim = 2;
  int informative_dim = 2;
  double separation = 1.0;
  double noise_scale = 1.0;
  std::uint64_t seed = 0;
};

/// Gaussian class clusters. Class means are drawn from the seed and differ
/// only in the first informative_dim coordinates, with pairwise mean
/// separation proportional to `separation`. Samples add unit Gaussian noise
/// on the informative coordinates; the remaining coordinates are pure noise
/// at `noise_scale`. Pure function of its arguments.
Dataset generate_synthetic(const SyntheticSpec& spec);

}  // namespace dml

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dml/dataset.hpp"
#include "dml/metric.hpp"

namespace dml {

enum class Relation { similar, dissimilar };

/// An index pair constraint. Similar pairs share a label, dissimilar pairs
/// do not, and i != j.
struct Pair {
  Eigen::Index i;
  Eigen::Index j;
  Relation relation;
};

/// The pair sets of one training cycle: S_k (similar) and D_k (dissimilar),
/// each free of duplicate unordered pairs and sorted by (min index,
/// max index).
struct PairSet {
  std::vector<Pair> similar;
  std::vector<Pair> dissimilar;
  int cycle = 0;
};

struct NearestNeighbors {
  std::optional<Eigen::Index> similar;
  std::optional<Eigen::Index> dissimilar;
};

/// Exact linear scan for sample i's nearest same-class and nearest
/// other-class neighbors under the metric. Ties break to the smallest index.
/// A missing peer (singleton class, or a single-class dataset) leaves the
/// corresponding field empty.
NearestNeighbors nearest_neighbors(const Dataset& ds,
                                   const MahalanobisMetric& metric,
                                   Eigen::Index i);

/// Builds the cycle's pair sets: every sample contributes its nearest
/// similar neighbor (when one exists) and its nearest dissimilar neighbor.
/// Unordered duplicates are dropped, keeping the first occurrence in index
/// order. Throws SingleClassDataset when no dissimilar pair can exist.
PairSet build_pairset(const Dataset& ds, const MahalanobisMetric& metric,
                      int cycle);

/// Debug listing, one "i j" line per pair under S/D headers.
std::string dump_pairs(const PairSet& pairs);

}  // namespace dml

#include "dml/constraints.hpp"

#include <algorithm>
#include <iostream>
#include <set>
#include <sstream>
#include <utility>

namespace dml {
namespace {

std::pair<Eigen::Index, Eigen::Index> unordered_key(const Pair& p) {
  return {std::min(p.i, p.j), std::max(p.i, p.j)};
}

void sort_by_key(std::vector<Pair>& pairs) {
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    return unordered_key(a) < unordered_key(b);
  });
}

}  // namespace

NearestNeighbors nearest_neighbors(const Dataset& ds,
                                   const MahalanobisMetric& metric,
                                   Eigen::Index i) {
  NearestNeighbors result;
  double best_similar = 0.0;
  double best_dissimilar = 0.0;
  const auto& label_i = ds.label(i);
  for (Eigen::Index j = 0; j < ds.size(); ++j) {
    if (j == i) continue;
    const double d = distance(metric, ds.feature(i), ds.feature(j));
    if (ds.label(j) == label_i) {
      if (!result.similar || d < best_similar) {
        result.similar = j;
        best_similar = d;
      }
    } else {
      if (!result.dissimilar || d < best_dissimilar) {
        result.dissimilar = j;
        best_dissimilar = d;
      }
    }
  }
  return result;
}

PairSet build_pairset(const Dataset& ds, const MahalanobisMetric& metric,
                      int cycle) {
  if (ds.class_count() < 2) {
    throw Error(Errc::single_class_dataset,
                "pairwise constraints need at least two classes");
  }

  PairSet pairs;
  pairs.cycle = cycle;
  std::set<std::pair<Eigen::Index, Eigen::Index>> seen_similar;
  std::set<std::pair<Eigen::Index, Eigen::Index>> seen_dissimilar;
  for (Eigen::Index i = 0; i < ds.size(); ++i) {
    const auto nn = nearest_neighbors(ds, metric, i);
    if (nn.similar) {
      Pair p{i, *nn.similar, Relation::similar};
      if (seen_similar.insert(unordered_key(p)).second) {
        pairs.similar.push_back(p);
      }
    } else if (cycle <= 1) {
      std::cerr << "[dml] warning: sample " << i << " (class '" << ds.label(i)
                << "') has no same-class peer; it contributes only a"
                << " dissimilar pair\n";
    }
    if (nn.dissimilar) {
      Pair p{i, *nn.dissimilar, Relation::dissimilar};
      if (seen_dissimilar.insert(unordered_key(p)).second) {
        pairs.dissimilar.push_back(p);
      }
    }
  }
  sort_by_key(pairs.similar);
  sort_by_key(pairs.dissimilar);
  return pairs;
}

std::string dump_pairs(const PairSet& pairs) {
  std::ostringstream out;
  out << "# cycle " << pairs.cycle << " similar " << pairs.similar.size()
      << "\n";
  for (const auto& p : pairs.similar) out << p.i << " " << p.j << "\n";
  out << "# cycle " << pairs.cycle << " dissimilar " << pairs.dissimilar.size()
      << "\n";
  for (const auto& p : pairs.dissimilar) out << p.i << " " << p.j << "\n";
  return out.str();
}

}  // namespace dml

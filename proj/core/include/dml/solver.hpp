#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dml/constraints.hpp"
#include "dml/dataset.hpp"
#include "dml/metric.hpp"

namespace dml {

struct SolverConfig {
  double gamma = 1.0;          // slack trade-off, > 0
  int cycles = 5;              // outer pair-regeneration cycles, >= 0
  int max_sweeps = 1000;       // per-cycle cap on full passes over the pairs
  double conv_tol = 1e-3;      // sweep-to-sweep multiplier-change threshold
  double percentile_low = 5.0;   // U percentile of pair distances
  double percentile_high = 95.0; // L percentile of pair distances
  std::size_t pair_sample_cap = 10000;  // max pairs sampled for thresholds
  std::uint64_t seed = 0;
  bool rescale_thresholds = false;  // recompute U/L per cycle under A_{k-1}

  void validate() const;
};

/// Distance band of the pairwise constraints: similar pairs are pushed
/// below `upper` (U), dissimilar pairs above `lower` (L); 0 < U <= L.
struct Thresholds {
  double upper = 0.0;
  double lower = 0.0;
};

/// Nearest-rank percentiles of squared pair distances under the metric
/// (identity metric in the two-argument form). When n(n-1)/2 exceeds
/// cfg.pair_sample_cap, a seeded uniform sample of that many pairs is used.
/// U falls back to the smallest positive pair distance when the percentile
/// is nonpositive; throws DegenerateDataset when every pair distance is 0.
Thresholds compute_thresholds(const Dataset& ds, const SolverConfig& cfg);
Thresholds compute_thresholds(const Dataset& ds, const SolverConfig& cfg,
                              const MahalanobisMetric& metric);

/// Mutable state of one training cycle. The pair list is the sweep order:
/// the similar block then the dissimilar block, each sorted by
/// (min index, max index). slack and multiplier run parallel to pairs.
struct SolverState {
  MahalanobisMetric metric;
  MahalanobisMetric prior;
  std::vector<Pair> pairs;
  std::vector<double> slack;       // xi, > 0
  std::vector<double> multiplier;  // lambda, >= 0
  Thresholds thresholds;
};

/// Fresh state for a cycle: metric and prior both warm-started from
/// `warm_start`, slack initialized to U for similar pairs and L for
/// dissimilar pairs, multipliers zero.
SolverState init_cycle_state(const PairSet& pairs,
                             const MahalanobisMetric& warm_start,
                             const Thresholds& thresholds);

struct ProjectionOutcome {
  double pair_distance = 0.0;  // p, under the pre-update metric
  double delta = 0.0;          // +1 similar, -1 dissimilar
  double alpha = 0.0;
  double beta = 0.0;
  bool skipped = false;        // pair distance <= 1e-12, nothing applied
};

/// One Bregman projection: reads pair `index` of state.pairs, computes
///   p     = (x_i - x_j)^T A (x_i - x_j)
///   alpha = min(lambda, delta/2 * (1/p - gamma/xi))
///   beta  = delta*alpha / (1 - delta*alpha*p)
/// then applies xi <- gamma*xi / (gamma + delta*alpha*xi),
/// lambda <- lambda - alpha, A <- A + beta (A z)(A z)^T.
/// A zero alpha leaves the state untouched. Throws NumericalBreakdown when a
/// denominator falls below 1e-12.
ProjectionOutcome project_pair(SolverState& state, const Dataset& ds,
                               std::size_t index, const SolverConfig& cfg);

struct SweepStats {
  int sweeps = 0;
  double conv = 0.0;
};

/// Sweeps all pairs in order until the normalized multiplier change
/// sum|d lambda| / max(1, sum lambda) drops below cfg.conv_tol or
/// cfg.max_sweeps is reached. An empty pair list returns immediately.
SweepStats inner_solve(SolverState& state, const Dataset& ds,
                       const SolverConfig& cfg);

struct CycleStats {
  int cycle = 0;
  std::size_t n_similar = 0;
  std::size_t n_dissimilar = 0;
  int sweeps = 0;
  double conv = 0.0;
  double elapsed_ms = 0.0;
};

struct TrainingLog {
  std::vector<CycleStats> cycles;
  double total_ms = 0.0;
  std::string to_text() const;
};

struct TrainResult {
  MahalanobisMetric metric;
  TrainingLog log;
};

/// Invoked after each cycle with its stats, the metric A_k, and the pair
/// sets the cycle trained on.
using CycleCallback = std::function<void(
    const CycleStats&, const MahalanobisMetric&, const PairSet&)>;

/// Full training loop: A_0 = identity; each cycle rebuilds the pair sets
/// under A_{k-1}, warm-starts A_k from A_{k-1}, resets slacks/multipliers,
/// and runs inner_solve. Thresholds are computed once from the raw data
/// unless cfg.rescale_thresholds recomputes them per cycle under A_{k-1}.
TrainResult train(const Dataset& ds, const SolverConfig& cfg,
                  const CycleCallback& on_cycle = {});

}  // namespace dml

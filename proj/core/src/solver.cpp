#include "dml/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <sstream>

#include "dml/rng.hpp"

namespace dml {
namespace {

constexpr double kTinyDenominator = 1e-12;

double nearest_rank(const std::vector<double>& sorted, double percentile) {
  const auto n = static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil(percentile / 100.0 * n));
  if (rank < 1) rank = 1;
  if (rank > sorted.size()) rank = sorted.size();
  return sorted[rank - 1];
}

}  // namespace

void SolverConfig::validate() const {
  if (!(gamma > 0.0)) {
    throw Error(Errc::invalid_dimensions, "gamma must be > 0");
  }
  if (cycles < 0 || max_sweeps < 0) {
    throw Error(Errc::invalid_dimensions,
                "cycles and max_sweeps must be nonnegative");
  }
  if (!(conv_tol > 0.0)) {
    throw Error(Errc::invalid_dimensions, "conv_tol must be > 0");
  }
  if (!(percentile_low > 0.0) || !(percentile_high < 100.0) ||
      !(percentile_low < percentile_high)) {
    throw Error(Errc::invalid_dimensions,
                "percentiles must satisfy 0 < low < high < 100");
  }
  if (pair_sample_cap < 1) {
    throw Error(Errc::invalid_dimensions, "pair_sample_cap must be >= 1");
  }
}

Thresholds compute_thresholds(const Dataset& ds, const SolverConfig& cfg) {
  return compute_thresholds(ds, cfg, MahalanobisMetric::identity(ds.dim()));
}

Thresholds compute_thresholds(const Dataset& ds, const SolverConfig& cfg,
                              const MahalanobisMetric& metric) {
  cfg.validate();
  const Eigen::Index n = ds.size();
  if (n < 2) {
    throw Error(Errc::degenerate_dataset,
                "threshold estimation needs at least two samples");
  }

  const std::size_t total =
      static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2;
  std::vector<double> dists;
  if (total <= cfg.pair_sample_cap) {
    dists.reserve(total);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        dists.push_back(distance(metric, ds.feature(i), ds.feature(j)));
      }
    }
  } else {
    dists.reserve(cfg.pair_sample_cap);
    Rng rng(cfg.seed ^ 0x7477u);
    for (std::size_t s = 0; s < cfg.pair_sample_cap; ++s) {
      const auto i = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
      auto j = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n - 1)));
      if (j >= i) ++j;
      dists.push_back(distance(metric, ds.feature(i), ds.feature(j)));
    }
  }
  std::sort(dists.begin(), dists.end());

  Thresholds th;
  th.upper = nearest_rank(dists, cfg.percentile_low);
  th.lower = nearest_rank(dists, cfg.percentile_high);
  if (th.upper <= 0.0) {
    const auto first_positive =
        std::find_if(dists.begin(), dists.end(), [](double d) { return d > 0.0; });
    if (first_positive == dists.end()) {
      throw Error(Errc::degenerate_dataset,
                  "all sampled pair distances are zero");
    }
    th.upper = *first_positive;
  }
  if (th.lower < th.upper) th.lower = th.upper;
  if (th.lower == th.upper) th.lower = th.upper * (1.0 + 1e-6);
  return th;
}

SolverState init_cycle_state(const PairSet& pairs,
                             const MahalanobisMetric& warm_start,
                             const Thresholds& thresholds) {
  SolverState state{warm_start, warm_start, {}, {}, {}, thresholds};
  state.pairs.reserve(pairs.similar.size() + pairs.dissimilar.size());
  state.pairs.insert(state.pairs.end(), pairs.similar.begin(),
                     pairs.similar.end());
  state.pairs.insert(state.pairs.end(), pairs.dissimilar.begin(),
                     pairs.dissimilar.end());
  state.slack.reserve(state.pairs.size());
  for (const auto& p : state.pairs) {
    state.slack.push_back(p.relation == Relation::similar ? thresholds.upper
                                                          : thresholds.lower);
  }
  state.multiplier.assign(state.pairs.size(), 0.0);
  return state;
}

ProjectionOutcome project_pair(SolverState& state, const Dataset& ds,
                               std::size_t index, const SolverConfig& cfg) {
  const Pair& pair = state.pairs[index];
  const Eigen::VectorXd z = ds.feature(pair.i) - ds.feature(pair.j);

  ProjectionOutcome out;
  out.delta = pair.relation == Relation::similar ? 1.0 : -1.0;
  out.pair_distance = distance(state.metric, ds.feature(pair.i),
                               ds.feature(pair.j));
  if (out.pair_distance <= 1e-12) {
    out.skipped = true;  // coincident points; the projection is undefined
    return out;
  }

  const double p = out.pair_distance;
  const double xi = state.slack[index];
  const double lambda = state.multiplier[index];
  const double candidate = out.delta / 2.0 * (1.0 / p - cfg.gamma / xi);
  out.alpha = std::min(lambda, candidate);
  if (out.alpha == 0.0) return out;

  const double da = out.delta * out.alpha;
  const double beta_den = 1.0 - da * p;
  const double slack_den = cfg.gamma + da * xi;
  if (beta_den <= kTinyDenominator || slack_den <= kTinyDenominator) {
    std::ostringstream msg;
    msg << "pair (" << pair.i << "," << pair.j
        << "): projection denominators collapsed (1-delta*alpha*p = "
        << beta_den << ", gamma+delta*alpha*xi = " << slack_den
        << "); the gamma/threshold configuration cannot support this pair";
    throw Error(Errc::numerical_breakdown, msg.str());
  }
  out.beta = da / beta_den;

  state.slack[index] = cfg.gamma * xi / slack_den;
  state.multiplier[index] = lambda - out.alpha;
  state.metric = rank_one_update(state.metric, z, out.beta);
  return out;
}

SweepStats inner_solve(SolverState& state, const Dataset& ds,
                       const SolverConfig& cfg) {
  SweepStats stats;
  if (state.pairs.empty()) return stats;

  while (stats.sweeps < cfg.max_sweeps) {
    double change = 0.0;
    for (std::size_t idx = 0; idx < state.pairs.size(); ++idx) {
      const auto outcome = project_pair(state, ds, idx, cfg);
      if (outcome.skipped && stats.sweeps == 0) {
        const auto& p = state.pairs[idx];
        std::cerr << "[dml] warning: pair (" << p.i << "," << p.j
                  << ") has zero distance and is skipped\n";
      }
      change += std::abs(outcome.alpha);
    }
    ++stats.sweeps;
    double total = 0.0;
    for (const double l : state.multiplier) total += std::abs(l);
    stats.conv = change / std::max(1.0, total);
    if (stats.conv < cfg.conv_tol) break;
  }
  return stats;
}

std::string TrainingLog::to_text() const {
  std::ostringstream out;
  out << "cycle  similar  dissimilar  sweeps  conv          elapsed_ms\n";
  for (const auto& c : cycles) {
    out << c.cycle << "  " << c.n_similar << "  " << c.n_dissimilar << "  "
        << c.sweeps << "  " << c.conv << "  " << c.elapsed_ms << "\n";
  }
  out << "total_ms  " << total_ms << "\n";
  return out.str();
}

TrainResult train(const Dataset& ds, const SolverConfig& cfg,
                  const CycleCallback& on_cycle) {
  cfg.validate();
  if (ds.class_count() < 2) {
    throw Error(Errc::single_class_dataset,
                "training needs at least two classes");
  }

  using clock = std::chrono::steady_clock;
  const auto t_start = clock::now();

  TrainResult result{MahalanobisMetric::identity(ds.dim()), {}};
  Thresholds thresholds;
  if (cfg.cycles > 0) thresholds = compute_thresholds(ds, cfg);

  for (int k = 1; k <= cfg.cycles; ++k) {
    const auto t_cycle = clock::now();
    try {
      if (cfg.rescale_thresholds && k > 1) {
        thresholds = compute_thresholds(ds, cfg, result.metric);
      }
      const PairSet pairs = build_pairset(ds, result.metric, k);
      SolverState state = init_cycle_state(pairs, result.metric, thresholds);
      const SweepStats sweep = inner_solve(state, ds, cfg);
      result.metric = std::move(state.metric);

      CycleStats stats;
      stats.cycle = k;
      stats.n_similar = pairs.similar.size();
      stats.n_dissimilar = pairs.dissimilar.size();
      stats.sweeps = sweep.sweeps;
      stats.conv = sweep.conv;
      stats.elapsed_ms =
          std::chrono::duration<double, std::milli>(clock::now() - t_cycle)
              .count();
      result.log.cycles.push_back(stats);
      if (on_cycle) on_cycle(stats, result.metric, pairs);
    } catch (const Error& e) {
      if (e.code() == Errc::numerical_breakdown) {
        std::ostringstream msg;
        msg << "cycle " << k << ": " << e.what();
        throw Error(Errc::numerical_breakdown, msg.str());
      }
      throw;
    }
  }
  result.log.total_ms =
      std::chrono::duration<double, std::milli>(clock::now() - t_start).count();
  return result;
}

}  // namespace dml

#include "dml/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace dml {
namespace {

/// Training indices sorted by (distance to query, index).
std::vector<std::pair<double, Eigen::Index>> ranked_neighbors(
    const Dataset& train, const MahalanobisMetric& metric,
    const Eigen::Ref<const Eigen::VectorXd>& query) {
  std::vector<std::pair<double, Eigen::Index>> order;
  order.reserve(static_cast<std::size_t>(train.size()));
  for (Eigen::Index i = 0; i < train.size(); ++i) {
    order.emplace_back(distance(metric, query, train.feature(i)), i);
  }
  std::sort(order.begin(), order.end());
  return order;
}

std::string vote(const Dataset& train,
                 const std::vector<std::pair<double, Eigen::Index>>& order,
                 int k) {
  struct Tally {
    int votes = 0;
    double dist_sum = 0.0;
  };
  std::map<std::string, Tally> tallies;
  for (int v = 0; v < k; ++v) {
    const auto& [dist, idx] = order[static_cast<std::size_t>(v)];
    auto& t = tallies[train.label(idx)];
    ++t.votes;
    t.dist_sum += dist;
  }
  const std::string* best = nullptr;
  const Tally* best_tally = nullptr;
  for (const auto& [label, tally] : tallies) {
    if (!best || tally.votes > best_tally->votes ||
        (tally.votes == best_tally->votes &&
         tally.dist_sum < best_tally->dist_sum)) {
      best = &label;
      best_tally = &tally;
    }
  }
  return *best;  // map order makes the final tie the smallest label
}

std::string format_pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

nlohmann::json accuracy_json(const std::map<int, KAccuracy>& acc) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [k, a] : acc) {
    out[std::to_string(k)] = {{"mean", a.mean}, {"per_fold", a.per_fold}};
  }
  return out;
}

}  // namespace

std::string knn_predict(const Dataset& train, const MahalanobisMetric& metric,
                        const Eigen::Ref<const Eigen::VectorXd>& query,
                        int k) {
  if (train.size() < 1) {
    throw Error(Errc::empty_training_set, "no training samples");
  }
  if (k < 1 || k > train.size()) {
    std::ostringstream msg;
    msg << "k=" << k << " outside [1, " << train.size() << "]";
    throw Error(Errc::invalid_dimensions, msg.str());
  }
  if (query.size() != train.dim()) {
    throw Error(Errc::dimension_mismatch, "query length does not match dim");
  }
  return vote(train, ranked_neighbors(train, metric, query), k);
}

std::map<int, double> evaluate(const Dataset& train, const Dataset& test,
                               const MahalanobisMetric& metric,
                               const std::vector<int>& ks) {
  if (ks.empty()) {
    throw Error(Errc::invalid_dimensions, "ks must be nonempty");
  }
  if (test.dim() != train.dim()) {
    throw Error(Errc::dimension_mismatch, "train/test dims differ");
  }
  for (const int k : ks) {
    if (k < 1 || k > train.size()) {
      std::ostringstream msg;
      msg << "k=" << k << " outside [1, " << train.size() << "]";
      throw Error(Errc::invalid_dimensions, msg.str());
    }
  }

  std::map<int, int> correct;
  for (const int k : ks) correct[k] = 0;
  for (Eigen::Index q = 0; q < test.size(); ++q) {
    const auto order = ranked_neighbors(train, metric, test.feature(q));
    for (const int k : ks) {
      if (vote(train, order, k) == test.label(q)) ++correct[k];
    }
  }

  std::map<int, double> accuracy;
  for (const int k : ks) {
    accuracy[k] =
        100.0 * static_cast<double>(correct[k]) / static_cast<double>(test.size());
  }
  return accuracy;
}

std::string EvaluationReport::to_table() const {
  std::ostringstream out;
  std::size_t label_width = std::string("Euclidean distance").size();
  out << std::left;
  auto row = [&](const std::string& name,
                 const std::map<int, KAccuracy>& acc) {
    out << name << std::string(label_width + 2 - name.size(), ' ');
    for (const int k : ks) {
      std::string cell = format_pct(acc.at(k).mean);
      out << cell << std::string(cell.size() < 8 ? 8 - cell.size() : 1, ' ');
    }
    out << "\n";
  };
  out << "method" << std::string(label_width + 2 - 6, ' ');
  for (const int k : ks) {
    std::string head = "k=" + std::to_string(k);
    out << head << std::string(head.size() < 8 ? 8 - head.size() : 1, ' ');
  }
  out << "\n";
  row("Euclidean distance", baseline);
  row("Ours", learned);
  return out.str();
}

std::string EvaluationReport::to_json() const {
  nlohmann::json doc;
  doc["folds"] = folds;
  doc["ks"] = ks;
  doc["learned"] = accuracy_json(learned);
  doc["baseline"] = accuracy_json(baseline);
  doc["timing"] = {{"train_time_ms", train_time_ms}};
  doc["config"] = {{"gamma", config.gamma},
                   {"cycles", config.cycles},
                   {"max_sweeps", config.max_sweeps},
                   {"conv_tol", config.conv_tol},
                   {"percentile_low", config.percentile_low},
                   {"percentile_high", config.percentile_high},
                   {"pair_sample_cap", config.pair_sample_cap},
                   {"seed", config.seed},
                   {"rescale_thresholds", config.rescale_thresholds}};
  return doc.dump(2) + "\n";
}

EvaluationReport cross_validate(const Dataset& ds, const SolverConfig& cfg,
                                const std::vector<int>& ks, int folds,
                                std::uint64_t seed) {
  cfg.validate();
  if (ks.empty()) {
    throw Error(Errc::invalid_dimensions, "ks must be nonempty");
  }

  EvaluationReport report;
  report.ks = ks;
  report.folds = folds;
  report.config = cfg;
  for (const int k : ks) {
    report.learned[k] = {};
    report.baseline[k] = {};
  }

  const auto splits = stratified_kfold(ds, folds, seed);
  const MahalanobisMetric identity = MahalanobisMetric::identity(ds.dim());
  for (const auto& split : splits) {
    const Dataset train_ds = ds.subset(split.train);
    const Dataset test_ds = ds.subset(split.test);

    const TrainResult trained = train(train_ds, cfg);
    report.train_time_ms.push_back(trained.log.total_ms);

    const auto learned_acc = evaluate(train_ds, test_ds, trained.metric, ks);
    const auto baseline_acc = evaluate(train_ds, test_ds, identity, ks);
    for (const int k : ks) {
      report.learned[k].per_fold.push_back(learned_acc.at(k));
      report.baseline[k].per_fold.push_back(baseline_acc.at(k));
    }
  }

  for (const int k : ks) {
    auto mean = [](const std::vector<double>& v) {
      return std::accumulate(v.begin(), v.end(), 0.0) /
             static_cast<double>(v.size());
    };
    report.learned[k].mean = mean(report.learned[k].per_fold);
    report.baseline[k].mean = mean(report.baseline[k].per_fold);
  }
  return report;
}

}  // namespace dml

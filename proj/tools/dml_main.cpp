#include <CLI11.hpp>
#include <cctype>
#include <charconv>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dml/classifier.hpp"
#include "dml/constraints.hpp"
#include "dml/dataset.hpp"
#include "dml/metric_io.hpp"
#include "dml/solver.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

struct CommonOptions {
  std::string data_path;
  std::string label_col = "label";
  bool standardize = true;
  dml::SolverConfig solver;
};

void add_solver_flags(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--data", opts.data_path, "Input CSV file")->required();
  cmd->add_option("--label-col", opts.label_col,
                  "Label column name or 0-based index (default: label)");
  cmd->add_flag("--standardize,!--no-standardize", opts.standardize,
                "Standardize features (default on)");
  cmd->add_option("--gamma", opts.solver.gamma, "Slack trade-off, > 0")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--cycles", opts.solver.cycles,
                  "Pair-regeneration cycles (default 5)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--max-sweeps", opts.solver.max_sweeps,
                  "Per-cycle sweep cap (default 1000)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--conv-tol", opts.solver.conv_tol,
                  "Convergence threshold (default 1e-3)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--percentile-low", opts.solver.percentile_low,
                  "U percentile of pair distances (default 5)");
  cmd->add_option("--percentile-high", opts.solver.percentile_high,
                  "L percentile of pair distances (default 95)");
  cmd->add_option("--pair-cap", opts.solver.pair_sample_cap,
                  "Max pairs sampled for thresholds (default 10000)");
  cmd->add_option("--seed", opts.solver.seed, "Random seed");
  cmd->add_flag("--rescale-thresholds", opts.solver.rescale_thresholds,
                "Recompute U/L each cycle under the current metric");
}

dml::Dataset load_input(const CommonOptions& opts) {
  return dml::load_csv(opts.data_path, dml::LabelColumn::parse(opts.label_col));
}

int run_train(const CommonOptions& opts, const std::string& out_path,
              const std::string& log_path, bool dump_pairs) {
  dml::Dataset ds = load_input(opts);
  std::optional<dml::ScalingParams> scaling;
  if (opts.standardize) {
    auto [scaled, params] = dml::standardize(ds);
    ds = std::move(scaled);
    scaling = std::move(params);
  }

  const auto result = dml::train(
      ds, opts.solver,
      [dump_pairs](const dml::CycleStats& stats,
                   const dml::MahalanobisMetric&, const dml::PairSet& pairs) {
        if (dump_pairs) std::cout << dml::dump_pairs(pairs);
        std::cout << "cycle " << stats.cycle << ": |S|=" << stats.n_similar
                  << " |D|=" << stats.n_dissimilar
                  << " sweeps=" << stats.sweeps << " conv=" << stats.conv
                  << " elapsed_ms=" << stats.elapsed_ms << "\n";
      });

  dml::save_metric(result.metric, out_path, scaling);
  if (!log_path.empty()) {
    std::ofstream log(log_path);
    if (!log) {
      throw dml::Error(dml::Errc::io_error, "cannot write " + log_path);
    }
    log << result.log.to_text();
  }
  std::cout << "metric written to " << out_path << "\n";
  return kExitOk;
}

int run_eval(const CommonOptions& opts, const std::vector<int>& ks, int folds,
             const std::string& report_path) {
  dml::Dataset ds = load_input(opts);
  if (opts.standardize) {
    ds = dml::standardize(ds).first;
  }
  const auto report =
      dml::cross_validate(ds, opts.solver, ks, folds, opts.solver.seed);
  std::cout << report.to_table();
  std::cout << "# train_time_ms per fold:";
  for (const double ms : report.train_time_ms) std::cout << " " << ms;
  std::cout << "\n";
  if (!report_path.empty()) {
    std::ofstream out(report_path);
    if (!out) {
      throw dml::Error(dml::Errc::io_error, "cannot write " + report_path);
    }
    out << report.to_json();
  }
  return kExitOk;
}

int run_predict(const std::string& metric_path, const std::string& train_path,
                const std::string& query_path, const std::string& label_col,
                int k) {
  const dml::MetricFile model = dml::load_metric(metric_path);
  dml::Dataset train_ds =
      dml::load_csv(train_path, dml::LabelColumn::parse(label_col));

  std::ifstream query_file(query_path);
  if (!query_file) {
    throw dml::Error(dml::Errc::io_error, "cannot open " + query_path);
  }
  // Query CSV: header row, every column a feature.
  std::vector<Eigen::VectorXd> queries;
  {
    std::string line;
    if (!std::getline(query_file, line)) {
      throw dml::Error(dml::Errc::empty_file, query_path + " has no header");
    }
    std::size_t row = 0;
    while (std::getline(query_file, line)) {
      if (line.empty()) continue;
      ++row;
      std::stringstream ss(line);
      std::string cell;
      std::vector<double> vals;
      while (std::getline(ss, cell, ',')) {
        while (!cell.empty() && std::isspace(static_cast<unsigned char>(cell.back()))) {
          cell.pop_back();
        }
        while (!cell.empty() && std::isspace(static_cast<unsigned char>(cell.front()))) {
          cell.erase(cell.begin());
        }
        double v = 0.0;
        const auto [ptr, ec] =
            std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (ec != std::errc() || ptr != cell.data() + cell.size()) {
          std::ostringstream msg;
          msg << "query row " << row << " holds non-numeric value '" << cell
              << "'";
          throw dml::Error(dml::Errc::non_numeric_feature, msg.str());
        }
        vals.push_back(v);
      }
      Eigen::VectorXd q(static_cast<Eigen::Index>(vals.size()));
      for (std::size_t i = 0; i < vals.size(); ++i) {
        q[static_cast<Eigen::Index>(i)] = vals[i];
      }
      queries.push_back(std::move(q));
    }
  }

  if (train_ds.dim() != model.metric.dim()) {
    throw dml::Error(dml::Errc::dimension_mismatch,
                     "training data dim does not match metric dim");
  }
  if (model.scaling) {
    train_ds = model.scaling->apply(train_ds);
  }
  for (auto& q : queries) {
    if (q.size() != model.metric.dim()) {
      throw dml::Error(dml::Errc::dimension_mismatch,
                       "query dim does not match metric dim");
    }
    if (model.scaling) {
      q = (q - model.scaling->mean).cwiseQuotient(model.scaling->stddev);
    }
  }
  for (const auto& q : queries) {
    std::cout << dml::knn_predict(train_ds, model.metric, q, k) << "\n";
  }
  return kExitOk;
}

int run_synth(const dml::SyntheticSpec& spec, const std::string& out_path) {
  dml::write_csv(dml::generate_synthetic(spec), out_path);
  std::cout << "wrote " << spec.classes * spec.per_class << " rows to "
            << out_path << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mahalanobis metric learning with dynamically regenerated "
               "pairwise constraints"};
  app.require_subcommand(1);

  CommonOptions train_opts;
  std::string train_out = "metric.json";
  std::string train_log;
  bool dump_pairs = false;
  auto* cmd_train = app.add_subcommand("train", "Learn a metric from a CSV");
  add_solver_flags(cmd_train, train_opts);
  cmd_train->add_option("--out", train_out, "Metric file to write");
  cmd_train->add_option("--log", train_log, "Training log file to write");
  cmd_train->add_flag("--dump-pairs", dump_pairs,
                      "Print each cycle's pair sets");

  CommonOptions eval_opts;
  std::vector<int> eval_ks = {1, 2, 3, 4, 5};
  int eval_folds = 3;
  std::string report_path;
  auto* cmd_eval = app.add_subcommand(
      "eval", "Cross-validated k-NN accuracy against the Euclidean baseline");
  add_solver_flags(cmd_eval, eval_opts);
  cmd_eval->add_option("--ks", eval_ks, "k values (default 1 2 3 4 5)");
  cmd_eval->add_option("--folds", eval_folds, "Fold count (default 3)")
      ->check(CLI::Range(2, 1000000));
  cmd_eval->add_option("--report", report_path, "JSON report file to write");

  std::string pred_metric, pred_train, pred_query;
  std::string pred_label_col = "label";
  int pred_k = 1;
  auto* cmd_predict =
      app.add_subcommand("predict", "Label query rows with a saved metric");
  cmd_predict->add_option("--metric", pred_metric, "Metric file")->required();
  cmd_predict->add_option("--train", pred_train, "Training CSV")->required();
  cmd_predict->add_option("--query", pred_query, "Query CSV (features only)")
      ->required();
  cmd_predict->add_option("--label-col", pred_label_col,
                          "Label column of the training CSV");
  cmd_predict->add_option("--k", pred_k, "Vote pool size (default 1)")
      ->check(CLI::PositiveNumber);

  dml::SyntheticSpec synth_spec;
  std::string synth_out = "synthetic.csv";
  auto* cmd_synth =
      app.add_subcommand("synth", "Generate a Gaussian-cluster CSV");
  cmd_synth->add_option("--classes", synth_spec.classes, "Class count")
      ->check(CLI::PositiveNumber);
  cmd_synth->add_option("--per-class", synth_spec.per_class,
                        "Samples per class")
      ->check(CLI::PositiveNumber);
  cmd_synth->add_option("--dim", synth_spec.dim, "Feature dimension")
      ->check(CLI::PositiveNumber);
  cmd_synth->add_option("--informative", synth_spec.informative_dim,
                        "Informative leading dimensions");
  cmd_synth->add_option("--sep", synth_spec.separation,
                        "Class-mean separation scale");
  cmd_synth->add_option("--noise", synth_spec.noise_scale,
                        "Noise scale of the non-informative dimensions");
  cmd_synth->add_option("--seed", synth_spec.seed, "Random seed");
  cmd_synth->add_option("--out", synth_out, "CSV file to write");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (cmd_train->parsed()) {
      return run_train(train_opts, train_out, train_log, dump_pairs);
    }
    if (cmd_eval->parsed()) {
      return run_eval(eval_opts, eval_ks, eval_folds, report_path);
    }
    if (cmd_predict->parsed()) {
      return run_predict(pred_metric, pred_train, pred_query, pred_label_col,
                         pred_k);
    }
    if (cmd_synth->parsed()) {
      return run_synth(synth_spec, synth_out);
    }
  } catch (const dml::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (e.code() == dml::Errc::numerical_breakdown) {
      std::cerr << "hint: a lower --gamma usually restores stable projections\n";
      return kExitNumerical;
    }
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitOk;
}

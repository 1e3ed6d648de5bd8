#include "dml/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "dml/rng.hpp"

namespace dml {
namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      cells.push_back(trim(line.substr(start)));
      break;
    }
    cells.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return cells;
}

double parse_feature(const std::string& cell, std::size_t row,
                     const std::string& column) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    std::ostringstream msg;
    msg << "value '" << cell << "' at row " << row << ", column " << column
        << " is not numeric";
    throw Error(Errc::non_numeric_feature, msg.str());
  }
  return value;
}

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

Dataset::Dataset(Eigen::MatrixXd features, std::vector<std::string> labels)
    : features_(std::move(features)), labels_(std::move(labels)) {
  if (features_.rows() < 1 || features_.cols() < 1) {
    throw Error(Errc::invalid_dimensions,
                "dataset needs at least one sample and one feature");
  }
  if (static_cast<Eigen::Index>(labels_.size()) != features_.rows()) {
    throw Error(Errc::invalid_dimensions, "label count does not match rows");
  }
  if (!features_.allFinite()) {
    throw Error(Errc::invalid_dimensions, "features contain NaN/Inf");
  }
  for (Eigen::Index i = 0; i < features_.rows(); ++i) {
    class_table_[labels_[static_cast<std::size_t>(i)]].push_back(i);
  }
}

Dataset::Dataset(const std::vector<Sample>& samples)
    : Dataset(
          [&samples] {
            if (samples.empty()) {
              throw Error(Errc::invalid_dimensions, "no samples");
            }
            Eigen::MatrixXd m(static_cast<Eigen::Index>(samples.size()),
                              samples.front().features.size());
            for (std::size_t i = 0; i < samples.size(); ++i) {
              if (samples[i].features.size() != m.cols()) {
                throw Error(Errc::dimension_mismatch,
                            "sample feature lengths differ");
              }
              m.row(static_cast<Eigen::Index>(i)) = samples[i].features;
            }
            return m;
          }(),
          [&samples] {
            std::vector<std::string> labels;
            labels.reserve(samples.size());
            for (const auto& s : samples) labels.push_back(s.label);
            return labels;
          }()) {}

Dataset Dataset::subset(std::span<const Eigen::Index> indices) const {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(indices.size()), dim());
  std::vector<std::string> labels;
  labels.reserve(indices.size());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    m.row(static_cast<Eigen::Index>(r)) = features_.row(indices[r]);
    labels.push_back(label(indices[r]));
  }
  return Dataset(std::move(m), std::move(labels));
}

Eigen::MatrixXd ScalingParams::apply(const Eigen::MatrixXd& features) const {
  if (features.cols() != mean.size()) {
    throw Error(Errc::dimension_mismatch,
                "scaling params were fit on a different dimensionality");
  }
  Eigen::MatrixXd out = features.rowwise() - mean.transpose();
  out.array().rowwise() /= stddev.transpose().array();
  return out;
}

Dataset ScalingParams::apply(const Dataset& ds) const {
  return Dataset(apply(ds.features()), ds.labels());
}

LabelColumn LabelColumn::by_name(std::string name) {
  LabelColumn col;
  col.name = std::move(name);
  return col;
}

LabelColumn LabelColumn::by_index(int index) {
  LabelColumn col;
  col.index = index;
  col.use_index = true;
  return col;
}

LabelColumn LabelColumn::parse(const std::string& selector) {
  LabelColumn col;
  col.name = selector;
  if (!selector.empty() &&
      std::all_of(selector.begin(), selector.end(), [](unsigned char c) {
        return std::isdigit(c);
      })) {
    col.index = std::stoi(selector);
    col.use_index = true;  // falls back to the index unless a header matches
  }
  return col;
}

Dataset load_csv(const std::filesystem::path& path, const LabelColumn& label) {
  std::ifstream in(path);
  if (!in) {
    throw Error(Errc::io_error, "cannot open " + path.string());
  }

  std::string line;
  std::vector<std::string> header;
  if (!std::getline(in, line)) {
    throw Error(Errc::empty_file, path.string() + " has no header row");
  }
  header = split_row(line);

  // Resolve the label column: exact header-name match wins over an index.
  std::size_t label_col = header.size();
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (!label.name.empty() && header[c] == label.name) {
      label_col = c;
      break;
    }
  }
  if (label_col == header.size() && label.use_index) {
    if (label.index >= 0 && static_cast<std::size_t>(label.index) < header.size()) {
      label_col = static_cast<std::size_t>(label.index);
    }
  }
  if (label_col == header.size()) {
    throw Error(Errc::missing_label_column,
                "no column '" + label.name + "' in " + path.string());
  }

  std::vector<std::string> labels;
  std::vector<double> values;
  std::size_t data_row = 0;
  while (std::getline(in, line)) {
    if (line.empty() && in.peek() == std::ifstream::traits_type::eof()) break;
    ++data_row;
    const auto cells = split_row(line);
    if (cells.size() != header.size()) {
      std::ostringstream msg;
      msg << "row " << data_row << " has " << cells.size()
          << " columns, header has " << header.size();
      throw Error(Errc::ragged_rows, msg.str());
    }
    labels.push_back(cells[label_col]);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c == label_col) continue;
      values.push_back(parse_feature(cells[c], data_row, header[c]));
    }
  }
  if (data_row == 0) {
    throw Error(Errc::empty_file, path.string() + " has no data rows");
  }
  const std::size_t dim = header.size() - 1;
  if (dim == 0) {
    throw Error(Errc::invalid_dimensions,
                path.string() + " has no feature columns");
  }

  Eigen::MatrixXd features(static_cast<Eigen::Index>(data_row),
                           static_cast<Eigen::Index>(dim));
  for (std::size_t r = 0; r < data_row; ++r) {
    for (std::size_t c = 0; c < dim; ++c) {
      features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          values[r * dim + c];
    }
  }
  return Dataset(std::move(features), std::move(labels));
}

void write_csv(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw Error(Errc::io_error, "cannot write " + path.string());
  }
  out << "label";
  for (Eigen::Index c = 0; c < ds.dim(); ++c) out << ",f" << c + 1;
  out << "\n";
  for (Eigen::Index r = 0; r < ds.size(); ++r) {
    out << ds.label(r);
    for (Eigen::Index c = 0; c < ds.dim(); ++c) {
      out << ',' << format_double(ds.features()(r, c));
    }
    out << "\n";
  }
  if (!out) {
    throw Error(Errc::io_error, "write failed for " + path.string());
  }
}

std::pair<Dataset, ScalingParams> standardize(const Dataset& ds) {
  const auto& x = ds.features();
  const double n = static_cast<double>(x.rows());
  ScalingParams params;
  params.mean = x.colwise().mean().transpose();
  Eigen::MatrixXd centered = x.rowwise() - params.mean.transpose();
  params.stddev =
      (centered.array().square().colwise().sum() / n).sqrt().matrix().transpose();
  for (Eigen::Index c = 0; c < params.stddev.size(); ++c) {
    if (params.stddev[c] == 0.0) params.stddev[c] = 1.0;
  }
  return {params.apply(ds), params};
}

std::vector<FoldSplit> stratified_kfold(const Dataset& ds, int folds,
                                        std::uint64_t seed) {
  if (folds < 2) {
    throw Error(Errc::invalid_dimensions, "folds must be at least 2");
  }
  std::vector<int> assignment(static_cast<std::size_t>(ds.size()), -1);
  Rng rng(seed);
  int class_ordinal = 0;
  for (const auto& [label, members] : ds.class_table()) {
    if (members.size() < static_cast<std::size_t>(folds)) {
      std::ostringstream msg;
      msg << "class '" << label << "' has " << members.size()
          << " members, need at least " << folds;
      throw Error(Errc::class_too_small, msg.str());
    }
    std::vector<Eigen::Index> shuffled = members;
    rng.shuffle(shuffled);
    // Round-robin deal, rotated per class so fold sizes stay balanced.
    for (std::size_t t = 0; t < shuffled.size(); ++t) {
      assignment[static_cast<std::size_t>(shuffled[t])] =
          static_cast<int>((t + static_cast<std::size_t>(class_ordinal)) %
                           static_cast<std::size_t>(folds));
    }
    ++class_ordinal;
  }

  std::vector<FoldSplit> splits(static_cast<std::size_t>(folds));
  for (Eigen::Index i = 0; i < ds.size(); ++i) {
    const int f = assignment[static_cast<std::size_t>(i)];
    for (int g = 0; g < folds; ++g) {
      auto& split = splits[static_cast<std::size_t>(g)];
      (g == f ? split.test : split.train).push_back(i);
    }
  }
  return splits;
}

Dataset generate_synthetic(const SyntheticSpec& spec) {
  if (spec.classes < 1 || spec.per_class < 1 || spec.dim < 1) {
    throw Error(Errc::invalid_dimensions,
                "classes, per_class, and dim must be positive");
  }
  if (spec.informative_dim < 0 || spec.informative_dim > spec.dim) {
    std::ostringstream msg;
    msg << "informative_dim " << spec.informative_dim
        << " must be in [0, dim=" << spec.dim << "]";
    throw Error(Errc::invalid_dimensions, msg.str());
  }
  if (spec.separation < 0.0 || !(spec.noise_scale > 0.0)) {
    throw Error(Errc::invalid_dimensions,
                "separation must be >= 0 and noise_scale > 0");
  }

  Rng rng(spec.seed);
  Eigen::MatrixXd means =
      Eigen::MatrixXd::Zero(spec.classes, spec.dim);
  for (int c = 0; c < spec.classes; ++c) {
    for (int j = 0; j < spec.informative_dim; ++j) {
      means(c, j) = spec.separation * rng.normal();
    }
  }

  const int n = spec.classes * spec.per_class;
  Eigen::MatrixXd features(n, spec.dim);
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(n));

  int label_width = 1;
  for (int v = spec.classes - 1; v >= 10; v /= 10) ++label_width;

  Eigen::Index row = 0;
  for (int c = 0; c < spec.classes; ++c) {
    std::string label = std::to_string(c);
    label.insert(0, static_cast<std::size_t>(label_width) - label.size(), '0');
    label.insert(0, "c");
    for (int s = 0; s < spec.per_class; ++s, ++row) {
      for (int j = 0; j < spec.dim; ++j) {
        const double scale = j < spec.informative_dim ? 1.0 : spec.noise_scale;
        features(row, j) = means(c, j) + scale * rng.normal();
      }
      labels.push_back(label);
    }
  }
  return Dataset(std::move(features), std::move(labels));
}

}  // namespace dml

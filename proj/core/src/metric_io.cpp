#include "dml/metric_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace dml {
namespace {

using nlohmann::json;

json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Eigen::VectorXd vector_from_json(const json& arr, const char* field) {
  if (!arr.is_array()) {
    throw Error(Errc::format_error, std::string(field) + " must be an array");
  }
  Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
  Eigen::Index i = 0;
  for (const auto& x : arr) {
    if (!x.is_number()) {
      throw Error(Errc::format_error,
                  std::string(field) + " holds a non-numeric entry");
    }
    v[i++] = x.get<double>();
  }
  return v;
}

}  // namespace

void save_metric(const MahalanobisMetric& metric,
                 const std::filesystem::path& path,
                 const std::optional<ScalingParams>& scaling) {
  json doc;
  doc["format_version"] = 1;
  doc["dim"] = metric.dim();
  json matrix = json::array();
  for (Eigen::Index i = 0; i < metric.dim(); ++i) {
    for (Eigen::Index j = 0; j < metric.dim(); ++j) {
      matrix.push_back(metric.matrix()(i, j));
    }
  }
  doc["matrix"] = std::move(matrix);
  if (scaling) {
    doc["scaling"] = {{"mean", vector_to_json(scaling->mean)},
                      {"stddev", vector_to_json(scaling->stddev)}};
  }

  std::ofstream out(path);
  if (!out) {
    throw Error(Errc::io_error, "cannot write " + path.string());
  }
  out << doc.dump(2) << "\n";
  if (!out) {
    throw Error(Errc::io_error, "write failed for " + path.string());
  }
}

MetricFile load_metric(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(Errc::io_error, "cannot open " + path.string());
  }
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw Error(Errc::format_error,
                path.string() + " is not valid JSON: " + e.what());
  }

  if (!doc.is_object() || doc.value("format_version", 0) != 1) {
    throw Error(Errc::format_error, "unsupported or missing format_version");
  }
  if (!doc.contains("dim") || !doc["dim"].is_number_integer() ||
      doc["dim"].get<Eigen::Index>() < 1) {
    throw Error(Errc::format_error, "dim must be a positive integer");
  }
  const Eigen::Index dim = doc["dim"].get<Eigen::Index>();
  if (!doc.contains("matrix")) {
    throw Error(Errc::format_error, "matrix field missing");
  }
  const Eigen::VectorXd flat = vector_from_json(doc["matrix"], "matrix");
  if (flat.size() != dim * dim) {
    std::ostringstream msg;
    msg << "matrix holds " << flat.size() << " values, expected " << dim * dim;
    throw Error(Errc::format_error, msg.str());
  }
  if (!flat.allFinite()) {
    throw Error(Errc::format_error, "matrix holds NaN/Inf values");
  }

  Eigen::MatrixXd a(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      a(i, j) = flat[i * dim + j];
    }
  }

  MetricFile result{[&a] {
                      try {
                        return MahalanobisMetric(std::move(a));
                      } catch (const Error& e) {
                        throw Error(Errc::format_error, e.what());
                      }
                    }(),
                    std::nullopt};
  if (!is_psd(result.metric)) {
    throw Error(Errc::format_error, "matrix is not positive semidefinite");
  }

  if (doc.contains("scaling")) {
    const auto& s = doc["scaling"];
    ScalingParams params;
    params.mean = vector_from_json(s.value("mean", json::array()), "scaling.mean");
    params.stddev =
        vector_from_json(s.value("stddev", json::array()), "scaling.stddev");
    if (params.mean.size() != dim || params.stddev.size() != dim) {
      throw Error(Errc::format_error, "scaling vectors must have length dim");
    }
    result.scaling = std::move(params);
  }
  return result;
}

}  // namespace dml

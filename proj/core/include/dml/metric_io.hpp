#pragma once

#include <filesystem>
#include <optional>

#include "dml/dataset.hpp"
#include "dml/metric.hpp"

namespace dml {

/// On-disk metric document: the matrix plus the feature scaling it was
/// trained under, when standardization was applied.
struct MetricFile {
  MahalanobisMetric metric;
  std::optional<ScalingParams> scaling;
};

/// Writes a JSON document {"format_version":1,"dim":d,"matrix":[...]} with
/// the matrix row-major and every value printed with round-trip precision.
/// An optional "scaling" object carries {"mean":[...],"stddev":[...]}.
void save_metric(const MahalanobisMetric& metric,
                 const std::filesystem::path& path,
                 const std::optional<ScalingParams>& scaling = std::nullopt);

/// Parses and validates the format: version 1, dim >= 1, exactly dim*dim
/// finite matrix values, symmetric, positive semidefinite. Violations throw
/// FormatError; unreadable files throw IoError. load(save(m)) reproduces the
/// matrix bit-exactly.
MetricFile load_metric(const std::filesystem::path& path);

}  // namespace dml

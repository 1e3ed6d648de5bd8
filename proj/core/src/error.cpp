#include "dml/error.hpp"

namespace dml {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::ragged_rows: return "RaggedRows";
    case Errc::non_numeric_feature: return "NonNumericFeature";
    case Errc::missing_label_column: return "MissingLabelColumn";
    case Errc::empty_file: return "EmptyFile";
    case Errc::class_too_small: return "ClassTooSmall";
    case Errc::invalid_dimensions: return "InvalidDimensions";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::singular_prior: return "SingularPrior";
    case Errc::psd_violation: return "PsdViolation";
    case Errc::io_error: return "IoError";
    case Errc::format_error: return "FormatError";
    case Errc::single_class_dataset: return "SingleClassDataset";
    case Errc::degenerate_dataset: return "DegenerateDataset";
    case Errc::numerical_breakdown: return "NumericalBreakdown";
    case Errc::empty_training_set: return "EmptyTrainingSet";
  }
  return "UnknownError";
}

}  // namespace dml

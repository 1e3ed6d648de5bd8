#pragma once

#include <stdexcept>
#include <string>

namespace dml {

/// Every failure the library reports, as a stable machine-checkable code.
enum class Errc {
  ragged_rows,
  non_numeric_feature,
  missing_label_column,
  empty_file,
  class_too_small,
  invalid_dimensions,
  dimension_mismatch,
  singular_prior,
  psd_violation,
  io_error,
  format_error,
  single_class_dataset,
  degenerate_dataset,
  numerical_breakdown,
  empty_training_set,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace dml

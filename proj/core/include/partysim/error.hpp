#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace partysim {

/// Failure categories. The CLI maps `usage` to exit code 1 and every other
/// category to exit code 2.
enum class ErrorCode {
  usage,
  io,
  schema,
  uniqueness,
  empty_corpus,
  labeling,
  format,
  out_of_vocabulary,
  shape,
  insufficient_data,
  data,
  undefined_cosine,
  degenerate_party,
  no_overlap,
  normalization,
  coverage,
  value,
  too_few_groups,
  alignment,
  matrix_role,
  construction,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace partysim

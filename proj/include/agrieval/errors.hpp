#pragma once

#include <stdexcept>
#include <string>

namespace agrieval {

// Broad failure categories; the CLI maps each one onto an exit code.
enum class ErrorCategory {
  kValidation,  // malformed or inconsistent data
  kIo,          // filesystem / codec failures
  kParameter,   // caller supplied an out-of-range parameter
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

#define AGRIEVAL_DEFINE_ERROR(Name, Category)                          \
  class Name : public Error {                                          \
   public:                                                             \
    explicit Name(const std::string& what) : Error(Category, what) {} \
  }

AGRIEVAL_DEFINE_ERROR(DegenerateGeometry, ErrorCategory::kValidation);
AGRIEVAL_DEFINE_ERROR(ShapeMismatch, ErrorCategory::kValidation);
AGRIEVAL_DEFINE_ERROR(CorruptMask, ErrorCategory::kValidation);
AGRIEVAL_DEFINE_ERROR(FormatError, ErrorCategory::kValidation);
AGRIEVAL_DEFINE_ERROR(ValidationError, ErrorCategory::kValidation);
AGRIEVAL_DEFINE_ERROR(EmptyDataset, ErrorCategory::kValidation);
AGRIEVAL_DEFINE_ERROR(EmptyGroundTruth, ErrorCategory::kValidation);
AGRIEVAL_DEFINE_ERROR(MissingMask, ErrorCategory::kValidation);
AGRIEVAL_DEFINE_ERROR(IoError, ErrorCategory::kIo);
AGRIEVAL_DEFINE_ERROR(InvalidParameter, ErrorCategory::kParameter);

#undef AGRIEVAL_DEFINE_ERROR

}  // namespace agrieval

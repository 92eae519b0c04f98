#pragma once

#include <stdexcept>
#include <string>

namespace engage {

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dataset sizing / contamination / split infeasibility.
struct DatasetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Misaligned prediction/gold lists, bad adjudication coverage.
struct AlignmentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Backend transport failures after retry exhaustion, unknown job ids.
struct BackendError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A pipeline stage invoked before its inputs exist.
struct DependencyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace engage

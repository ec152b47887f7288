#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace vbhmm {

// One observation per row: N rows of dimension D.
using ObservationSequence = Eigen::MatrixXd;

// Malformed input data (file contents, unsupported schema, ragged rows).
struct DataError : std::runtime_error {
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure that should not occur for valid inputs (e.g. a scale
// matrix that stays indefinite after jitter escalation).
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace vbhmm

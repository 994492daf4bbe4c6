#pragma once

#include <stdexcept>
#include <string>

namespace zmpl {

// Parameters outside their admissible region.
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Sample carries no information for the requested estimator (e.g. all
// observations are zeros and ones).
class DegenerateSample : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Optimizer, quadrature or bootstrap could not produce a usable result.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input data (dataset files, CSV reports).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace zmpl

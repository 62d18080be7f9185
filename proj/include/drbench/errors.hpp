#pragma once

#include <stdexcept>
#include <string>

namespace drbench {

// Dimension mismatch between operands.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A spec parameter is out of range (k > d, missing class, ...).
class InvalidSpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An iterative numerical procedure failed (non-convergence, NaN input).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A metric is undefined for the given inputs (e.g. ARR with zero baseline).
class MetricError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace drbench

#pragma once

#include <stdexcept>
#include <string>

namespace dephasim {

// Invalid or incomplete user configuration. CLI exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A documented operation precondition does not hold. CLI exit code 2.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Quadrature, root finding, sampling or ODE step control failed. CLI exit code 3.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Run record written by an incompatible schema version or malformed on disk.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Power-law fit requested on a window that cannot support it.
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dephasim

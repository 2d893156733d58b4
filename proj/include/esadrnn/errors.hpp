#pragma once

#include <stdexcept>
#include <string>

namespace esadrnn {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Operand shapes do not conform, or an operation was applied to the
// wrong rank (also covers backward() on a non-scalar root).
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Bad input data: malformed CSV rows, nonpositive loads, gaps that are
// too long to repair, series too short for the requested operation.
class DataError : public Error {
 public:
  using Error::Error;
};

// Malformed configuration (unknown key, unparseable value, invalid
// combination). Mapped to the usage exit code by the CLI.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Persistence problems with checkpoint files.
class CheckpointError : public DataError {
 public:
  using DataError::DataError;
};

class CheckpointVersionError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};

class CheckpointTruncatedError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};

class CheckpointShapeError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};

// Numeric failure during optimization (NaN or infinite batch loss).
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace esadrnn

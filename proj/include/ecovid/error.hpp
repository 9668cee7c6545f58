#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ecovid {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Problems with user-supplied inputs (files, configs, parameters).
/// The CLI maps these to exit code 2; everything else maps to 1.
class InputError : public Error {
 public:
  using Error::Error;
};

class IoError : public InputError {
 public:
  using InputError::InputError;
};

/// A malformed record. `row()` is 1-based over data rows (header excluded);
/// 0 means the error is not tied to a particular row.
class SchemaError : public InputError {
 public:
  SchemaError(std::size_t row, const std::string& what)
      : InputError(row == 0 ? what : "row " + std::to_string(row) + ": " + what), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class DateOrderError : public InputError {
 public:
  using InputError::InputError;
};

class EmptyCorpusError : public InputError {
 public:
  using InputError::InputError;
};

class TooSmallError : public InputError {
 public:
  using InputError::InputError;
};

class FormatError : public InputError {
 public:
  using InputError::InputError;
};

class EmptyVideoError : public InputError {
 public:
  using InputError::InputError;
};

class RangeError : public InputError {
 public:
  using InputError::InputError;
};

/// Invalid hyperparameter or precondition on a call argument.
class ParameterError : public InputError {
 public:
  using InputError::InputError;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class EmptyError : public Error {
 public:
  using Error::Error;
};

class SingularError : public Error {
 public:
  using Error::Error;
};

class KernelError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  DivergenceError(std::size_t iteration, const std::string& what)
      : Error("diverged at iteration " + std::to_string(iteration) + ": " + what),
        iteration_(iteration) {}
  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

}  // namespace ecovid

#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace netctl {

/// Invalid argument ranges or inconsistent inputs. Maps to CLI exit code 1.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ParseError : public ParameterError {
 public:
  ParseError(const std::string& what, std::size_t line)
      : ParameterError("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class DomainError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

class DimensionError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

class InsufficientDataError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

/// Failures of the numerics themselves. Maps to CLI exit code 2.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericOverflowError : public NumericError {
 public:
  using NumericError::NumericError;
};

class ValidationError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Raised when the Gramian is singular; carries an orthonormal basis of the
/// directions that cannot be reached.
class UncontrollableError : public NumericError {
 public:
  UncontrollableError(const std::string& what, Eigen::MatrixXd null_space)
      : NumericError(what), null_space_(std::move(null_space)) {}
  const Eigen::MatrixXd& null_space() const { return null_space_; }

 private:
  Eigen::MatrixXd null_space_;
};

class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace netctl

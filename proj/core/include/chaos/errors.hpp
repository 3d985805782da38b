#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace chaos {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad or missing input data (files, rows, market series). CLI exit code 1.
class DataError : public Error {
 public:
  using Error::Error;
};

// Arguments or configuration violating a documented precondition. CLI exit code 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class FileNotFound : public DataError {
 public:
  explicit FileNotFound(std::string path);
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// A malformed row. `line` is the 1-based data row (header excluded) for
/// quote CSV files and the 1-based physical line for statements.
class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class FormatError : public DataError {
 public:
  FormatError(std::size_t line, const std::string& what);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class NonMonotonicTimestamps : public DataError {
 public:
  explicit NonMonotonicTimestamps(std::size_t row);
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class MissingTimeframeData : public DataError {
 public:
  using DataError::DataError;
};

class EmptySeries : public ValidationError {
 public:
  EmptySeries() : ValidationError("empty series") {}
};

class InvalidParameter : public ValidationError {
 public:
  InvalidParameter(std::string name, const std::string& why);
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

class SeriesTooShort : public ValidationError {
 public:
  SeriesTooShort(std::size_t needed, std::size_t got);
  std::size_t needed() const noexcept { return needed_; }
  std::size_t got() const noexcept { return got_; }

 private:
  std::size_t needed_;
  std::size_t got_;
};

class InsufficientData : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class DegenerateDomain : public ValidationError {
 public:
  DegenerateDomain() : ValidationError("degenerate domain: all y values are equal") {}
};

class NonNormalizable : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class GridMismatch : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class TooFewSamples : public ValidationError {
 public:
  TooFewSamples(std::size_t needed, std::size_t got);
};

class LengthMismatch : public ValidationError {
 public:
  LengthMismatch(std::size_t a, std::size_t b);
};

class EmptyHistory : public ValidationError {
 public:
  EmptyHistory() : ValidationError("empty signal history") {}
};

class UnknownSymbol : public ValidationError {
 public:
  explicit UnknownSymbol(const std::string& symbol);
};

class Overflow : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class EmptyRecords : public ValidationError {
 public:
  EmptyRecords() : ValidationError("no effectiveness records") {}
};

class InfeasibleFloor : public ValidationError {
 public:
  InfeasibleFloor(double floor, std::size_t count);
};

class MissingConversionRate : public ValidationError {
 public:
  explicit MissingConversionRate(const std::string& symbol);
};

class InsufficientMargin : public ValidationError {
 public:
  InsufficientMargin(double required, double available);
};

class NoTrades : public ValidationError {
 public:
  NoTrades() : ValidationError("statement contains no trades") {}
};

class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

}  // namespace chaos

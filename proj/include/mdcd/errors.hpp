#pragma once

#include <stdexcept>
#include <string>

namespace mdcd {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MissingFile : public Error {
 public:
  explicit MissingFile(const std::string& path) : Error("missing file: " + path) {}
};

/// Raised for non-numeric cells or ragged rows; `row` is the 1-based data row.
class MalformedRow : public Error {
 public:
  MalformedRow(std::size_t row, const std::string& what)
      : Error("malformed row " + std::to_string(row) + ": " + what), row_(row) {}
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

class EmptyDomain : public Error {
 public:
  explicit EmptyDomain(long long label)
      : Error("domain label " + std::to_string(label) + " has no rows") {}
};

class ZeroVariance : public Error {
 public:
  explicit ZeroVariance(const std::string& column)
      : Error("column '" + column + "' is constant (zero pooled variance)"), column_(column) {}
  const std::string& column() const { return column_; }

 private:
  std::string column_;
};

class UnknownColumn : public Error {
 public:
  explicit UnknownColumn(const std::string& name) : Error("unknown column: " + name) {}
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

class DegenerateSample : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class DegenerateDensity : public Error {
 public:
  using Error::Error;
};

class DegeneratePoints : public Error {
 public:
  using Error::Error;
};

class SizeMismatch : public Error {
 public:
  using Error::Error;
};

class TooFewSamples : public Error {
 public:
  using Error::Error;
};

class TooManyCandidates : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

/// CLI / configuration validation failure; maps to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace mdcd

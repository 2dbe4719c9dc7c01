#pragma once

#include <stdexcept>
#include <string>

namespace carath {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes or state dimensions do not fit together.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Operation not available for this descriptor (e.g. no Jacobian rule, wrong class).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Interval or window outside the data that was computed.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Lookup of a seminorm/modulus index that is not present.
class IndexError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure while integrating; carries the time where it happened.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double time) : Error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

/// Requested time lies beyond the maximal interval of existence.
class MaximalIntervalError : public Error {
 public:
  MaximalIntervalError(const std::string& what, double exit_time) : Error(what), exit_time_(exit_time) {}
  double exit_time() const { return exit_time_; }

 private:
  double exit_time_;
};

/// Bad experiment option given outside a config file (command line).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input; line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, int column = 0)
      : Error("line " + std::to_string(line) + (column > 0 ? ":" + std::to_string(column) : "") + ": " + what),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace carath

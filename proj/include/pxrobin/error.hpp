#pragma once

#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>

namespace pxrobin {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class MeshError : public Error {
 public:
  using Error::Error;
};

/// Syntax error in a field expression; column is 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t column)
      : Error(what + " at column " + std::to_string(column)), column_(column) {}
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t column_;
};

class UnknownIdentifier : public Error {
 public:
  explicit UnknownIdentifier(std::string name)
      : Error("unknown identifier '" + name + "'"), name_(std::move(name)) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

/// Field evaluation left its domain (log/sqrt of a negative, division by zero, ...).
class DomainError : public Error {
 public:
  DomainError(const std::string& what, double x, double y)
      : Error(format(what, x, y)), x_(x), y_(y) {}
  double x() const noexcept { return x_; }
  double y() const noexcept { return y_; }

 private:
  static std::string format(const std::string& what, double x, double y) {
    std::ostringstream os;
    os.precision(17);
    os << what << " at (" << x << ", " << y << ")";
    return os.str();
  }
  double x_, y_;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

/// The mesh is too coarse to realize a construction.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// The problem data is outside the hypothesis regime an algorithm needs.
class RegimeError : public Error {
 public:
  using Error::Error;
};

/// Mountain-pass geometry broke down (path maximum at an endpoint, ...).
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Problem data violates a standing hypothesis (see validate_spec).
class ValidationError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace pxrobin

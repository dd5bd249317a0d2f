#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace semflow {

/// Base class for all errors raised by the solver library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative procedure (root finding, Krylov breakdown) failed.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Invalid element geometry, e.g. a nonpositive Jacobian.
class GeometryError : public Error {
 public:
  GeometryError(const std::string& what, long element)
      : Error(what), element_(element) {}
  long element() const noexcept { return element_; }

 private:
  long element_;
};

/// Mesh topology inconsistent with a conforming hexahedral mesh.
class TopologyError : public Error {
 public:
  using Error::Error;
};

/// Malformed binary or text input. `offset` is the byte position where
/// parsing stopped.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Case-file or parameter validation failure.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values detected in a solution field.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace semflow

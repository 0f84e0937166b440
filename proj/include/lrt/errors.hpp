#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lrt {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidGeometryError : public Error {
 public:
  using Error::Error;
};

/// An element whose corner Jacobian vanishes, is inverted or is not convex.
class DegenerateElementError : public Error {
 public:
  DegenerateElementError(std::size_t element, const std::string& what)
      : Error("element " + std::to_string(element) + ": " + what), element_(element) {}
  std::size_t element() const noexcept { return element_; }

 private:
  std::size_t element_;
};

class NoIntersectionError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatchError : public Error {
 public:
  using Error::Error;
};

/// Raised when an analytic field is evaluated outside its domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

class MeshMismatchError : public Error {
 public:
  using Error::Error;
};

/// The reconstruction system does not determine the strain field uniquely.
class SingularSystemError : public Error {
 public:
  SingularSystemError(std::size_t deficiency, const std::string& what)
      : Error(what + " (estimated rank deficiency " + std::to_string(deficiency) + ")"),
        deficiency_(deficiency) {}
  std::size_t deficiency() const noexcept { return deficiency_; }

 private:
  std::size_t deficiency_;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace lrt

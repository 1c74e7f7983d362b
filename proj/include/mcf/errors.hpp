#pragma once

#include <stdexcept>
#include <string>

namespace mcf {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A query point lies outside the region where a patch can answer it.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A stencil was requested on a boundary row or column.
class IndexError : public Error {
 public:
  using Error::Error;
};

/// Surface samples are not monotone where a root is sought.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Invalid construction parameters, or a regrid that cannot be carried out.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A parameter regime this library deliberately does not handle.
class UnsupportedCase : public Error {
 public:
  using Error::Error;
};

class IntegrationError : public Error {
 public:
  using Error::Error;
};

/// The radius reached the singular floor; the flow cannot be continued.
class SingularityReached : public Error {
 public:
  using Error::Error;
};

/// NaN or Inf appeared in a patch after a step.
class NumericalBlowup : public Error {
 public:
  using Error::Error;
};

class FitRejected : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(int line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// The two patches no longer overlap as required; the caller is expected to regrid.
class OverlapViolation : public Error {
 public:
  enum class Kind {
    CircleBelowTip,        // z_min is below the lowest point of the Cartesian patch
    CircleOutsideSquare,   // the z_min level is not reached inside the square
    CircleTooSmall,
    CircleTooLarge,
    PerimeterBelowPatch,   // a perimeter radius is inside the cylinder's first sampled row
    PerimeterBeyondPatch,  // a perimeter radius is never reached by the cylinder
    PerimeterTooLow,       // perimeter maps too close to z_min
  };

  OverlapViolation(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

}  // namespace mcf

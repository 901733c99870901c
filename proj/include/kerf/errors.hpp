#pragma once

#include <stdexcept>
#include <string>

namespace kerf {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Degenerate or malformed block (zero length, zero radius, off-plane center).
class InvalidGeometryError : public Error {
 public:
  using Error::Error;
};

// Consecutive blocks do not share an endpoint.
class PathContinuityError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of a model.
class DomainError : public Error {
 public:
  using Error::Error;
};

// R-form arc whose radius cannot span the chord, or inconsistent IJK.
class ArcError : public Error {
 public:
  using Error::Error;
};

class EmptyPathError : public Error {
 public:
  using Error::Error;
};

// Machine configuration problem. `field()` names the offending JSON path.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace kerf

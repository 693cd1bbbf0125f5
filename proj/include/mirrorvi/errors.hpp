#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace mirrorvi {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Vector or matrix dimensions disagree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A point lies outside the domain where a function is defined
/// (e.g. entropy evaluated at a zero coordinate).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Invalid argument: non-finite input, non-positive constant, empty trace.
class InputError : public Error {
 public:
  using Error::Error;
};

/// The field returned a non-finite value. Carries the query point.
class OracleFault : public Error {
 public:
  OracleFault(const std::string& what, Eigen::VectorXd point)
      : Error(what), point_(std::move(point)) {}

  const Eigen::VectorXd& point() const { return point_; }

 private:
  Eigen::VectorXd point_;
};

/// Automatic L0 estimation found no pair with distinct field values.
class EstimationFailed : public Error {
 public:
  using Error::Error;
};

/// The requested operation has no exact implementation for this set.
class UnsupportedSet : public Error {
 public:
  using Error::Error;
};

/// Malformed experiment configuration or trace file.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace mirrorvi

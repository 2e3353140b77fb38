#pragma once

#include <stdexcept>
#include <string>

namespace lhs {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument: unknown id, out-of-range parameter.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Mathematical domain violation (e.g. average over a null set).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed local structure (missing or empty level, broken nesting).
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// Operation called outside its stated precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Scale too coarse or too fine for the requested construction.
class ScaleError : public Error {
 public:
  using Error::Error;
};

/// Iterative construction could not proceed.
class ConstructionError : public Error {
 public:
  using Error::Error;
};

/// Ball/cube containments required by a check do not hold.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Bad CLI input or experiment configuration.
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace lhs

#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace hisparse {

/// Base class for every exception raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Adjacency data that does not describe a rooted tree with valid budgets.
class StructureError : public Error {
 public:
  using Error::Error;
};

/// A hierarchical support that violates its budgets or the chain conditions.
class SupportError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Parameter outside its admissible domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Input that makes an operation undefined (zero column, zero measurement vector).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// An enumeration would exceed its configured cap.
class CapExceededError : public Error {
 public:
  using Error::Error;
};

/// Malformed serialized data or configuration. `field()` names the offending key when known.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& message, std::string field = {})
      : Error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}
  [[nodiscard]] const std::string& field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace hisparse

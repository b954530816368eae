#pragma once

#include <stdexcept>
#include <string>

namespace spagg {

// Base of every error the library throws. The CLI maps the three branches
// below onto exit codes 1 (input), 2 (parameter) and 3 (internal invariant).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad or unusable input data.
class InputError : public Error {
 public:
  using Error::Error;
};

class FormatError : public InputError {
 public:
  using InputError::InputError;
};

class ParseError : public InputError {
 public:
  using InputError::InputError;
};

class EmptyFieldError : public InputError {
 public:
  using InputError::InputError;
};

// Geometric degeneracy (e.g. all points collinear for a triangulation).
class DegeneracyError : public InputError {
 public:
  using InputError::InputError;
};

class DuplicateError : public InputError {
 public:
  using InputError::InputError;
};

// Open or self-intersecting curve handed to an operator that needs a closed
// simple one.
class IllFormedError : public InputError {
 public:
  using InputError::InputError;
};

// Caller supplied an invalid argument or parameter.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Unknown combiner, missing description type, unknown metric name.
class ConfigError : public ArgumentError {
 public:
  using ArgumentError::ArgumentError;
};

// A location that lies in no node of the graph.
class ContainmentError : public ArgumentError {
 public:
  using ArgumentError::ArgumentError;
};

// A user procedure broke its contract, or an internal invariant failed.
class ContractError : public Error {
 public:
  using Error::Error;
};

}  // namespace spagg

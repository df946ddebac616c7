#pragma once

#include <stdexcept>
#include <string>

namespace qms {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: wrong shapes, negative weights, out-of-range indices.
class StructureError : public Error {
 public:
  using Error::Error;
};

/// A parameter lies outside the domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure could not reach its target (quadrature, chains, LP).
class ComputationError : public Error {
 public:
  using Error::Error;
};

/// Unreadable or truncated input file.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace qms

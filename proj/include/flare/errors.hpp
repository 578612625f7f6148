#pragma once

#include <stdexcept>
#include <string>

namespace flare {

/// Base for every error the library raises on bad input or I/O.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent data (ingest, oracle, weight and index files).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// The answerer could not be reached or returned an unusable response.
/// Never conflated with a wrong answer.
class TransportError : public Error {
 public:
  using Error::Error;
};

/// Bad command-line usage or an invalid argument value.
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace flare

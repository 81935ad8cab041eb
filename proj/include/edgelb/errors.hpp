#pragma once

#include <stdexcept>
#include <string>

namespace edgelb {

// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input text is not well-formed (bad JSON, wrong field types, bad CSV line).
class ParseError : public Error {
 public:
  using Error::Error;
};

// Input is well-formed but violates a data-model invariant. The message
// always names the offending location.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class EmptyTrace : public Error {
 public:
  using Error::Error;
};

class EmptySamples : public Error {
 public:
  using Error::Error;
};

class EmptyResult : public Error {
 public:
  using Error::Error;
};

}  // namespace edgelb

#pragma once

#include <stdexcept>
#include <string>

namespace prosrs {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller bug: wrong dimension, point outside a domain, bad precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Invalid run or experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

/// An objective evaluation failed or produced a non-finite value.
class EvaluatorError : public Error {
 public:
  using Error::Error;
};

/// A ratio or normalization with a zero denominator.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

}  // namespace prosrs

#pragma once

#include <stdexcept>
#include <string>

namespace folia {

/// Caller violated an operation's contract (shape mismatch, mixed fields, ...).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input is well-formed but degenerate, e.g. a zero lambda tensor.
class DegenerateInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rejection sampler ran out of attempts.
class SamplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A command or certificate was asked for outside its domain (e.g. n <= 3).
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A runtime self-check failed. This always indicates a bug or a broken instance.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Malformed serialized input.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace folia

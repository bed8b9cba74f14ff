#pragma once

#include <stdexcept>
#include <string>

namespace gpc {

/// A numerical procedure failed to converge or produced inconsistent output.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The input violates a hypothesis of the collapse analysis (e.g. no negative well).
class HypothesisError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed configuration; the message names the offending field or line.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gpc

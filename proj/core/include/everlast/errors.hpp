#pragma once

#include <stdexcept>
#include <string>

namespace everlast {

/// Invalid parameters, mismatched domains, malformed input files.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Calling an operation in a state that forbids it (e.g. answering on a
/// halted round).
class UsageError : public std::logic_error {
 public:
  explicit UsageError(const std::string& what) : std::logic_error(what) {}
};

/// A sampler gave up (rejection loop cap reached).
class SamplingError : public std::runtime_error {
 public:
  explicit SamplingError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace everlast

#pragma once

#include <stdexcept>
#include <string>

namespace sswm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or incomplete scenario configuration.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& key, int line, const std::string& what)
      : Error(format(key, line, what)), key_(key), line_(line) {}

  const std::string& key() const noexcept { return key_; }
  int line() const noexcept { return line_; }

 private:
  static std::string format(const std::string& key, int line,
                            const std::string& what) {
    std::string msg = "config error";
    if (line > 0) msg += " (line " + std::to_string(line) + ")";
    if (!key.empty()) msg += " [" + key + "]";
    return msg + ": " + what;
  }

  std::string key_;
  int line_ = 0;
};

/// Inputs violate a documented precondition or invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Evaluation hit (or came within tolerance of) a pole.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// Quantity is undefined for the given inputs (e.g. bandwidth at OD = 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A trace fit did not find enough extrema to be meaningful.
class InsufficientExtremaError : public Error {
 public:
  using Error::Error;
};

}  // namespace sswm

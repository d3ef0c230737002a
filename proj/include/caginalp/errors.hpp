#pragma once

#include <stdexcept>
#include <string>

namespace caginalp {

/// Input outside the mathematical domain of an operation (nonpositive
/// parameter, absolute zero crossed, incompatible boundary data).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A computation that should have worked did not converge or produced
/// non-finite values.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent configuration. `line` is 0 when the problem is
/// not tied to a particular line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& msg, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace caginalp

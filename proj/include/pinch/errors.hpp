#pragma once

#include <stdexcept>
#include <string>

namespace pinch {

/// Input outside the mathematical domain of an operation (e.g. non-positive hand length).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Caller broke an operation precondition (wrong configuration length, mixed models).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Geometry that cannot be processed, such as a zero-length distal segment.
class DegenerateGeometry : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or unresolvable configuration (unknown range width, bad CLI value, bad config file).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File system failure; the message always carries the offending path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pinch

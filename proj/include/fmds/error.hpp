#pragma once

#include <stdexcept>
#include <string>

namespace fmds {

/// Raised when an iteration produces NaN, diverges, or a solver cannot
/// reach a usable answer. Bad arguments raise std::invalid_argument.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File-system and parse failures in the file-format layer.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) throw std::invalid_argument(message);
}

}  // namespace detail
}  // namespace fmds

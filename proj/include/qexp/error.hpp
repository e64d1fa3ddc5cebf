#pragma once

#include <stdexcept>
#include <string>

namespace qexp {

// Bad input: dimensions, counts, weights, malformed text. CLI exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical routine failed (eigensolver, singular system, budget). CLI exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

}  // namespace detail
}  // namespace qexp

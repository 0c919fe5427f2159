#pragma once

#include <stdexcept>
#include <string>

namespace hha {

/// Precondition or parameter violation (bad radius, exponent out of range, ...).
struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Shapes or dimensions that do not agree.
struct DimensionError : DomainError {
  using DomainError::DomainError;
};

/// A computation produced a non-finite value or could not converge.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

}  // namespace detail
}  // namespace hha

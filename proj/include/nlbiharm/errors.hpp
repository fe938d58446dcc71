#pragma once

#include <stdexcept>
#include <string>

namespace nlbiharm {

/// Non-finite or otherwise unusable numeric input.
struct InvalidDataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Non-finite accumulation while building a linear system.
struct AssemblyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Cholesky factorization hit a non-positive pivot.
struct NotPositiveDefiniteError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Filesystem write failure.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace nlbiharm

#pragma once

#include <stdexcept>
#include <string>

namespace decgan {

// Shape mismatch between operands.
struct DimensionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Value outside an operation's domain (log of non-positive, NaN input, ...).
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Caller misuse of an API (non-scalar gradient root, bad epsilon, ...).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Data violates a model invariant (asymmetric adjacency, bad label, ...).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed file content.
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Training produced a non-finite quantity.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace decgan

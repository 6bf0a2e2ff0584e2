#pragma once

#include <stdexcept>
#include <string>

namespace robloss {

/// Base class for all robloss errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Non-finite or otherwise malformed numeric input.
struct InvalidInputError : Error {
  using Error::Error;
};

/// A loss was asked to reduce over zero samples.
struct EmptyBatchError : Error {
  using Error::Error;
};

/// C = 1 and the operation divides by C - 1.
struct DegenerateDimensionError : Error {
  using Error::Error;
};

/// Two containers that must agree in shape do not.
struct SizeMismatchError : Error {
  using Error::Error;
};

/// A loss normalizer is zero while its term has contributions.
struct DegenerateNormalizerError : Error {
  using Error::Error;
};

/// Bad experiment or CLI configuration.
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace robloss

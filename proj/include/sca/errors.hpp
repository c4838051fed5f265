#pragma once

#include <stdexcept>
#include <string>

namespace sca {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid numeric parameter (sigma <= 0, bad threshold ordering, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Raster or sequence sizes that do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Geometric degeneracy: zero-length chord, coincident angle arms.
class DegenerateGeometryError : public Error {
 public:
  using Error::Error;
};

/// Operation applied to an input of the wrong kind.
class InputError : public Error {
 public:
  using Error::Error;
};

/// File could not be read, parsed or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace sca

#pragma once

#include <stdexcept>
#include <string>

namespace airboard {

// Base for every error the library raises. Callers that only need to know
// "something in airboard failed" catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A rectangle or window does not fit inside the image it addresses.
class BoundsError : public Error {
 public:
  using Error::Error;
};

// Two images that must agree in size do not.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Operation not valid in the object's current state (e.g. accumulating into a
// frozen background model).
class StateError : public Error {
 public:
  using Error::Error;
};

// Malformed input bytes: PPM streams, JSON documents, cascade files.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Configuration value outside its documented range.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Filesystem or subprocess failure.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace airboard

#pragma once

#include <stdexcept>
#include <string>

namespace shapeopt {

/// Base class for all library errors. The CLI maps each subclass to a
/// distinct nonzero exit code.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TopologyError : Error {
  using Error::Error;
};
struct SizeError : Error {
  using Error::Error;
};
struct StructuralError : Error {
  using Error::Error;
};
struct GeometryError : Error {
  using Error::Error;
};
struct NumericalError : Error {
  using Error::Error;
};
struct RangeError : Error {
  using Error::Error;
};
struct DefinitenessError : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  int line = 0;
  ConfigError(const std::string& msg, int line_no)
      : Error("line " + std::to_string(line_no) + ": " + msg), line(line_no) {}
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

}  // namespace shapeopt

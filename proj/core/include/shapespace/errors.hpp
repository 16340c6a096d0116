#pragma once

#include <stdexcept>
#include <string>

namespace shapespace {

// All recoverable failures surface as subclasses of Error so callers can
// catch one type at the CLI boundary and map it to an exit code.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class ParseError : public Error {
public:
  using Error::Error;
};

class EmptyMeshError : public Error {
public:
  using Error::Error;
};

class IsolatedVertexError : public Error {
public:
  using Error::Error;
};

class TooManySamplesError : public Error {
public:
  using Error::Error;
};

class DegenerateNeighborhoodError : public Error {
public:
  using Error::Error;
};

class LengthMismatchError : public Error {
public:
  using Error::Error;
};

class ShapeMismatchError : public Error {
public:
  using Error::Error;
};

class InvalidBandwidthError : public Error {
public:
  using Error::Error;
};

class IsolatedRowError : public Error {
public:
  using Error::Error;
};

class ConvergenceError : public Error {
public:
  using Error::Error;
};

class MissingMapError : public Error {
public:
  using Error::Error;
};

class DisconnectedGraphError : public Error {
public:
  using Error::Error;
};

class DisconnectedMeshError : public Error {
public:
  using Error::Error;
};

class IndexOutOfRangeError : public Error {
public:
  using Error::Error;
};

class InvalidResolutionError : public Error {
public:
  using Error::Error;
};

class SelfIntersectionError : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

class StageFailureError : public Error {
public:
  StageFailureError(const std::string& stage, const std::string& what)
      : Error("stage '" + stage + "': " + what), stage_(stage) {}
  const std::string& stage() const { return stage_; }

private:
  std::string stage_;
};

}  // namespace shapespace

#ifndef ROADNET_ERRORS_HPP
#define ROADNET_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace roadnet {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Bad user input: malformed files, invalid parameters, wrong usage.
class ParseError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

// Invalid or unsupported geometry (malformed arcs, interior crossings,
// strip self-intersection).
class GeometryError : public Error {
 public:
  using Error::Error;
};

// Numerical failures: meshing could not reach the quality floor, or the
// iterative solver did not converge.
class MeshError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace roadnet

#endif

#pragma once

#include <stdexcept>
#include <string>

namespace glueflow {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Value outside the representable floating range.
class RangeError : public Error {
 public:
  using Error::Error;
};

// Integrator, quadrature or root-finder failure.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class IterationCapError : public Error {
 public:
  using Error::Error;
};

// Orbit of a planar point never leaves the disk (point on an invariant axis).
class NoEscapeError : public Error {
 public:
  using Error::Error;
};

// Travel-time integral diverges because the fiber sits on a vanishing circle.
class NonIntegrableError : public Error {
 public:
  using Error::Error;
};

class NotInManifoldError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

// A trajectory stalled or ran out of budget where a definite answer was required.
class FlowError : public Error {
 public:
  using Error::Error;
};

class FiberMismatchError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace glueflow

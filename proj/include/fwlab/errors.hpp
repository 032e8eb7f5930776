#pragma once

#include <stdexcept>
#include <string>

namespace fwlab {

// Base of every error raised by the library. The CLI maps the subclasses onto
// its exit codes, so keep the hierarchy flat.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input outside the domain of a formula (e.g. 1 + z*u <= 0, u <= 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// LMO called on a zero gradient; the caller should treat the iterate as optimal.
class ZeroGradientError : public Error {
 public:
  using Error::Error;
};

/// Line search along a zero-length segment.
class DegenerateDirectionError : public Error {
 public:
  using Error::Error;
};

/// Step rule / objective combination that is not offered (short step on HEB).
class UnsupportedObjectiveError : public Error {
 public:
  using Error::Error;
};

class InfeasibleStartError : public Error {
 public:
  using Error::Error;
};

/// Fixed-point bisection bracket without a sign change.
class BracketFailureError : public Error {
 public:
  BracketFailureError(const std::string& what, double h_lo, double h_hi)
      : Error(what), h_lo_(h_lo), h_hi_(h_hi) {}
  double h_lo() const { return h_lo_; }
  double h_hi() const { return h_hi_; }

 private:
  double h_lo_;
  double h_hi_;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// Exponent outside the range covered by the lower-bound theory (p < 3).
class UnsupportedExponentError : public Error {
 public:
  using Error::Error;
};

/// An iterative routine could not reach the requested tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace fwlab

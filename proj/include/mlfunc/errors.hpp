#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace mlfunc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input outside the mathematical domain of an operation (arg(0), 0^w, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A stated hypothesis or precondition does not hold for the given inputs.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Evaluation requested in a regime the library does not cover.
class UnsupportedDomainError : public Error {
 public:
  using Error::Error;
};

/// The evaluation point is too close to the integration contour.
class PoleProximityError : public Error {
 public:
  using Error::Error;
};

/// An iterative procedure (quadrature, series) exhausted its budget.
/// Carries the best estimate available at the time of failure.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::complex<double> best,
                   double error_estimate)
      : Error(what), best_(best), error_estimate_(error_estimate) {}

  std::complex<double> best_estimate() const noexcept { return best_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  std::complex<double> best_;
  double error_estimate_;
};

/// Every evaluation route failed for a given input.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

}  // namespace mlfunc

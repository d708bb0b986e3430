#pragma once

#include <span>

#include "mlfunc/complex.hpp"

namespace mlfunc {

namespace detail {

// Knuth's TwoSum: s + err == a + b exactly.
inline double two_sum(double a, double b, double& err) {
  const double s = a + b;
  const double bb = s - a;
  err = (a - (s - bb)) + (b - bb);
  return s;
}

}  // namespace detail

/// Running sum carried as an unevaluated pair (sum, correction) per
/// component, the Sum2 scheme of Ogita, Rump and Oishi. The result is as
/// accurate as if the sum were accumulated in twice the working precision
/// and then rounded once.
class CompensatedAccumulator {
 public:
  void add(Complex x) {
    double e = 0.0;
    re_ = detail::two_sum(re_, x.real(), e);
    re_err_ += e;
    im_ = detail::two_sum(im_, x.imag(), e);
    im_err_ += e;
  }

  CompensatedAccumulator& operator+=(Complex x) {
    add(x);
    return *this;
  }

  Complex value() const { return {re_ + re_err_, im_ + im_err_}; }

  /// False once any component overflowed to inf or became NaN.
  bool finite() const { return is_finite(value()); }

 private:
  double re_ = 0.0;
  double re_err_ = 0.0;
  double im_ = 0.0;
  double im_err_ = 0.0;
};

/// Compensated sum of a sequence. A non-finite result flags overflow.
inline Complex compensated_sum(std::span<const Complex> terms) {
  CompensatedAccumulator acc;
  for (const Complex& t : terms) acc.add(t);
  return acc.value();
}

}  // namespace mlfunc

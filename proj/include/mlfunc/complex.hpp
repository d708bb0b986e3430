#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "mlfunc/errors.hpp"

namespace mlfunc {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;

inline bool is_finite(Complex z) noexcept {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

/// Principal argument in (-pi, pi]. The negative real axis maps to +pi
/// regardless of the sign of the zero imaginary part.
inline double principal_arg(Complex z) {
  if (z.real() == 0.0 && z.imag() == 0.0) {
    throw DomainError("principal_arg: argument of zero is undefined");
  }
  if (z.imag() == 0.0) return z.real() > 0.0 ? 0.0 : kPi;
  return std::atan2(z.imag(), z.real());
}

/// Principal logarithm ln|z| + i arg(z).
inline Complex principal_log(Complex z) {
  return {std::log(std::abs(z)), principal_arg(z)};
}

/// Principal power exp(w (ln|z| + i arg z)). 0^w is 0 for Re w > 0.
inline Complex cpow(Complex z, Complex w) {
  if (z == Complex{0.0, 0.0}) {
    if (w.real() > 0.0) return {0.0, 0.0};
    throw DomainError("cpow: 0^w requires Re(w) > 0");
  }
  if (w == Complex{1.0, 0.0}) return z;
  if (w == Complex{0.0, 0.0}) return {1.0, 0.0};
  return std::exp(w * principal_log(z));
}

/// sin(pi x) with exact zeros at the integers.
inline double sinpi(double x) {
  if (!std::isfinite(x)) return std::numeric_limits<double>::quiet_NaN();
  double r = std::fmod(x, 2.0);  // (-2, 2), exact
  if (r > 1.0) r -= 2.0;
  if (r <= -1.0) r += 2.0;
  // r in (-1, 1]
  if (r == 0.0 || r == 1.0) return 0.0;
  if (r > 0.5) return std::sin(kPi * (1.0 - r));
  if (r < -0.5) return -std::sin(kPi * (1.0 + r));
  return std::sin(kPi * r);
}

/// cos(pi x) with exact zeros at the half-integers.
inline double cospi(double x) {
  if (!std::isfinite(x)) return std::numeric_limits<double>::quiet_NaN();
  double r = std::fabs(std::fmod(x, 2.0));  // [0, 2)
  if (r > 1.0) r = 2.0 - r;                 // [0, 1]
  if (r == 0.5) return 0.0;
  if (r > 0.5) return -std::sin(kPi * (r - 0.5));
  return std::sin(kPi * (0.5 - r));
}

/// sin(pi z) for complex z, exact zero at the real integers.
inline Complex sinpi(Complex z) {
  const double y = kPi * z.imag();
  return {sinpi(z.real()) * std::cosh(y), cospi(z.real()) * std::sinh(y)};
}

}  // namespace mlfunc

#pragma once

#include <array>
#include <cmath>
#include <limits>

#include "mlfunc/complex.hpp"

namespace mlfunc {

namespace detail {

// Lanczos approximation, g = 607/128, 15 terms (Godfrey).
inline constexpr double kLanczosShift = 5.2421875;  // g + 1/2
inline constexpr std::array<double, 15> kLanczosCoeff = {
    0.99999999999999709182,     57.156235665862923517,
    -59.597960355475491248,     14.136097974741747174,
    -0.49191381609762019978,    .33994649984811888699e-4,
    .46523628927048575665e-4,   -.98374475304879564677e-4,
    .15808870322491248884e-3,   -.21026444172410488319e-3,
    .21743961811521264320e-3,   -.16431810653676389022e-3,
    .84418223983852743293e-4,   -.26190838401581408670e-4,
    .36899182659531622704e-5};
inline constexpr double kSqrtTwoPi = 2.5066282746310005024;

inline bool is_nonpositive_integer(double x) {
  return x <= 0.0 && std::floor(x) == x;
}

/// log Gamma(z) for Re(z) >= 1/2 (some branch of the logarithm).
inline Complex lanczos_log_gamma(Complex z) {
  Complex series = kLanczosCoeff[0];
  for (std::size_t j = 1; j < kLanczosCoeff.size(); ++j) {
    series += kLanczosCoeff[j] / (z + static_cast<double>(j));
  }
  const Complex t = z + kLanczosShift;
  return (z + 0.5) * std::log(t) - t + std::log(kSqrtTwoPi * series / z);
}

}  // namespace detail

/// 1/Gamma(x) on the real axis; exact zero at 0, -1, -2, ...
inline double recip_gamma(double x) {
  if (std::isnan(x)) return x;
  if (detail::is_nonpositive_integer(x)) return 0.0;
  if (x > 171.0) return std::exp(-std::lgamma(x));
  return 1.0 / std::tgamma(x);
}

/// 1/Gamma(z), an entire function. Real arguments go through the C library
/// gamma; complex ones use the Lanczos sum with reflection for Re z < 1/2.
inline Complex recip_gamma(Complex z) {
  if (z.imag() == 0.0) return recip_gamma(z.real());
  if (z.real() >= 0.5) return std::exp(-detail::lanczos_log_gamma(z));
  // 1/Gamma(z) = sin(pi z) Gamma(1 - z) / pi
  return sinpi(z) * std::exp(detail::lanczos_log_gamma(1.0 - z)) / kPi;
}

/// log(1/Gamma(z)) on some branch; real part is -inf at the poles of Gamma.
/// Used where 1/Gamma under- or overflows but a product with it does not.
inline Complex log_recip_gamma(Complex z) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (z.imag() == 0.0) {
    const double x = z.real();
    if (detail::is_nonpositive_integer(x)) return {-inf, 0.0};
    const double mag = -std::lgamma(x);
    if (x > 0.0 || sinpi(x) > 0.0) return {mag, 0.0};
    return {mag, kPi};
  }
  if (z.real() >= 0.5) return -detail::lanczos_log_gamma(z);
  return std::log(sinpi(z)) + detail::lanczos_log_gamma(1.0 - z) -
         std::log(kPi);
}

}  // namespace mlfunc

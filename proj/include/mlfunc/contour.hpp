#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "mlfunc/complex.hpp"
#include "mlfunc/errors.hpp"
#include "mlfunc/quadrature.hpp"
#include "mlfunc/series.hpp"

namespace mlfunc {

/// The contour gamma(eps, theta): the ray arg = -theta traversed inward,
/// the arc |zeta| = eps from -theta to theta, and the ray arg = theta
/// traversed outward. Requires alpha pi / 2 < theta < alpha pi so that
/// exp(zeta^(1/alpha)) decays along both rays.
struct ContourSpec {
  double eps = 1.0;
  double theta = 0.375 * kPi;
  double alpha = 0.5;
  QuadratureControls controls{};
  /// Debug mutation: traverse the whole contour backwards.
  bool reverse_orientation = false;

  void validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) {
      throw PreconditionError("contour: alpha must lie in (0, 1)");
    }
    if (!(eps > 0.0)) throw PreconditionError("contour: eps must be positive");
    if (!(theta > 0.5 * alpha * kPi && theta < alpha * kPi)) {
      throw PreconditionError("contour: theta must lie in (alpha pi/2, alpha pi)");
    }
    controls.validate();
  }
};

enum class RegionClass { GMinus, GPlus, NearContour };

inline std::string_view to_string(RegionClass r) {
  switch (r) {
    case RegionClass::GMinus: return "GMinus";
    case RegionClass::GPlus: return "GPlus";
    case RegionClass::NearContour: return "NearContour";
  }
  return "unknown";
}

/// Default pole-proximity margin for evaluation at z.
inline double default_margin(Complex z) { return 0.02 * std::abs(z); }

/// Euclidean distance from z to gamma(eps, theta).
inline double distance_to_contour(Complex z, double eps, double theta) {
  // The contour is symmetric about the real axis; for a point in the closed
  // upper half plane the upper ray is never farther than the lower one.
  const Complex w{z.real(), std::fabs(z.imag())};
  const Complex u = std::polar(1.0, theta);
  const Complex corner = eps * u;
  const Complex local = w * std::conj(u);  // ray direction becomes +real axis
  const double to_ray =
      local.real() >= eps ? std::fabs(local.imag()) : std::abs(w - corner);
  double to_arc;
  if (w == Complex{0.0, 0.0}) {
    to_arc = eps;
  } else if (principal_arg(w) <= theta) {
    to_arc = std::fabs(std::abs(w) - eps);
  } else {
    to_arc = std::abs(w - corner);
  }
  return std::min(to_ray, to_arc);
}

/// GPlus lies to the right of the contour (|arg z| < theta, |z| > eps),
/// GMinus to the left. Points within `margin` of the contour are reported
/// as NearContour.
inline RegionClass classify_region(Complex z, const ContourSpec& c, double margin) {
  if (z == Complex{0.0, 0.0}) {
    throw DomainError("classify_region: z must be nonzero");
  }
  if (distance_to_contour(z, c.eps, c.theta) < margin) return RegionClass::NearContour;
  const double a = std::fabs(principal_arg(z));
  if (a < c.theta && std::abs(z) > c.eps) return RegionClass::GPlus;
  return RegionClass::GMinus;
}

namespace detail {

/// Radius beyond which exp(r^(1/alpha) cos(theta/alpha)) < drop.
inline double ray_truncation_radius(const ContourSpec& c) {
  const double decay = std::fabs(std::cos(c.theta / c.alpha));
  const double r = std::pow(std::log(1.0 / c.controls.truncation_drop) / decay, c.alpha);
  return std::max(r, 2.0 * c.eps);
}

inline std::array<PathSegment, 3> contour_path(const ContourSpec& c) {
  const double sign = c.reverse_orientation ? -1.0 : 1.0;
  const double hint = ray_truncation_radius(c) - c.eps;
  const Complex up = std::polar(1.0, c.theta);
  const Complex down = std::conj(up);
  PathSegment lower = ray(c.eps * down, down, hint);
  lower.orientation = -sign;  // traversed from infinity toward the arc
  PathSegment middle = arc(c.eps, -c.theta, c.theta);
  middle.orientation = sign;
  PathSegment upper = ray(c.eps * up, up, hint);
  upper.orientation = sign;
  return {std::move(lower), std::move(middle), std::move(upper)};
}

/// (1/(2 alpha pi i)) * integral over gamma of
///   exp(zeta^(1/alpha)) zeta^((1-beta)/alpha) / (zeta - z)^n.
/// n = 0 drops the Cauchy kernel.
inline QuadratureResult contour_kernel_integral(const MLParams& p, Complex z,
                                                const ContourSpec& c, int n) {
  const Complex a = (1.0 - p.beta) / c.alpha;
  const double inv_alpha = 1.0 / c.alpha;
  auto integrand = [&](Complex zeta) {
    const Complex log_zeta = principal_log(zeta);
    const Complex f = std::exp(std::exp(inv_alpha * log_zeta) + a * log_zeta);
    if (n == 0) return f;
    const Complex d = zeta - z;
    Complex denom = d;
    for (int j = 1; j < n; ++j) denom *= d;
    return f / denom;
  };
  const auto path = contour_path(c);
  QuadratureResult r = integrate_path(integrand, std::span<const PathSegment>(path), c.controls);
  const Complex prefactor = 1.0 / (2.0 * c.alpha * kPi * Complex{0.0, 1.0});
  r.value *= prefactor;
  r.error *= std::abs(prefactor);
  return r;
}

}  // namespace detail

/// (1/alpha) z^((1-beta)/alpha) exp(z^(1/alpha)), the term that separates
/// the representations on the two sides of the contour.
inline Complex explicit_term(const MLParams& p, Complex z) {
  const Complex log_z = principal_log(z);
  return std::exp(std::exp(log_z / p.alpha) + (1.0 - p.beta) / p.alpha * log_z) / p.alpha;
}

/// n-th derivative in z of explicit_term, via the recurrence for the
/// derivatives of exp(g): h^(n) = sum_j C(n-1, j) g^(j+1) h^(n-1-j).
inline Complex explicit_term_derivative(const MLParams& p, Complex z, int n) {
  const Complex a = (1.0 - p.beta) / p.alpha;
  const Complex z_inv_alpha = cpow(z, 1.0 / p.alpha);
  // g^(m)(z) for m = 1..n
  std::vector<Complex> g(static_cast<std::size_t>(n) + 1);
  double log_coeff = 1.0;  // (m-1)!
  double power_coeff = 1.0;
  Complex z_neg = 1.0;
  for (int m = 1; m <= n; ++m) {
    if (m > 1) log_coeff *= (m - 1);
    power_coeff *= (1.0 / p.alpha - (m - 1));
    z_neg /= z;
    const double sign = (m % 2 == 1) ? 1.0 : -1.0;
    g[m] = a * sign * log_coeff * z_neg + power_coeff * z_inv_alpha * z_neg;
  }
  std::vector<Complex> h(static_cast<std::size_t>(n) + 1);
  h[0] = explicit_term(p, z);
  for (int k = 1; k <= n; ++k) {
    Complex acc = 0.0;
    double binom = 1.0;  // C(k-1, j)
    for (int j = 0; j <= k - 1; ++j) {
      acc += binom * g[j + 1] * h[k - 1 - j];
      binom = binom * (k - 1 - j) / (j + 1);
    }
    h[k] = acc;
  }
  return h[n];
}

/// The Cauchy-type integral (1/(2 alpha pi i)) * integral over gamma of
/// exp(zeta^(1/alpha)) zeta^((1-beta)/alpha) / (zeta - z) d zeta.
/// It equals E_{alpha,beta}(z) on GMinus and E minus explicit_term on GPlus.
inline QuadratureResult eval_contour_integral(const MLParams& p, Complex z,
                                              const ContourSpec& c) {
  p.validate();
  c.validate();
  if (p.alpha != c.alpha) throw PreconditionError("contour alpha differs from parameter alpha");
  if (z != Complex{0.0, 0.0} &&
      classify_region(z, c, default_margin(z)) == RegionClass::NearContour) {
    throw PoleProximityError(
        "eval_contour_integral: z lies on or near the contour; change theta or eps");
  }
  return detail::contour_kernel_integral(p, z, c, 1);
}

/// (1/(2 alpha pi i)) * integral of exp(zeta^(1/alpha)) zeta^((1-beta)/alpha),
/// which equals 1/Gamma(beta - alpha). Serves as the quadrature self-test.
inline Complex recip_gamma_via_contour(const MLParams& p, const ContourSpec& c) {
  p.validate();
  c.validate();
  if (p.alpha != c.alpha) throw PreconditionError("contour alpha differs from parameter alpha");
  return detail::contour_kernel_integral(p, 0.0, c, 0).value;
}

/// A contour for evaluation at z: eps = 1 and theta = 0.75 alpha pi unless
/// z sits within 0.05 alpha pi of a ray or close to the arc, in which case
/// theta (then eps) is moved away from z.
inline ContourSpec select_contour(double alpha, Complex z,
                                  const QuadratureControls& controls = {}) {
  ContourSpec c;
  c.alpha = alpha;
  c.controls = controls;
  c.eps = 1.0;
  c.theta = 0.75 * alpha * kPi;
  if (z == Complex{0.0, 0.0}) return c;
  const double delta = 0.05 * alpha * kPi;
  const double a = std::fabs(principal_arg(z));
  if (std::fabs(a - c.theta) < delta) {
    c.theta = (a + delta < alpha * kPi) ? a + delta : a - delta;
  }
  const double r = std::abs(z);
  if (std::fabs(r - c.eps) < 0.1 * r) c.eps = 0.5 * r;
  return c;
}

namespace detail {

inline EvalResult contour_value(const MLParams& p, Complex z, const ContourSpec& c,
                                RegionClass region) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  QuadratureResult q = contour_kernel_integral(p, z, c, 1);
  EvalResult r{q.value, q.error, Method::contour, q.panels};
  if (region == RegionClass::GPlus) {
    const Complex e = explicit_term(p, z);
    r.value += e;
    // Rounding in exp() scales with the size of its argument.
    r.err_estimate += eps * std::abs(e) * (4.0 + std::pow(std::abs(z), 1.0 / p.alpha));
  }
  return r;
}

}  // namespace detail

/// E_{alpha,beta}(z) from its contour representation: the integral alone
/// on GMinus, integral plus explicit_term on GPlus. A point near the
/// contour triggers retries with theta moved away from z; if no admissible
/// theta helps the compensated series is used, and if that fails too an
/// EvaluationError is thrown.
inline EvalResult ml_contour(const MLParams& p, Complex z, const ContourSpec& c) {
  p.validate();
  c.validate();
  if (p.alpha != c.alpha) throw PreconditionError("contour alpha differs from parameter alpha");
  if (z == Complex{0.0, 0.0}) throw DomainError("ml_contour: z must be nonzero");

  const double margin = default_margin(z);
  RegionClass region = classify_region(z, c, margin);
  ContourSpec use = c;
  if (region == RegionClass::NearContour) {
    const double delta = 0.05 * c.alpha * kPi;
    const double a = std::fabs(principal_arg(z));
    const double lo = 0.5 * c.alpha * kPi;
    const double hi = c.alpha * kPi;
    for (double candidate : {a + delta, a - delta, 0.75 * hi, a + 2 * delta, a - 2 * delta}) {
      if (!(candidate > lo && candidate < hi)) continue;
      use.theta = candidate;
      region = classify_region(z, use, margin);
      if (region != RegionClass::NearContour) break;
    }
  }
  if (region == RegionClass::NearContour) {
    try {
      return ml_series(p, z, 1e-16, SeriesMode::compensated);
    } catch (const Error& e) {
      throw EvaluationError(std::string("ml_contour: no admissible contour and series failed: ") +
                            e.what());
    }
  }
  return detail::contour_value(p, z, use, region);
}

/// d^l/d lambda^l E_{alpha,beta}(lambda t^alpha) from the l-fold
/// differentiated contour integrand,
///   t^(alpha l) [ l!/(2 alpha pi i) * integral of
///       exp(zeta^(1/alpha)) zeta^((1-beta)/alpha) (zeta - z)^-(l+1)
///     + explicit_term^(l)(z) on GPlus ],   z = lambda t^alpha.
inline EvalResult ml_contour_deriv(const MLParams& p, Complex lambda, double t, int l,
                                   const ContourSpec& c) {
  p.validate();
  c.validate();
  if (!(t > 0.0)) throw PreconditionError("ml_contour_deriv: t must be positive");
  if (l < 0) throw PreconditionError("ml_contour_deriv: l must be >= 0");
  const double tau = std::pow(t, p.alpha);
  const Complex z = lambda * tau;
  if (l == 0) return ml_contour(p, z, c);
  const RegionClass region = classify_region(z, c, default_margin(z));
  if (region == RegionClass::NearContour) {
    throw PoleProximityError("ml_contour_deriv: z lies near the contour; change theta or eps");
  }
  QuadratureResult q = detail::contour_kernel_integral(p, z, c, l + 1);
  double factorial = 1.0;
  for (int j = 2; j <= l; ++j) factorial *= j;
  Complex value = factorial * q.value;
  double err = factorial * q.error;
  if (region == RegionClass::GPlus) {
    const Complex e = explicit_term_derivative(p, z, l);
    value += e;
    err += std::numeric_limits<double>::epsilon() * std::abs(e) *
           (4.0 + std::pow(std::abs(z), 1.0 / p.alpha));
  }
  const double scale = std::pow(tau, l);
  return {value * scale, err * scale, Method::contour, q.panels};
}

}  // namespace mlfunc

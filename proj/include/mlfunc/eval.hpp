#pragma once

#include <cmath>

#include "mlfunc/contour.hpp"
#include "mlfunc/series.hpp"

namespace mlfunc {

struct EvalControls {
  /// |z| <= rho_switch: plain series.
  double rho_switch = 4.0;
  /// rho_switch < |z| <= rho_dd: compensated series; beyond: contour.
  double rho_dd = 12.0;
  /// Relative truncation tolerance for the series.
  double series_tol = 1e-16;
  /// Plain-series results whose error estimate exceeds this fraction of
  /// |value| are recomputed with the compensated series.
  double accept_rel_err = 1e-12;
  /// Middle-band points whose largest series term exceeds 2^bits go to
  /// the contour route when alpha < 1.
  double max_compensated_bits = 1024.0;
  QuadratureControls quadrature{};
};

namespace detail {

inline bool acceptable(const EvalResult& r, double rel) {
  return r.err_estimate <= rel * std::abs(r.value) || r.err_estimate <= 1e-300;
}

inline bool series_too_costly(const MLParams& p, Complex z, int l, const EvalControls& c) {
  if (p.alpha >= 1.0) return false;
  const double peak = peak_log_term(p, z, l, kDefaultTermCap).first;
  return peak / std::log(2.0) > c.max_compensated_bits;
}

}  // namespace detail

/// Hybrid evaluator for E_{alpha,beta}(z): plain series near the origin,
/// compensated series in the middle band, contour representation beyond.
inline EvalResult ml_eval(const MLParams& p, Complex z, const EvalControls& controls = {}) {
  p.validate();
  const double r = std::abs(z);
  if (r <= controls.rho_switch) {
    EvalResult plain = ml_series(p, z, controls.series_tol, SeriesMode::plain);
    if (detail::acceptable(plain, controls.accept_rel_err)) return plain;
    return ml_series(p, z, controls.series_tol, SeriesMode::compensated);
  }
  if (r <= controls.rho_dd && !detail::series_too_costly(p, z, 0, controls)) {
    try {
      return ml_series(p, z, controls.series_tol, SeriesMode::compensated);
    } catch (const ConvergenceError&) {
      if (p.alpha >= 1.0) throw;
    }
  } else if (p.alpha >= 1.0) {
    throw UnsupportedDomainError(
        "ml_eval: |z| beyond the series range needs the contour representation, "
        "which requires alpha < 1");
  }
  return ml_contour(p, z, select_contour(p.alpha, z, controls.quadrature));
}

/// d^l/d lambda^l E_{alpha,beta}(lambda t^alpha) with the same dispatch as
/// ml_eval on |lambda t^alpha|. l = 0 is ml_eval itself.
inline EvalResult ml_deriv_eval(const MLParams& p, Complex lambda, double t, int l,
                                const EvalControls& controls = {}) {
  p.validate();
  if (!(t >= 0.0)) throw PreconditionError("ml_deriv_eval: t must be >= 0");
  if (l < 0) throw PreconditionError("ml_deriv_eval: l must be >= 0");
  if (l == 0) return ml_eval(p, lambda * std::pow(t, p.alpha), controls);
  const Complex z = lambda * std::pow(t, p.alpha);
  const double r = std::abs(z);
  if (r <= controls.rho_switch) {
    EvalResult plain = ml_series_deriv(p, lambda, t, l, controls.series_tol, SeriesMode::plain);
    if (detail::acceptable(plain, controls.accept_rel_err)) return plain;
    return ml_series_deriv(p, lambda, t, l, controls.series_tol, SeriesMode::compensated);
  }
  if (r <= controls.rho_dd && !detail::series_too_costly(p, z, l, controls)) {
    try {
      return ml_series_deriv(p, lambda, t, l, controls.series_tol, SeriesMode::compensated);
    } catch (const ConvergenceError&) {
      if (p.alpha >= 1.0) throw;
    }
  } else if (p.alpha >= 1.0) {
    throw UnsupportedDomainError("ml_deriv_eval: contour route requires alpha < 1");
  }
  return ml_contour_deriv(p, lambda, t, l, select_contour(p.alpha, z, controls.quadrature));
}

}  // namespace mlfunc

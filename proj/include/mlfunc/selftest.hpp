#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mlfunc/contour.hpp"
#include "mlfunc/gamma.hpp"
#include "mlfunc/series.hpp"

namespace mlfunc {

struct SelftestCheck {
  std::string suite;
  std::string name;
  Complex value;
  Complex reference;
  double deviation = 0.0;
  double tolerance = 0.0;
  bool ok = false;
  std::string error;
};

struct SelftestReport {
  std::vector<SelftestCheck> checks;
  bool ok = true;
  /// Index of the check with the largest deviation / tolerance.
  std::size_t worst = 0;
  double worst_excess = 0.0;
};

struct SelftestOptions {
  /// Replaces both suite tolerances when set.
  std::optional<double> tol;
  double recip_gamma_abs_tol = 1e-9;
  double overlap_rel_tol = 1e-8;
  bool reverse_orientation = false;
  QuadratureControls quadrature{};
};

/// (alpha, beta) pairs of the reciprocal-gamma contour identity.
inline std::vector<std::pair<double, Complex>> recip_gamma_selftest_pairs() {
  return {{0.5, 0.5},  {0.5, 1.0},  {0.5, 2.0}, {0.3, 0.3},  {0.3, 1.0},
          {0.7, 1.5},  {0.7, 0.7},  {0.9, 2.5}, {0.6, 0.1},  {0.4, 3.0},
          {0.8, -0.5}, {0.6, Complex{1.0, 1.0}}};
}

struct OverlapPoint {
  MLParams params;
  Complex z;
};

/// Points of the annulus 5 <= |z| <= 12 where series and contour overlap.
inline std::vector<OverlapPoint> overlap_selftest_points() {
  std::vector<OverlapPoint> pts;
  for (double alpha : {0.5, 0.7}) {
    for (double beta : {alpha, 1.0}) {
      for (double r : {5.0, 8.0, 12.0}) {
        for (double a : {0.6, 0.8, 1.0}) {
          pts.push_back({{alpha, beta}, std::polar(r, a * kPi)});
        }
      }
    }
  }
  return pts;
}

namespace detail {

inline std::string pair_name(double alpha, Complex beta) {
  std::string s = "alpha=" + std::to_string(alpha) + " beta=" + std::to_string(beta.real());
  if (beta.imag() != 0.0) s += (beta.imag() > 0 ? "+" : "") + std::to_string(beta.imag()) + "i";
  return s;
}

}  // namespace detail

/// Reciprocal-gamma identity on gamma(1, 0.75 alpha pi) and the
/// series/contour agreement on the overlap annulus.
inline SelftestReport run_selftest(const SelftestOptions& options = {}) {
  SelftestReport rep;
  const double gtol = options.tol.value_or(options.recip_gamma_abs_tol);
  const double otol = options.tol.value_or(options.overlap_rel_tol);

  for (const auto& [alpha, beta] : recip_gamma_selftest_pairs()) {
    SelftestCheck c;
    c.suite = "recip_gamma";
    c.name = detail::pair_name(alpha, beta);
    c.tolerance = gtol;
    try {
      ContourSpec spec;
      spec.alpha = alpha;
      spec.theta = 0.75 * alpha * kPi;
      spec.controls = options.quadrature;
      spec.reverse_orientation = options.reverse_orientation;
      c.value = recip_gamma_via_contour({alpha, beta}, spec);
      c.reference = recip_gamma(beta - alpha);
      c.deviation = std::abs(c.value - c.reference);
      c.ok = c.deviation <= gtol;
    } catch (const std::exception& e) {
      c.error = e.what();
      c.deviation = std::numeric_limits<double>::infinity();
    }
    rep.checks.push_back(std::move(c));
  }

  for (const auto& pt : overlap_selftest_points()) {
    SelftestCheck c;
    c.suite = "overlap";
    c.name = detail::pair_name(pt.params.alpha, pt.params.beta) + " |z|=" +
             std::to_string(std::abs(pt.z)) + " arg=" + std::to_string(std::arg(pt.z) / kPi) +
             "pi";
    c.tolerance = otol;
    try {
      ContourSpec spec = select_contour(pt.params.alpha, pt.z, options.quadrature);
      spec.reverse_orientation = options.reverse_orientation;
      c.value = ml_contour(pt.params, pt.z, spec).value;
      c.reference = ml_series(pt.params, pt.z, 1e-16, SeriesMode::compensated).value;
      c.deviation = std::abs(c.value - c.reference) / std::abs(c.reference);
      c.ok = c.deviation <= otol;
    } catch (const std::exception& e) {
      c.error = e.what();
      c.deviation = std::numeric_limits<double>::infinity();
    }
    rep.checks.push_back(std::move(c));
  }

  for (std::size_t i = 0; i < rep.checks.size(); ++i) {
    const auto& c = rep.checks[i];
    if (!c.ok) rep.ok = false;
    const double excess = c.deviation / c.tolerance;
    if (i == 0 || excess > rep.worst_excess) {
      rep.worst = i;
      rep.worst_excess = excess;
    }
  }
  return rep;
}

}  // namespace mlfunc

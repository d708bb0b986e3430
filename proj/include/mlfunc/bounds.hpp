#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mlfunc/contour.hpp"
#include "mlfunc/eval.hpp"

namespace mlfunc {

/// Sector data shared by the asymptotic bounds: lambda, the contour angle
/// theta and the safety angle theta0.
struct SectorContext {
  double alpha = 0.5;
  Complex lambda{1.0, 0.0};
  double theta = 0.375 * kPi;
  double theta0 = 0.0625 * kPi;

  double arg_abs() const { return std::fabs(principal_arg(lambda)); }

  void validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) {
      throw PreconditionError("sector context: alpha must lie in (0, 1)");
    }
    if (lambda == Complex{0.0, 0.0} || !is_finite(lambda)) {
      throw PreconditionError("sector context: lambda must be finite and nonzero");
    }
    if (!(theta > 0.5 * alpha * kPi && theta < alpha * kPi)) {
      throw PreconditionError(
          "sector context: hypothesis alpha pi/2 < theta < alpha pi violated");
    }
    if (!(theta0 > 0.0 && theta0 < theta - 0.5 * alpha * kPi)) {
      throw PreconditionError(
          "sector context: hypothesis 0 < theta0 < theta - alpha pi/2 violated");
    }
    if (!(theta0 < 0.5 * kPi)) {
      throw PreconditionError("sector context: hypothesis theta0 < pi/2 violated");
    }
    if (!(std::fabs(theta - arg_abs()) >= theta0)) {
      throw PreconditionError(
          "sector context: hypothesis |theta - |arg lambda|| >= theta0 violated");
    }
  }
};

/// theta = 0.75 alpha pi (pulled toward alpha pi/2 when |arg lambda| sits in
/// between), theta0 = half the smaller admissible gap.
inline SectorContext default_sector_context(double alpha, Complex lambda) {
  SectorContext ctx;
  ctx.alpha = alpha;
  ctx.lambda = lambda;
  if (lambda == Complex{0.0, 0.0}) {
    ctx.validate();
  }
  const double a = std::fabs(principal_arg(lambda));
  const double lo = 0.5 * alpha * kPi;
  double theta = 0.75 * alpha * kPi;
  if (a > lo && a < alpha * kPi && theta >= a) theta = 0.5 * (lo + a);
  ctx.theta = theta;
  ctx.theta0 = 0.5 * std::min(theta - lo, std::fabs(theta - a));
  return ctx;
}

struct KappaIntegrals {
  double I0 = 0.0;
  double I1 = 0.0;
  double err0 = 0.0;
  double err1 = 0.0;
};

/// I0 = integral of |exp(zeta^(1/alpha))| and I1 = integral of
/// |exp(zeta^(1/alpha)) zeta^(1/alpha)| over gamma(1, theta), arc length.
inline KappaIntegrals kappa_integrals(double alpha, double theta,
                                      const QuadratureControls& controls = {}) {
  ContourSpec c;
  c.eps = 1.0;
  c.theta = theta;
  c.alpha = alpha;
  c.controls = controls;
  c.validate();
  const auto path = detail::contour_path(c);
  const std::span<const PathSegment> pieces(path);
  const double inv = 1.0 / alpha;
  auto f0 = [inv](Complex zeta) {
    return std::exp(cpow(zeta, inv).real());
  };
  auto f1 = [inv](Complex zeta) {
    const Complex w = cpow(zeta, inv);
    return std::exp(w.real()) * std::abs(w);
  };
  const QuadratureResult q0 = integrate_path_arclength(f0, pieces, controls);
  const QuadratureResult q1 = integrate_path_arclength(f1, pieces, controls);
  return {q0.value.real(), q1.value.real(), q0.error, q1.error};
}

struct Lemma2Constants {
  double m_const = 0.0;
  /// m with pi in both components of the max.
  double m_harmonized = 0.0;
  double first = 0.0;
  double second = 0.0;
  double t0 = 0.0;
  KappaIntegrals kappa;
};

inline double onset_time(const SectorContext& ctx) {
  return 1.0 / (std::pow(std::abs(ctx.lambda), 1.0 / ctx.alpha) *
                std::pow(1.0 - std::sin(ctx.theta0), 1.0 / ctx.alpha));
}

/// m = max{I0/(2 alpha pi |lambda| sin theta0), I1/(2 alpha |lambda|^2 sin theta0)},
/// t0 = 1/(|lambda|^(1/alpha) (1 - sin theta0)^(1/alpha)).
inline Lemma2Constants lemma2_constants(const SectorContext& ctx,
                                        const QuadratureControls& controls = {}) {
  ctx.validate();
  Lemma2Constants out;
  out.kappa = kappa_integrals(ctx.alpha, ctx.theta, controls);
  const double r = std::abs(ctx.lambda);
  const double s = std::sin(ctx.theta0);
  out.first = out.kappa.I0 / (2.0 * ctx.alpha * kPi * r * s);
  out.second = out.kappa.I1 / (2.0 * ctx.alpha * r * r * s);
  out.m_const = std::max(out.first, out.second);
  out.m_harmonized = std::max(out.first, out.second / kPi);
  out.t0 = onset_time(ctx);
  return out;
}

struct Lemma4Constants {
  int l = 0;
  double M = 0.0;
  double Mhat = 0.0;
  double t0 = 0.0;
  KappaIntegrals kappa;
};

inline void require_decay_sector(const SectorContext& ctx, std::string_view who) {
  ctx.validate();
  if (!(ctx.arg_abs() >= ctx.theta + ctx.theta0)) {
    throw PreconditionError(std::string(who) +
                            ": hypothesis theta + theta0 <= |arg lambda| violated");
  }
}

namespace detail {

inline double factorial(int n) {
  double f = 1.0;
  for (int j = 2; j <= n; ++j) f *= j;
  return f;
}

inline double binomial(int n, int k) {
  double b = 1.0;
  for (int j = 1; j <= k; ++j) b = b * (n - k + j) / j;
  return b;
}

inline Lemma4Constants lemma4_from_kappa(const SectorContext& ctx, int l,
                                         const KappaIntegrals& kappa) {
  Lemma4Constants out;
  out.l = l;
  out.kappa = kappa;
  const double r = std::abs(ctx.lambda);
  const double s = std::sin(ctx.theta0);
  const double two_alpha_pi = 2.0 * ctx.alpha * kPi;
  out.M = factorial(l) / (two_alpha_pi * std::pow(r * s, l + 1)) * kappa.I0;
  double sum = 0.0;
  for (int k = 0; k <= l; ++k) {
    sum += binomial(l, k) * factorial(l - k) * factorial(k) / std::pow(s, k + 1);
  }
  out.Mhat = sum / (two_alpha_pi * std::pow(r, l + 2)) * kappa.I1;
  out.t0 = onset_time(ctx);
  return out;
}

}  // namespace detail

/// M_l = l!/(2 alpha pi (|lambda| sin theta0)^(l+1)) I0 and
/// Mhat_l = 1/(2 alpha pi |lambda|^(l+2)) sum_k C(l,k) (l-k)! k!/(sin theta0)^(k+1) I1.
inline Lemma4Constants lemma4_constants(const SectorContext& ctx, int l,
                                        const QuadratureControls& controls = {}) {
  require_decay_sector(ctx, "lemma4_constants");
  if (l < 0) throw PreconditionError("lemma4_constants: l must be >= 0");
  return detail::lemma4_from_kappa(ctx, l, kappa_integrals(ctx.alpha, ctx.theta, controls));
}

enum class Verdict { pass, fail, inconclusive };

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "PASS";
    case Verdict::fail: return "FAIL";
    case Verdict::inconclusive: return "INCONCLUSIVE";
  }
  return "unknown";
}

struct CertificatePoint {
  double t = 0.0;
  double measured = 0.0;
  double allowed = 0.0;
  double error = 0.0;
  double ratio = 0.0;
  Method method = Method::series;
};

/// FAIL when some ratio exceeds 1 by more than the evaluator error allows;
/// INCONCLUSIVE when an error estimate exceeds 10% of its allowance or a
/// ratio above 1 is within error; PASS otherwise.
inline Verdict judge(std::span<const CertificatePoint> points) {
  bool unsure = false;
  for (const auto& p : points) {
    const double frac = p.error / p.allowed;
    if (p.ratio - frac > 1.0) return Verdict::fail;
    if (frac > 0.1 || p.ratio > 1.0) unsure = true;
  }
  return unsure ? Verdict::inconclusive : Verdict::pass;
}

inline Verdict combine(Verdict a, Verdict b) {
  if (a == Verdict::fail || b == Verdict::fail) return Verdict::fail;
  if (a == Verdict::inconclusive || b == Verdict::inconclusive) return Verdict::inconclusive;
  return Verdict::pass;
}

struct CertifyOptions {
  /// Multiplies the constant on the right-hand side; values below 1 give a
  /// deliberately too small bound.
  double constant_scale = 1.0;
  EvalControls eval{};
};

struct Lemma2Certificate {
  std::string part;
  double m_const = 0.0;
  double m_harmonized = 0.0;
  double t0 = 0.0;
  double constant_scale = 1.0;
  KappaIntegrals kappa;
  std::vector<double> grid;
  double worst_ratio = 0.0;
  double witness_t = 0.0;
  double worst_ratio_harmonized = 0.0;
  double max_error_fraction = 0.0;
  /// Largest |R(z)| |z|^2 / (I1/(2 alpha pi sin theta0)) for part ii.
  std::optional<double> zform_worst_ratio;
  std::vector<CertificatePoint> points;
  Verdict verdict = Verdict::inconclusive;
};

inline std::vector<double> log_grid(double lo, double hi, int n) {
  if (!(lo > 0.0 && hi >= lo) || n < 1) {
    throw PreconditionError("log_grid: need 0 < lo <= hi and n >= 1");
  }
  std::vector<double> g(static_cast<std::size_t>(n));
  if (n == 1) {
    g[0] = lo;
    return g;
  }
  const double step = std::log(hi / lo) / (n - 1);
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = lo * std::exp(step * i);
  g.front() = lo;
  g.back() = hi;
  return g;
}

/// Least-squares slope of log v against log t over the last decade of t.
inline double fit_tail_exponent(std::span<const double> t, std::span<const double> v) {
  if (t.size() != v.size() || t.empty()) {
    throw PreconditionError("fit_tail_exponent: mismatched or empty input");
  }
  const double start = t.back() / 10.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < start || !(v[i] > 0.0)) continue;
    const double x = std::log(t[i]);
    const double y = std::log(v[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) throw PreconditionError("fit_tail_exponent: fewer than two points in the last decade");
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw PreconditionError("fit_tail_exponent: degenerate abscissae");
  return (n * sxy - sx * sy) / denom;
}

namespace detail {

inline void check_grid(std::span<const double> grid, double t0, std::string_view who) {
  if (grid.empty()) throw PreconditionError(std::string(who) + ": empty t grid");
  for (double t : grid) {
    if (!(t >= t0) || !std::isfinite(t)) {
      throw PreconditionError(std::string(who) + ": grid point " + std::to_string(t) +
                              " lies below t0 = " + std::to_string(t0));
    }
  }
}

/// The contour part of E_{alpha,beta}(z) for z in the growth sector, i.e.
/// E minus explicit_term, integrated on gamma(1, theta) with z in G+.
inline EvalResult growth_remainder(const MLParams& p, Complex z, double theta,
                                   const QuadratureControls& controls) {
  ContourSpec c;
  c.alpha = p.alpha;
  c.eps = 1.0;
  c.theta = theta;
  c.controls = controls;
  if (classify_region(z, c, default_margin(z)) != RegionClass::GPlus) {
    c.theta = 0.5 * (std::fabs(principal_arg(z)) + p.alpha * kPi);
    if (classify_region(z, c, default_margin(z)) != RegionClass::GPlus) {
      throw EvaluationError("growth_remainder: no contour keeps z in G+");
    }
  }
  const QuadratureResult q = contour_kernel_integral(p, z, c, 1);
  return {q.value, q.error, Method::contour, q.panels};
}

/// E_{alpha,beta}(z) - explicit_term(z) in the growth sector: by series
/// subtraction near the origin, by the contour integral beyond rho_switch.
inline EvalResult growth_difference(const MLParams& p, Complex z, double theta,
                                    const EvalControls& controls) {
  if (std::abs(z) > controls.rho_switch) {
    return growth_remainder(p, z, theta, controls.quadrature);
  }
  EvalResult e = ml_eval(p, z, controls);
  const Complex x = explicit_term(p, z);
  e.value -= x;
  e.err_estimate += std::numeric_limits<double>::epsilon() * std::abs(x) *
                    (4.0 + std::pow(std::abs(z), 1.0 / p.alpha));
  return e;
}

inline void finish(Lemma2Certificate& cert) {
  cert.worst_ratio = 0.0;
  for (const auto& pt : cert.points) {
    if (pt.ratio >= cert.worst_ratio) {
      cert.worst_ratio = pt.ratio;
      cert.witness_t = pt.t;
    }
    cert.max_error_fraction = std::max(cert.max_error_fraction, pt.error / pt.allowed);
    cert.worst_ratio_harmonized =
        std::max(cert.worst_ratio_harmonized, pt.ratio * cert.m_const / cert.m_harmonized);
  }
  cert.verdict = judge(cert.points);
}

inline Lemma2Certificate lemma2_common(const SectorContext& ctx, std::span<const double> grid,
                                       const CertifyOptions& options, std::string part) {
  if (!(options.constant_scale > 0.0)) {
    throw PreconditionError("certify: constant_scale must be positive");
  }
  const Lemma2Constants k = lemma2_constants(ctx, options.eval.quadrature);
  check_grid(grid, k.t0, "certify_lemma2_" + part);
  Lemma2Certificate cert;
  cert.part = std::move(part);
  cert.m_const = k.m_const * options.constant_scale;
  cert.m_harmonized = k.m_harmonized * options.constant_scale;
  cert.t0 = k.t0;
  cert.constant_scale = options.constant_scale;
  cert.kappa = k.kappa;
  cert.grid.assign(grid.begin(), grid.end());
  return cert;
}

inline void require_growth_sector(const SectorContext& ctx, std::string_view who) {
  ctx.validate();
  if (!(ctx.arg_abs() < 0.5 * ctx.alpha * kPi)) {
    throw PreconditionError(std::string(who) +
                            ": hypothesis |arg lambda| < alpha pi/2 violated");
  }
  if (!(ctx.arg_abs() <= ctx.theta - ctx.theta0)) {
    throw PreconditionError(std::string(who) +
                            ": hypothesis |arg lambda| <= theta - theta0 violated");
  }
}

}  // namespace detail

inline std::vector<double> default_lemma2_grid(const SectorContext& ctx) {
  const double t0 = onset_time(ctx);
  return log_grid(t0, 200.0 * t0, 40);
}

inline std::vector<double> default_lemma4_grid(const SectorContext& ctx) {
  const double t0 = onset_time(ctx);
  return log_grid(t0, 100.0 * t0, 40);
}

/// |E_alpha(lambda t^alpha) - (1/alpha) exp(lambda^(1/alpha) t)| <= m / t^alpha.
inline Lemma2Certificate certify_lemma2_i(const SectorContext& ctx, std::span<const double> grid,
                                          const CertifyOptions& options = {}) {
  detail::require_growth_sector(ctx, "certify_lemma2_i");
  Lemma2Certificate cert = detail::lemma2_common(ctx, grid, options, "i");
  const MLParams p{ctx.alpha, 1.0};
  for (double t : cert.grid) {
    const double ta = std::pow(t, ctx.alpha);
    const EvalResult d = detail::growth_difference(p, ctx.lambda * ta, ctx.theta, options.eval);
    CertificatePoint pt;
    pt.t = t;
    pt.measured = std::abs(d.value);
    pt.allowed = cert.m_const / ta;
    pt.error = d.err_estimate;
    pt.ratio = pt.measured / pt.allowed;
    pt.method = d.method;
    cert.points.push_back(pt);
  }
  detail::finish(cert);
  return cert;
}

/// |t^(alpha-1) E_{alpha,alpha}(lambda t^alpha)
///   - (1/alpha) lambda^(1/alpha-1) exp(lambda^(1/alpha) t)| <= m / t^(alpha+1).
inline Lemma2Certificate certify_lemma2_ii(const SectorContext& ctx, std::span<const double> grid,
                                           const CertifyOptions& options = {}) {
  detail::require_growth_sector(ctx, "certify_lemma2_ii");
  Lemma2Certificate cert = detail::lemma2_common(ctx, grid, options, "ii");
  const MLParams p{ctx.alpha, ctx.alpha};
  const double zform_const =
      cert.kappa.I1 / (2.0 * ctx.alpha * kPi * std::sin(ctx.theta0));
  double zform_worst = 0.0;
  const Complex lam_pow = cpow(ctx.lambda, 1.0 / ctx.alpha - 1.0);
  const Complex lam_root = cpow(ctx.lambda, 1.0 / ctx.alpha);
  for (double t : cert.grid) {
    const double ta = std::pow(t, ctx.alpha);
    const double scale = std::pow(t, ctx.alpha - 1.0);
    const Complex z = ctx.lambda * ta;
    CertificatePoint pt;
    pt.t = t;
    double remainder_abs = 0.0;
    if (std::abs(z) > options.eval.rho_switch) {
      const EvalResult r = detail::growth_remainder(p, z, ctx.theta, options.eval.quadrature);
      remainder_abs = std::abs(r.value);
      pt.measured = scale * remainder_abs;
      pt.error = scale * r.err_estimate;
      pt.method = r.method;
    } else {
      const EvalResult e = ml_eval(p, z, options.eval);
      const Complex x = (1.0 / ctx.alpha) * lam_pow * std::exp(lam_root * t);
      const Complex d = scale * e.value - x;
      pt.measured = std::abs(d);
      pt.error = scale * e.err_estimate +
                 std::numeric_limits<double>::epsilon() * std::abs(x) * (4.0 + std::abs(lam_root) * t);
      pt.method = e.method;
      remainder_abs = pt.measured / scale;
    }
    pt.allowed = cert.m_const / (ta * t);
    pt.ratio = pt.measured / pt.allowed;
    cert.points.push_back(pt);
    zform_worst = std::max(zform_worst, remainder_abs * std::norm(z) / zform_const);
  }
  cert.zform_worst_ratio = zform_worst;
  detail::finish(cert);
  return cert;
}

/// |t^(alpha-1) E_{alpha,alpha}(lambda t^alpha)| <= m / t^(alpha+1) away from
/// the growth sector.
inline Lemma2Certificate certify_lemma2_iii(const SectorContext& ctx,
                                            std::span<const double> grid,
                                            const CertifyOptions& options = {}) {
  require_decay_sector(ctx, "certify_lemma2_iii");
  Lemma2Certificate cert = detail::lemma2_common(ctx, grid, options, "iii");
  const MLParams p{ctx.alpha, ctx.alpha};
  for (double t : cert.grid) {
    const double ta = std::pow(t, ctx.alpha);
    const double scale = std::pow(t, ctx.alpha - 1.0);
    const EvalResult e = ml_eval(p, ctx.lambda * ta, options.eval);
    CertificatePoint pt;
    pt.t = t;
    pt.measured = scale * std::abs(e.value);
    pt.error = scale * e.err_estimate;
    pt.allowed = cert.m_const / (ta * t);
    pt.ratio = pt.measured / pt.allowed;
    pt.method = e.method;
    cert.points.push_back(pt);
  }
  detail::finish(cert);
  return cert;
}

struct Lemma4Certificate {
  int l = 0;
  double M_l = 0.0;
  double Mhat_l = 0.0;
  double t0 = 0.0;
  double constant_scale = 1.0;
  std::vector<double> grid;
  double worst_ratio_i = 0.0;
  double worst_ratio_ii = 0.0;
  double witness_t_i = 0.0;
  double witness_t_ii = 0.0;
  /// Fitted log-log slopes of |d^l E_alpha| and |d^l E_{alpha,alpha}|.
  double tail_exponent_i = 0.0;
  double tail_exponent_ii = 0.0;
  /// Largest relative disagreement between series and contour routes
  /// where both were evaluated, and whether each stayed within the
  /// combined error estimates.
  double route_max_rel_diff = 0.0;
  bool routes_consistent = true;
  int route_overlap_points = 0;
  std::vector<CertificatePoint> points_i;
  std::vector<CertificatePoint> points_ii;
  Verdict verdict = Verdict::inconclusive;
};

namespace detail {

struct RoutedDerivative {
  EvalResult value;
  std::optional<EvalResult> other;
};

inline RoutedDerivative lemma4_derivative(const MLParams& p, const SectorContext& ctx, double t,
                                          int l, const EvalControls& controls) {
  const Complex z = ctx.lambda * std::pow(t, p.alpha);
  ContourSpec c;
  c.alpha = p.alpha;
  c.eps = 1.0;
  c.theta = ctx.theta;
  c.controls = controls.quadrature;
  if (std::abs(z) > controls.rho_dd) {
    return {ml_contour_deriv(p, ctx.lambda, t, l, c), std::nullopt};
  }
  RoutedDerivative out{ml_deriv_eval(p, ctx.lambda, t, l, controls), std::nullopt};
  if (std::abs(z) > controls.rho_switch &&
      classify_region(z, c, default_margin(z)) != RegionClass::NearContour) {
    out.other = ml_contour_deriv(p, ctx.lambda, t, l, c);
  }
  return out;
}

}  // namespace detail

/// |d^l/d lambda^l E_alpha(lambda t^alpha)| <= M_l / t^alpha and
/// |d^l/d lambda^l E_{alpha,alpha}(lambda t^alpha)| <= Mhat_l / t^(2 alpha).
inline Lemma4Certificate certify_lemma4(const SectorContext& ctx, int l,
                                        std::span<const double> grid,
                                        const CertifyOptions& options = {}) {
  require_decay_sector(ctx, "certify_lemma4");
  if (l < 0 || l > 6) throw PreconditionError("certify_lemma4: l must lie in [0, 6]");
  if (!(options.constant_scale > 0.0)) {
    throw PreconditionError("certify: constant_scale must be positive");
  }
  const Lemma4Constants k = lemma4_constants(ctx, l, options.eval.quadrature);
  detail::check_grid(grid, k.t0, "certify_lemma4");
  Lemma4Certificate cert;
  cert.l = l;
  cert.M_l = k.M * options.constant_scale;
  cert.Mhat_l = k.Mhat * options.constant_scale;
  cert.t0 = k.t0;
  cert.constant_scale = options.constant_scale;
  cert.grid.assign(grid.begin(), grid.end());

  std::vector<double> abs_i, abs_ii;
  auto track = [&cert](const detail::RoutedDerivative& d) {
    if (!d.other) return;
    const double a = std::abs(d.value.value);
    const double b = std::abs(d.other->value);
    const double diff = std::abs(d.value.value - d.other->value);
    const double scale = std::max(a, b);
    if (scale > 0.0) cert.route_max_rel_diff = std::max(cert.route_max_rel_diff, diff / scale);
    if (diff > d.value.err_estimate + d.other->err_estimate) cert.routes_consistent = false;
    ++cert.route_overlap_points;
  };
  for (double t : cert.grid) {
    const double ta = std::pow(t, ctx.alpha);
    const auto d1 = detail::lemma4_derivative({ctx.alpha, 1.0}, ctx, t, l, options.eval);
    const auto d2 = detail::lemma4_derivative({ctx.alpha, ctx.alpha}, ctx, t, l, options.eval);
    track(d1);
    track(d2);
    CertificatePoint p1{t, std::abs(d1.value.value), cert.M_l / ta, d1.value.err_estimate, 0.0,
                        d1.value.method};
    p1.ratio = p1.measured / p1.allowed;
    CertificatePoint p2{t, std::abs(d2.value.value), cert.Mhat_l / (ta * ta),
                        d2.value.err_estimate, 0.0, d2.value.method};
    p2.ratio = p2.measured / p2.allowed;
    if (p1.ratio >= cert.worst_ratio_i) {
      cert.worst_ratio_i = p1.ratio;
      cert.witness_t_i = t;
    }
    if (p2.ratio >= cert.worst_ratio_ii) {
      cert.worst_ratio_ii = p2.ratio;
      cert.witness_t_ii = t;
    }
    cert.points_i.push_back(p1);
    cert.points_ii.push_back(p2);
    abs_i.push_back(p1.measured);
    abs_ii.push_back(p2.measured);
  }
  if (cert.grid.size() >= 2 && cert.grid.back() >= 10.0 * cert.grid.front()) {
    cert.tail_exponent_i = fit_tail_exponent(cert.grid, abs_i);
    cert.tail_exponent_ii = fit_tail_exponent(cert.grid, abs_ii);
  } else {
    cert.tail_exponent_i = cert.tail_exponent_ii = std::numeric_limits<double>::quiet_NaN();
  }
  cert.verdict = combine(judge(cert.points_i), judge(cert.points_ii));
  return cert;
}

using TestFunction = std::function<double(double)>;

struct Lemma3Entry {
  double u = 0.0;
  double lhs = 0.0;
  double lhs_error = 0.0;
  double abs_error = 0.0;
};

struct Lemma3Report {
  double rhs = 0.0;
  double rhs_error = 0.0;
  std::vector<Lemma3Entry> entries;
  /// Each |LHS - RHS| is no larger than its predecessor up to the
  /// combined error estimates.
  bool decreasing = false;
  /// Same check restricted to the second half of the grid.
  bool eventually_decreasing = false;
  bool strictly_decreasing = false;
};

/// The weighted-convolution limit
///   lim_{u->inf} int_0^u (u-s)^(alpha-1) E_{alpha,alpha}(lambda (u-s)^alpha)
///                        / E_alpha(lambda u^alpha) g(s) ds
///     = lambda^(1/alpha-1) int_0^inf exp(-lambda^(1/alpha) s) g(s) ds.
/// The endpoint singularity is removed by v = (u-s)^alpha.
inline Lemma3Report lemma3_limit_check(double alpha, Complex lambda, const TestFunction& g,
                                       std::span<const double> u_grid,
                                       const EvalControls& controls = {}) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw PreconditionError("lemma3_limit_check: alpha must lie in (0, 1)");
  }
  if (lambda == Complex{0.0, 0.0}) throw PreconditionError("lemma3_limit_check: lambda must be nonzero");
  if (!(std::fabs(principal_arg(lambda)) < 0.5 * alpha * kPi)) {
    throw PreconditionError("lemma3_limit_check: hypothesis |arg lambda| < alpha pi/2 violated");
  }
  if (!g) throw PreconditionError("lemma3_limit_check: g must be callable");
  for (std::size_t i = 0; i < u_grid.size(); ++i) {
    if (!(u_grid[i] > 0.0) || (i > 0 && !(u_grid[i] > u_grid[i - 1]))) {
      throw PreconditionError("lemma3_limit_check: u grid must be positive and increasing");
    }
  }
  Lemma3Report report;
  const Complex root = cpow(lambda, 1.0 / alpha);
  const Complex pre = cpow(lambda, 1.0 / alpha - 1.0);
  const double rate = root.real();
  const QuadratureResult rq = integrate_interval(
      [&](double s) { return std::exp(-root * s) * g(s); }, 0.0,
      std::numeric_limits<double>::infinity(), controls.quadrature, 40.0 / rate);
  const Complex rhs = pre * rq.value;
  report.rhs = rhs.real();
  report.rhs_error = std::abs(pre) * rq.error + std::fabs(rhs.imag());

  const MLParams pa{alpha, alpha};
  const MLParams p1{alpha, 1.0};
  for (double u : u_grid) {
    const EvalResult den = ml_eval(p1, lambda * std::pow(u, alpha), controls);
    double eval_rel = 0.0;
    const QuadratureResult q = integrate_interval(
        [&](double v) {
          const EvalResult e = ml_eval(pa, lambda * v, controls);
          if (e.value != Complex{0.0, 0.0}) {
            eval_rel = std::max(eval_rel, e.err_estimate / std::abs(e.value));
          }
          const double s = std::max(0.0, u - std::pow(v, 1.0 / alpha));
          return e.value * g(s);
        },
        0.0, std::pow(u, alpha), controls.quadrature);
    const Complex lhs = q.value / (alpha * den.value);
    Lemma3Entry entry;
    entry.u = u;
    entry.lhs = lhs.real();
    entry.lhs_error = q.error / (alpha * std::abs(den.value)) +
                      std::abs(lhs) * (eval_rel + den.err_estimate / std::abs(den.value)) +
                      std::fabs(lhs.imag());
    entry.abs_error = std::abs(lhs - rhs);
    report.entries.push_back(entry);
  }
  auto decreasing_from = [&](std::size_t start, bool strict) {
    for (std::size_t i = start + 1; i < report.entries.size(); ++i) {
      const auto& a = report.entries[i - 1];
      const auto& b = report.entries[i];
      const double slack = strict ? 0.0 : a.lhs_error + b.lhs_error + 2.0 * report.rhs_error;
      if (strict ? !(b.abs_error < a.abs_error) : !(b.abs_error <= a.abs_error + slack)) {
        return false;
      }
    }
    return true;
  };
  report.decreasing = decreasing_from(0, false);
  report.eventually_decreasing = decreasing_from(report.entries.size() / 2, false);
  report.strictly_decreasing = decreasing_from(0, true);
  return report;
}

}  // namespace mlfunc

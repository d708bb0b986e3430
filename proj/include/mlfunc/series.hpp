#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

#include "mlfunc/compensated.hpp"
#include "mlfunc/complex.hpp"
#include "mlfunc/detail/mp.hpp"
#include "mlfunc/errors.hpp"
#include "mlfunc/gamma.hpp"

namespace mlfunc {

/// Parameters (alpha, beta) of E_{alpha,beta}. alpha = 1 is admitted for
/// identity checks; the contour representations need alpha < 1.
struct MLParams {
  double alpha = 0.5;
  Complex beta{1.0, 0.0};

  void validate() const {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
      throw PreconditionError("alpha must lie in (0, 1]");
    }
    if (!is_finite(beta)) throw PreconditionError("beta must be finite");
  }
};

enum class Method { series, compensated_series, contour };

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::series: return "series";
    case Method::compensated_series: return "compensated-series";
    case Method::contour: return "contour";
  }
  return "unknown";
}

struct EvalResult {
  Complex value;
  double err_estimate = 0.0;
  Method method = Method::series;
  int terms_or_panels = 0;
};

/// plain: double-precision terms, compensated accumulation.
/// compensated: terms and sum carried in extended precision sized to the
/// observed cancellation, so the result is accurate to working precision.
enum class SeriesMode { plain, compensated };

inline constexpr int kDefaultTermCap = 10000;

namespace detail {

inline double falling_factorial(int k, int l) {
  double f = 1.0;
  for (int j = 0; j < l; ++j) f *= static_cast<double>(k - j);
  return f;
}

// Sum_{k >= l} k!/(k-l)! z^(k-l) / Gamma(alpha k + beta) in doubles.
inline EvalResult plain_series_sum(const MLParams& p, Complex z, int l,
                                   double tol, int term_cap) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (z == Complex{0.0, 0.0}) {
    const Complex v = falling_factorial(l, l) * recip_gamma(p.alpha * l + p.beta);
    return {v, eps * std::abs(v), Method::series, 1};
  }
  const Complex log_z = principal_log(z);

  CompensatedAccumulator acc;
  double rounding = 0.0;  // accumulated per-term rounding bound
  double prev_mag = -1.0;
  bool past_peak = false;
  Complex power{1.0, 0.0};  // z^(k-l) while it stays representable
  bool power_valid = true;

  for (int k = l; k < l + term_cap; ++k) {
    const int n = k - l;
    if (n > 0 && power_valid) {
      power *= z;
      if (!is_finite(power) || std::abs(power) > 1e290) power_valid = false;
    }
    const double ff = falling_factorial(k, l);
    const Complex x = p.alpha * k + p.beta;
    Complex term;
    double term_err_factor;
    if (power_valid && x.real() < 170.0 && ff < 1e290) {
      term = ff * power * recip_gamma(x);
      term_err_factor = 3.0 + std::sqrt(static_cast<double>(n));
    } else {
      const Complex log_rg = log_recip_gamma(x);
      if (std::isinf(log_rg.real())) {
        term = 0.0;
        term_err_factor = 0.0;
      } else {
        const Complex exponent = std::log(ff) + static_cast<double>(n) * log_z + log_rg;
        term = std::exp(exponent);
        term_err_factor = 3.0 + std::abs(exponent);
      }
    }
    if (!is_finite(term)) {
      throw EvaluationError("series: term overflow at k = " + std::to_string(k));
    }
    acc.add(term);
    const double mag = std::abs(term);
    rounding += term_err_factor * eps * mag;

    if (mag == 0.0) continue;  // pole of Gamma: says nothing about decay
    if (prev_mag >= 0.0 && mag < prev_mag) past_peak = true;
    if (past_peak && prev_mag > 0.0) {
      const double ratio = mag / prev_mag;
      if (ratio < 1.0) {
        const double tail = mag * ratio / (1.0 - ratio);
        const double scale = std::max(std::abs(acc.value()), std::numeric_limits<double>::min());
        if (mag + tail <= tol * scale) {
          const Complex value = acc.value();
          return {value, eps * std::abs(value) + rounding + tail, Method::series,
                  n + 1};
        }
      }
    }
    prev_mag = mag;
  }
  throw ConvergenceError("series: term cap reached without convergence",
                         acc.value(), std::numeric_limits<double>::infinity());
}

// Natural log of the largest term magnitude and its index, scanning in
// doubles. Used to size the extended precision.
inline std::pair<double, int> peak_log_term(const MLParams& p, Complex z, int l,
                                            int term_cap) {
  const double log_abs_z = std::log(std::abs(z));
  double best = -std::numeric_limits<double>::infinity();
  int best_k = l;
  double prev = -std::numeric_limits<double>::infinity();
  for (int k = l; k < l + term_cap; ++k) {
    const double log_ff = std::lgamma(k + 1.0) - std::lgamma(k - l + 1.0);
    const double lrg = log_recip_gamma(p.alpha * k + p.beta).real();
    if (std::isinf(lrg)) continue;
    const double v = log_ff + (k - l) * log_abs_z + lrg;
    if (v > best) {
      best = v;
      best_k = k;
    }
    // Beyond the peak the log-terms are concave; stop once far below it.
    if (k > best_k + 8 && v < prev && v < best - 200.0) break;
    prev = v;
  }
  return {best, best_k};
}

inline double log2_abs(const MpReal& x) {
  if (x.is_zero()) return -std::numeric_limits<double>::infinity();
  long e = 0;
  const double m = mpfr_get_d_2exp(&e, x.get(), MPFR_RNDN);
  return std::log2(std::fabs(m)) + static_cast<double>(e);
}

inline double log2_abs(const MpComplex& z) {
  const double a = log2_abs(z.re);
  const double b = log2_abs(z.im);
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  if (std::isinf(hi)) return hi;
  return hi + 0.5 * std::log2(1.0 + std::exp2(2.0 * (lo - hi)));
}

inline EvalResult mp_series_sum_at(const MLParams& p, Complex z, int l,
                                   double tol, int term_cap, mpfr_prec_t prec) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const bool real_beta = p.beta.imag() == 0.0;
  MpReal scratch(prec);
  MpComplex zz(prec, z);
  MpComplex power(prec);  // z^(k-l)
  mpfr_set_ui(power.re.get(), 1, MPFR_RNDN);
  MpReal ff(prec);  // k!/(k-l)!
  mpfr_fac_ui(ff.get(), static_cast<unsigned long>(l), MPFR_RNDN);
  MpComplex sum(prec), term(prec), tmp(prec), rg(prec);
  MpReal x(prec);
  MpComplex w(prec);
  std::optional<MpComplexGamma> complex_gamma;
  if (!real_beta) complex_gamma.emplace(prec);

  const double target = std::min(tol, 0x1p-60);
  long max_exp = -(1L << 40);
  long prev_exp = 0;
  bool have_prev = false;
  bool past_peak = false;
  double prev_mag = 0.0;

  for (int k = l; k < l + term_cap; ++k) {
    if (k > l) {
      mul(tmp, power, zz, scratch);
      std::swap(power, tmp);
      mpfr_mul_ui(ff.get(), ff.get(), static_cast<unsigned long>(k), MPFR_RNDN);
      mpfr_div_ui(ff.get(), ff.get(), static_cast<unsigned long>(k - l), MPFR_RNDN);
    }
    // x = alpha k + beta, exact for double alpha and beta at this precision.
    mpfr_set_d(x.get(), p.alpha, MPFR_RNDN);
    mpfr_mul_ui(x.get(), x.get(), static_cast<unsigned long>(k), MPFR_RNDN);
    mpfr_add_d(x.get(), x.get(), p.beta.real(), MPFR_RNDN);
    bool zero_term = false;
    if (real_beta) {
      if (mpfr_integer_p(x.get()) && mpfr_sgn(x.get()) <= 0) {
        zero_term = true;
      } else {
        mpfr_gamma(rg.re.get(), x.get(), MPFR_RNDN);
        mpfr_ui_div(rg.re.get(), 1, rg.re.get(), MPFR_RNDN);
        mpfr_set_zero(rg.im.get(), 1);
      }
    } else {
      mpfr_set(w.re.get(), x.get(), MPFR_RNDN);
      mpfr_set_d(w.im.get(), p.beta.imag(), MPFR_RNDN);
      complex_gamma->recip_gamma(rg, w);
    }
    if (zero_term) continue;
    mul(term, power, rg, scratch);
    mpfr_mul(term.re.get(), term.re.get(), ff.get(), MPFR_RNDN);
    mpfr_mul(term.im.get(), term.im.get(), ff.get(), MPFR_RNDN);
    mpfr_add(sum.re.get(), sum.re.get(), term.re.get(), MPFR_RNDN);
    mpfr_add(sum.im.get(), sum.im.get(), term.im.get(), MPFR_RNDN);

    const long e = term.exponent();
    max_exp = std::max(max_exp, e);
    if (have_prev && e < prev_exp) past_peak = true;
    if (past_peak && !sum.is_zero()) {
      const double mag = std::exp2(std::clamp(log2_abs(term) - log2_abs(sum), -3000.0, 3000.0));
      if (prev_mag > 0.0) {
        const double ratio = mag / prev_mag;
        if (ratio < 1.0) {
          const double tail = mag * ratio / (1.0 - ratio);
          if (mag + tail <= target) {
            const Complex value = sum.to_complex();
            const double abs_value = std::abs(value);
            // Rounding in the extended sum: ~ terms * max|term| * 2^-prec.
            const double rounding =
                (k - l + 1) * 4.0 *
                std::exp2(std::clamp(static_cast<double>(max_exp - prec), -2000.0, 2000.0));
            return {value, eps * abs_value + rounding + tail * abs_value,
                    Method::compensated_series, k - l + 1};
          }
        }
      }
      prev_mag = mag;
    }
    prev_exp = e;
    have_prev = true;
  }
  throw ConvergenceError("compensated series: term cap reached", sum.to_complex(),
                         std::numeric_limits<double>::infinity());
}

inline EvalResult mp_series_sum(const MLParams& p, Complex z, int l, double tol,
                                int term_cap) {
  if (z == Complex{0.0, 0.0}) {
    EvalResult r = plain_series_sum(p, z, l, tol, term_cap);
    r.method = Method::compensated_series;
    return r;
  }
  const auto [peak_log, peak_k] = peak_log_term(p, z, l, term_cap);
  if (peak_k >= l + term_cap - 1) {
    throw ConvergenceError("compensated series: largest term lies beyond the term cap",
                           {}, std::numeric_limits<double>::infinity());
  }
  const double peak_bits = std::max(0.0, peak_log / std::log(2.0));
  mpfr_prec_t prec = static_cast<mpfr_prec_t>(peak_bits) + 128;
  for (int attempt = 0; attempt < 4; ++attempt) {
    EvalResult r = mp_series_sum_at(p, z, l, tol, term_cap, prec);
    const double abs_value = std::abs(r.value);
    // Bits lost to cancellation between the largest term and the result.
    const double lost = abs_value > 0.0 ? peak_bits - std::log2(abs_value) : 0.0;
    const mpfr_prec_t needed = static_cast<mpfr_prec_t>(std::max(0.0, lost)) + 53 + 48;
    if (needed <= prec || abs_value == 0.0) return r;
    prec = needed + 32;
  }
  return mp_series_sum_at(p, z, l, tol, term_cap, prec);
}

}  // namespace detail

/// E_{alpha,beta}(z) by its power series sum z^k / Gamma(alpha k + beta).
/// Summation stops once the current term and a geometric bound on the tail
/// fall below tol relative to the partial sum. err_estimate accounts for
/// term rounding amplified by cancellation, so a large value signals
/// degraded precision.
inline EvalResult ml_series(const MLParams& p, Complex z, double tol,
                            SeriesMode mode = SeriesMode::plain,
                            int term_cap = kDefaultTermCap) {
  p.validate();
  if (!(tol > 0.0)) throw PreconditionError("ml_series: tol must be positive");
  if (mode == SeriesMode::compensated) {
    return detail::mp_series_sum(p, z, 0, tol, term_cap);
  }
  return detail::plain_series_sum(p, z, 0, tol, term_cap);
}

/// d^l/d lambda^l E_{alpha,beta}(lambda t^alpha) by term-wise
/// differentiation: sum_{k >= l} k!/(k-l)! lambda^(k-l) t^(alpha k) /
/// Gamma(alpha k + beta). For l = 0 this is ml_series at lambda t^alpha.
inline EvalResult ml_series_deriv(const MLParams& p, Complex lambda, double t,
                                  int l, double tol,
                                  SeriesMode mode = SeriesMode::plain,
                                  int term_cap = kDefaultTermCap) {
  p.validate();
  if (!(t >= 0.0)) throw PreconditionError("ml_series_deriv: t must be >= 0");
  if (l < 0) throw PreconditionError("ml_series_deriv: l must be >= 0");
  const double tau = std::pow(t, p.alpha);
  const Complex z = lambda * tau;
  if (l == 0) return ml_series(p, z, tol, mode, term_cap);
  if (!(tol > 0.0)) throw PreconditionError("ml_series_deriv: tol must be positive");
  EvalResult r = mode == SeriesMode::compensated
                     ? detail::mp_series_sum(p, z, l, tol, term_cap)
                     : detail::plain_series_sum(p, z, l, tol, term_cap);
  const double scale = std::pow(tau, l);
  r.value *= scale;
  r.err_estimate *= scale;
  return r;
}

}  // namespace mlfunc

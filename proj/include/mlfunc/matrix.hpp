#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "mlfunc/bounds.hpp"
#include "mlfunc/eval.hpp"

namespace mlfunc {

using MatrixC = Eigen::MatrixXcd;

struct JordanBlock {
  Complex lambda;
  int size = 1;
};

/// A = T diag(J_1, ..., J_s) T^-1 with J_i the Jordan block of lambda_i.
/// Without a transform, A is the block-diagonal matrix itself.
struct JordanSpec {
  std::vector<JordanBlock> blocks;
  std::optional<MatrixC> transform;
  std::optional<MatrixC> transform_inv;

  int dimension() const {
    int d = 0;
    for (const auto& b : blocks) d += b.size;
    return d;
  }

  void validate() const {
    if (blocks.empty()) throw PreconditionError("jordan spec: no blocks");
    for (const auto& b : blocks) {
      if (b.size < 1) throw PreconditionError("jordan spec: block sizes must be >= 1");
      if (!is_finite(b.lambda)) throw PreconditionError("jordan spec: non-finite eigenvalue");
    }
    if (transform.has_value() != transform_inv.has_value()) {
      throw PreconditionError("jordan spec: transform and inverse must be given together");
    }
    if (transform) {
      const int d = dimension();
      if (transform->rows() != d || transform->cols() != d || transform_inv->rows() != d ||
          transform_inv->cols() != d) {
        throw PreconditionError("jordan spec: transform must be square of the block dimension");
      }
      const double defect =
          ((*transform) * (*transform_inv) - MatrixC::Identity(d, d)).cwiseAbs().maxCoeff();
      if (!(defect <= 1e-10)) {
        throw PreconditionError("jordan spec: T * T^-1 differs from the identity by " +
                                std::to_string(defect));
      }
    }
  }
};

inline double spectral_norm(const MatrixC& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<MatrixC> svd(m);
  return svd.singularValues()(0);
}

inline double max_row_sum_norm(const MatrixC& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().rowwise().sum().maxCoeff();
}

inline double condition_number(const MatrixC& m) {
  Eigen::JacobiSVD<MatrixC> svd(m);
  const auto& s = svd.singularValues();
  const double lo = s(s.size() - 1);
  return lo > 0.0 ? s(0) / lo : std::numeric_limits<double>::infinity();
}

/// All-1x1 spec from a diagonalizable matrix. Rejects eigenvector bases
/// whose condition number reaches max_condition.
inline JordanSpec jordan_spec_from_matrix(const MatrixC& a, double max_condition = 1e8) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw PreconditionError("jordan_spec_from_matrix: matrix must be square and nonempty");
  }
  Eigen::ComplexEigenSolver<MatrixC> solver(a);
  if (solver.info() != Eigen::Success) {
    throw EvaluationError("jordan_spec_from_matrix: eigen-decomposition failed");
  }
  const MatrixC v = solver.eigenvectors();
  const double cond = condition_number(v);
  if (!(cond < max_condition)) {
    throw PreconditionError("jordan_spec_from_matrix: eigenvector condition " +
                            std::to_string(cond) + " too large; supply a Jordan spec");
  }
  JordanSpec spec;
  for (Eigen::Index i = 0; i < a.rows(); ++i) spec.blocks.push_back({solver.eigenvalues()(i), 1});
  spec.transform = v;
  spec.transform_inv = v.inverse();
  return spec;
}

struct SpectralReport {
  std::vector<Complex> eigenvalues;
  /// min_i (|arg lambda_i| - alpha pi/2).
  double sector_margin = 0.0;
  bool has_zero_eigenvalue = false;
  bool satisfied = false;
};

/// All eigenvalues nonzero with |arg lambda| > alpha pi/2.
inline SpectralReport spectral_condition(const JordanSpec& spec, double alpha) {
  SpectralReport r;
  r.sector_margin = std::numeric_limits<double>::infinity();
  for (const auto& b : spec.blocks) {
    r.eigenvalues.push_back(b.lambda);
    if (b.lambda == Complex{0.0, 0.0}) {
      r.has_zero_eigenvalue = true;
      r.sector_margin = std::min(r.sector_margin, -0.5 * alpha * kPi);
      continue;
    }
    r.sector_margin =
        std::min(r.sector_margin, std::fabs(principal_arg(b.lambda)) - 0.5 * alpha * kPi);
  }
  r.satisfied = !r.eigenvalues.empty() && !r.has_zero_eigenvalue && r.sector_margin > 0.0;
  return r;
}

namespace detail {

struct MatrixWithError {
  MatrixC value;
  double error = 0.0;
};

inline MatrixWithError jordan_block_impl(const MLParams& p, Complex lambda, int size, double t,
                                         const EvalControls& controls) {
  if (size < 1) throw PreconditionError("ml_jordan_block: size must be >= 1");
  if (!(t >= 0.0)) throw PreconditionError("ml_jordan_block: t must be >= 0");
  MatrixWithError out{MatrixC::Zero(size, size), 0.0};
  for (int j = 0; j < size; ++j) {
    const EvalResult r = ml_deriv_eval(p, lambda, t, j, controls);
    const double f = factorial(j);
    const Complex entry = r.value / f;
    for (int row = 0; row + j < size; ++row) out.value(row, row + j) = entry;
    out.error += (size - j) * r.err_estimate / f;
  }
  return out;
}

}  // namespace detail

/// E_{alpha,beta}(J t^alpha) for the Jordan block J of lambda: upper
/// triangular Toeplitz with j-th superdiagonal (1/j!) d^j/d lambda^j
/// E_{alpha,beta}(lambda t^alpha).
inline MatrixC ml_jordan_block(const MLParams& p, Complex lambda, int size, double t,
                               const EvalControls& controls = {}) {
  return detail::jordan_block_impl(p, lambda, size, t, controls).value;
}

struct MatrixResult {
  MatrixC value;
  /// Sum of entry error estimates, scaled by cond(T).
  double err_estimate = 0.0;
  double condition = 1.0;
  std::optional<std::string> warning;
};

inline MatrixResult ml_matrix(const MLParams& p, const JordanSpec& spec, double t,
                              const EvalControls& controls = {}) {
  spec.validate();
  if (!(t >= 0.0)) throw PreconditionError("ml_matrix: t must be >= 0");
  const int d = spec.dimension();
  MatrixResult out;
  out.value = MatrixC::Zero(d, d);
  int offset = 0;
  for (const auto& b : spec.blocks) {
    const auto blk = detail::jordan_block_impl(p, b.lambda, b.size, t, controls);
    out.value.block(offset, offset, b.size, b.size) = blk.value;
    out.err_estimate += blk.error;
    offset += b.size;
  }
  if (spec.transform) {
    out.condition = condition_number(*spec.transform);
    out.value = (*spec.transform) * out.value * (*spec.transform_inv);
    out.err_estimate *= out.condition;
    if (out.condition > 1e12) {
      out.warning = "ill-conditioned transform: cond(T) = " + std::to_string(out.condition);
    }
  }
  return out;
}

namespace detail {

inline void require_spectral(const JordanSpec& spec, double alpha, std::string_view who) {
  spec.validate();
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw PreconditionError(std::string(who) + ": alpha must lie in (0, 1)");
  }
  const SpectralReport r = spectral_condition(spec, alpha);
  if (!r.satisfied) {
    throw PreconditionError(std::string(who) +
                            ": spectral hypothesis |arg lambda| > alpha pi/2, lambda != 0 "
                            "violated");
  }
}

}  // namespace detail

struct DecayRow {
  double t = 0.0;
  double spectral_norm = 0.0;
  double row_sum_norm = 0.0;
  double error = 0.0;
  double bound = 0.0;
};

struct DecayReport {
  double t0 = 0.0;
  double condition = 1.0;
  /// C in ||E_alpha(t^alpha A)|| <= C / t^alpha for t >= t0.
  double bound_constant = 0.0;
  std::vector<DecayRow> rows;
  double tail_exponent = 0.0;
  /// On t >= 10 t0: nonincreasing up to error estimates, and strictly.
  bool tail_nonincreasing = true;
  bool tail_strictly_decreasing = true;
  bool bound_holds = true;
  double final_norm = 0.0;
};

/// Largest onset time over the blocks, each with its default sector context.
inline double spec_onset_time(const JordanSpec& spec, double alpha) {
  double t0 = 0.0;
  for (const auto& b : spec.blocks) {
    t0 = std::max(t0, onset_time(default_sector_context(alpha, b.lambda)));
  }
  return t0;
}

/// ||E_alpha(t^alpha A)|| over a grid reaching at least 100 t0, with a
/// fitted tail exponent and the block-wise bound sum_j M_j/(j! t^alpha).
inline DecayReport decay_check(double alpha, const JordanSpec& spec, std::span<const double> grid,
                               const EvalControls& controls = {}) {
  detail::require_spectral(spec, alpha, "decay_check");
  DecayReport rep;
  rep.t0 = spec_onset_time(spec, alpha);
  if (grid.empty()) throw PreconditionError("decay_check: empty t grid");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw PreconditionError("decay_check: t grid must increase");
  }
  if (!(grid.front() >= 0.0)) throw PreconditionError("decay_check: t must be >= 0");
  if (!(grid.back() >= 100.0 * rep.t0)) {
    throw PreconditionError("decay_check: grid must reach 100 t0 = " +
                            std::to_string(100.0 * rep.t0));
  }
  double block_max = 0.0;
  for (const auto& b : spec.blocks) {
    const SectorContext ctx = default_sector_context(alpha, b.lambda);
    const KappaIntegrals kappa = kappa_integrals(alpha, ctx.theta, controls.quadrature);
    double sum = 0.0;
    for (int j = 0; j < b.size; ++j) {
      sum += detail::lemma4_from_kappa(ctx, j, kappa).M / detail::factorial(j);
    }
    block_max = std::max(block_max, sum);
  }
  const MLParams p{alpha, 1.0};
  std::vector<double> ts, norms;
  for (double t : grid) {
    const MatrixResult m = ml_matrix(p, spec, t, controls);
    rep.condition = m.condition;
    DecayRow row;
    row.t = t;
    row.spectral_norm = spectral_norm(m.value);
    row.row_sum_norm = max_row_sum_norm(m.value);
    row.error = m.err_estimate;
    rep.rows.push_back(row);
    ts.push_back(t);
    norms.push_back(row.spectral_norm);
  }
  rep.bound_constant = block_max * rep.condition;
  for (auto& row : rep.rows) {
    if (row.t < rep.t0 || row.t == 0.0) continue;
    row.bound = rep.bound_constant / std::pow(row.t, alpha);
    if (row.spectral_norm - row.error > row.bound) rep.bound_holds = false;
  }
  const DecayRow* prev = nullptr;
  for (const auto& row : rep.rows) {
    if (row.t < 10.0 * rep.t0) continue;
    if (prev) {
      if (!(row.spectral_norm < prev->spectral_norm)) rep.tail_strictly_decreasing = false;
      if (row.spectral_norm > prev->spectral_norm + prev->error + row.error) {
        rep.tail_nonincreasing = false;
      }
    }
    prev = &row;
  }
  rep.tail_exponent = grid.back() >= 10.0 * grid.front() && grid.front() > 0.0
                          ? fit_tail_exponent(ts, norms)
                          : std::numeric_limits<double>::quiet_NaN();
  rep.final_norm = rep.rows.back().spectral_norm;
  return rep;
}

struct IntegralReport {
  double t_max = 0.0;
  double t0 = 0.0;
  double condition = 1.0;
  /// Integral over [0, min(t0, t_max)], where tau^(alpha-1) is singular.
  double near_zero_part = 0.0;
  /// Integral over [0, t_max].
  double numeric_part = 0.0;
  double numeric_error = 0.0;
  /// cond(T) sum_blocks sum_l Mhat_l / (l! alpha t_max^alpha).
  double tail_bound = 0.0;
  bool tail_valid = false;
  double total_bound = 0.0;
  bool finite = false;
};

/// int_0^inf tau^(alpha-1) ||E_{alpha,alpha}(tau^alpha A)|| d tau split into
/// a quadrature over [0, t_max] (in v = tau^alpha, which removes the
/// endpoint singularity) and an analytic tail bound beyond t_max.
inline IntegralReport integral_check(double alpha, const JordanSpec& spec, double t_max,
                                     const EvalControls& controls = {}) {
  detail::require_spectral(spec, alpha, "integral_check");
  if (!(t_max > 0.0) || !std::isfinite(t_max)) {
    throw PreconditionError("integral_check: t_max must be positive and finite");
  }
  IntegralReport rep;
  rep.t_max = t_max;
  rep.t0 = spec_onset_time(spec, alpha);
  const MLParams p{alpha, alpha};
  double cond = 1.0;
  auto integrand = [&](double v) {
    const MatrixResult m = ml_matrix(p, spec, std::pow(v, 1.0 / alpha), controls);
    cond = m.condition;
    return Complex(spectral_norm(m.value) / alpha);
  };
  QuadratureControls q = controls.quadrature;
  q.rel_tol = std::max(q.rel_tol, 1e-9);
  const double split = std::pow(std::min(rep.t0, t_max), alpha);
  const double top = std::pow(t_max, alpha);
  const QuadratureResult near = integrate_interval(integrand, 0.0, split, q);
  rep.near_zero_part = near.value.real();
  rep.numeric_part = rep.near_zero_part;
  rep.numeric_error = near.error;
  if (top > split) {
    const QuadratureResult far = integrate_interval(integrand, split, top, q);
    rep.numeric_part += far.value.real();
    rep.numeric_error += far.error;
  }
  rep.condition = cond;
  for (const auto& b : spec.blocks) {
    const SectorContext ctx = default_sector_context(alpha, b.lambda);
    const KappaIntegrals kappa = kappa_integrals(alpha, ctx.theta, controls.quadrature);
    for (int l = 0; l < b.size; ++l) {
      rep.tail_bound += detail::lemma4_from_kappa(ctx, l, kappa).Mhat / detail::factorial(l);
    }
  }
  rep.tail_bound *= rep.condition / (alpha * std::pow(t_max, alpha));
  rep.tail_valid = t_max >= rep.t0;
  rep.total_bound = rep.numeric_part + rep.numeric_error + rep.tail_bound;
  rep.finite = std::isfinite(rep.total_bound);
  return rep;
}

}  // namespace mlfunc

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "mlfunc/compensated.hpp"
#include "mlfunc/complex.hpp"
#include "mlfunc/errors.hpp"

namespace mlfunc {

struct QuadratureControls {
  double rel_tol = 1e-12;
  double abs_tol = 1e-14;
  int max_panels = 4096;
  /// Open tails are cut where |integrand| < truncation_drop * peak.
  double truncation_drop = 1e-18;

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) {
      throw PreconditionError("quadrature tolerances must be positive");
    }
    if (max_panels < 1) throw PreconditionError("max_panels must be >= 1");
    if (!(truncation_drop > 0.0 && truncation_drop < 1.0)) {
      throw PreconditionError("truncation_drop must lie in (0, 1)");
    }
  }
};

struct QuadratureResult {
  Complex value;
  double error = 0.0;
  int panels = 0;
};

/// One smooth piece of an integration path, zeta = point(s) for s in
/// [begin, end]. An infinite `end` marks an open tail that is truncated
/// once the integrand has decayed; `tail_hint` seeds that search.
/// orientation = -1 traverses the piece from `end` back to `begin`.
struct PathSegment {
  std::function<Complex(double)> point;
  std::function<Complex(double)> tangent;
  double begin = 0.0;
  double end = 1.0;
  double orientation = 1.0;
  double tail_hint = 0.0;
};

/// Straight segment from a to b parametrized over [0, 1].
inline PathSegment line_segment(Complex a, Complex b) {
  return {[a, b](double s) { return a + s * (b - a); },
          [a, b](double) { return b - a; }, 0.0, 1.0, 1.0, 0.0};
}

/// Ray {start + s * direction : s >= 0}, direction of unit modulus.
inline PathSegment ray(Complex start, Complex direction, double tail_hint) {
  return {[start, direction](double s) { return start + s * direction; },
          [direction](double) { return direction; },
          0.0,
          std::numeric_limits<double>::infinity(),
          1.0,
          tail_hint};
}

/// Circular arc of the given radius, angle from phi_begin to phi_end.
inline PathSegment arc(double radius, double phi_begin, double phi_end) {
  return {[radius](double phi) { return std::polar(radius, phi); },
          [radius](double phi) {
            return Complex{0.0, 1.0} * std::polar(radius, phi);
          },
          phi_begin, phi_end, 1.0, 0.0};
}

namespace detail {

// Gauss-Kronrod 7/15 nodes and weights (QUADPACK qk15).
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

using ParamIntegrand = std::function<Complex(double)>;

struct Panel {
  double a = 0.0;
  double b = 0.0;
  std::size_t piece = 0;
  Complex value;
  double error = 0.0;
  double resabs = 0.0;

  bool operator<(const Panel& other) const { return error < other.error; }
};

inline void check_finite(Complex v, double s) {
  if (!is_finite(v)) {
    throw Error("quadrature: non-finite integrand value at parameter " +
                std::to_string(s));
  }
}

inline Panel gauss_kronrod(const ParamIntegrand& g, double a, double b,
                           std::size_t piece) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const Complex fc = g(center);
  check_finite(fc, center);
  Complex kronrod = fc * kKronrodWeights[7];
  Complex gauss = fc * kGaussWeights[3];
  double resabs = std::abs(fc) * kKronrodWeights[7];
  std::array<Complex, 7> f1{}, f2{};
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    f1[j] = g(center - dx);
    f2[j] = g(center + dx);
    check_finite(f1[j], center - dx);
    check_finite(f2[j], center + dx);
    kronrod += kKronrodWeights[j] * (f1[j] + f2[j]);
    resabs += kKronrodWeights[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * (f1[j] + f2[j]);
  }
  const Complex mean = 0.5 * kronrod;
  double resasc = kKronrodWeights[7] * std::abs(fc - mean);
  for (std::size_t j = 0; j < 7; ++j) {
    resasc += kKronrodWeights[j] *
              (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
  }
  const double scale = std::fabs(half);
  resasc *= scale;
  resabs *= scale;
  double err = std::abs((kronrod - gauss) * half);
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) {
    err = std::max(50.0 * eps * resabs, err);
  }
  return {a, b, piece, kronrod * half, err, resabs};
}

/// Smallest b (on a geometric search from the hint) past which the
/// integrand stays below drop * peak.
inline double truncate_tail(const ParamIntegrand& g, double begin,
                            double hint, double drop) {
  double b = std::max(hint, begin + 1.0);
  double peak = 0.0;
  constexpr int kSamples = 64;
  for (int i = 0; i <= kSamples; ++i) {
    peak = std::max(peak, std::abs(g(begin + (b - begin) * i / kSamples)));
  }
  for (int iter = 0; iter < 200; ++iter) {
    const double far = begin + 1.25 * (b - begin);
    const double gb = std::abs(g(b));
    const double gf = std::abs(g(far));
    if (std::isfinite(gb)) peak = std::max(peak, gb);
    if (peak == 0.0) return b;
    if (gb <= drop * peak && gf <= drop * peak) return b;
    b = begin + 1.5 * (b - begin);
  }
  throw ConvergenceError("quadrature: open tail does not decay", {}, 0.0);
}

struct PieceSpec {
  ParamIntegrand g;
  double begin;
  double end;
};

inline QuadratureResult integrate_pieces(std::span<const PieceSpec> pieces,
                                         const QuadratureControls& controls) {
  controls.validate();
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr int kInitialPanels = 8;

  std::priority_queue<Panel> heap;
  int panels = 0;
  for (std::size_t p = 0; p < pieces.size(); ++p) {
    const auto& piece = pieces[p];
    if (piece.begin == piece.end) continue;
    const double h = (piece.end - piece.begin) / kInitialPanels;
    for (int i = 0; i < kInitialPanels; ++i) {
      const double a = piece.begin + i * h;
      const double b = (i + 1 == kInitialPanels) ? piece.end : a + h;
      heap.push(gauss_kronrod(piece.g, a, b, p));
      ++panels;
    }
  }

  auto totals = [&heap]() {
    // Sum over a copy so the heap keeps its order.
    auto copy = heap;
    CompensatedAccumulator value;
    double error = 0.0;
    double resabs = 0.0;
    while (!copy.empty()) {
      value += copy.top().value;
      error += copy.top().error;
      resabs += copy.top().resabs;
      copy.pop();
    }
    return std::tuple{value.value(), error, resabs};
  };

  // Running totals are updated incrementally; recomputed exactly at the end.
  auto [value, error, resabs] = totals();
  while (!heap.empty()) {
    // Panel errors never fall below 50 eps resabs; leave headroom above it.
    const double floor = 100.0 * eps * resabs;
    const double tol =
        std::max({controls.abs_tol, controls.rel_tol * std::abs(value), floor});
    if (error <= tol) break;
    if (panels + 1 > controls.max_panels) {
      auto [v, e, r] = totals();
      throw ConvergenceError("quadrature: panel budget exhausted", v, e);
    }
    Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      // Panel can no longer be split in floating point.
      heap.push(worst);
      break;
    }
    const auto& g = pieces[worst.piece].g;
    Panel left = gauss_kronrod(g, worst.a, mid, worst.piece);
    Panel right = gauss_kronrod(g, mid, worst.b, worst.piece);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    resabs += left.resabs + right.resabs - worst.resabs;
    heap.push(left);
    heap.push(right);
    ++panels;
  }
  auto [v, e, r] = totals();
  return {v, std::max(e, 50.0 * eps * r), panels};
}

}  // namespace detail

/// Integral of f(zeta) d zeta along a piecewise path, by globally adaptive
/// Gauss-Kronrod panels. Throws ConvergenceError (carrying the best
/// estimate) when the panel budget is exhausted.
template <class F>
QuadratureResult integrate_path(F&& f, std::span<const PathSegment> path,
                                const QuadratureControls& controls) {
  std::vector<detail::PieceSpec> pieces;
  pieces.reserve(path.size());
  for (const auto& seg : path) {
    detail::ParamIntegrand g = [&f, &seg](double s) {
      return seg.orientation * f(seg.point(s)) * seg.tangent(s);
    };
    double end = seg.end;
    if (std::isinf(end)) {
      end = detail::truncate_tail(g, seg.begin, seg.tail_hint,
                                  controls.truncation_drop);
    }
    pieces.push_back({std::move(g), seg.begin, end});
  }
  return detail::integrate_pieces(pieces, controls);
}

/// Integral of f(zeta) |d zeta| (arc-length measure) along a path.
template <class F>
QuadratureResult integrate_path_arclength(F&& f,
                                          std::span<const PathSegment> path,
                                          const QuadratureControls& controls) {
  std::vector<detail::PieceSpec> pieces;
  pieces.reserve(path.size());
  for (const auto& seg : path) {
    detail::ParamIntegrand g = [&f, &seg](double s) {
      return Complex(f(seg.point(s))) * std::abs(seg.tangent(s));
    };
    double end = seg.end;
    if (std::isinf(end)) {
      end = detail::truncate_tail(g, seg.begin, seg.tail_hint,
                                  controls.truncation_drop);
    }
    pieces.push_back({std::move(g), seg.begin, end});
  }
  return detail::integrate_pieces(pieces, controls);
}

/// Integral of a complex function of a real variable over [a, b]; b may be
/// +inf for an integrand that decays.
template <class F>
QuadratureResult integrate_interval(F&& f, double a, double b,
                                    const QuadratureControls& controls,
                                    double tail_hint = 0.0) {
  const PathSegment seg{[](double s) { return Complex{s, 0.0}; },
                        [](double) { return Complex{1.0, 0.0}; },
                        a,
                        b,
                        1.0,
                        tail_hint};
  return integrate_path([&f](Complex s) { return Complex(f(s.real())); },
                        std::span<const PathSegment>(&seg, 1), controls);
}

}  // namespace mlfunc

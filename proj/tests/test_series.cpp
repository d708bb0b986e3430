#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mlfunc/eval.hpp"
#include "mlfunc/gamma.hpp"
#include "mlfunc/series.hpp"
#include "oracles.hpp"

using namespace mlfunc;

namespace {

double rel(Complex a, Complex b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST(MlSeries, Exponential) {
  const EvalResult r = ml_series({1.0, 1.0}, 1.0, 1e-16);
  EXPECT_NEAR(r.value.real(), std::numbers::e, 4e-16);
  EXPECT_EQ(r.method, Method::series);
  EXPECT_GE(r.err_estimate, 0.0);
}

TEST(MlSeries, ValueAtOrigin) {
  EXPECT_EQ(ml_series({0.7, 1.0}, 0.0, 1e-16).value, Complex(1.0));
  for (double a : {0.3, 0.5, 0.7, 0.9}) {
    for (double b : {a, 1.0, 2.0, 3.5}) {
      const EvalResult r = ml_series({a, b}, 0.0, 1e-16);
      EXPECT_NEAR(std::abs(r.value - recip_gamma(b)), 0.0, 1e-15);
    }
  }
  EXPECT_NEAR(std::abs(ml_series({0.5, Complex{1.0, 2.0}}, 0.0, 1e-16).value -
                       recip_gamma(Complex{1.0, 2.0})),
              0.0, 1e-15);
}

TEST(MlSeries, ErfcClosedFormAtOne) {
  const EvalResult r = ml_series({0.5, 1.0}, 1.0, 1e-16);
  EXPECT_LE(rel(r.value, std::numbers::e * std::erfc(-1.0)), 1e-14);
}

TEST(MlSeries, ErfcClosedFormsOnRealLine) {
  for (double x = -20.0; x <= 20.0; x += 0.5) {
    const EvalResult a = ml_eval({0.5, 1.0}, x);
    const EvalResult b = ml_eval({0.5, 0.5}, x);
    EXPECT_LE(rel(a.value, oracle::ml_half(x)), 1e-11) << x;
    const double ref = oracle::ml_half_half(x);
    EXPECT_LE(std::abs(b.value - ref), 1e-11 * std::max(std::fabs(ref), 1e-3)) << x;
  }
}

TEST(MlSeries, ExponentialIdentityGrid) {
  for (int i = 0; i <= 40; ++i) {
    const double x = -5.0 + 0.25 * i;
    EXPECT_LE(rel(ml_eval({1.0, 1.0}, x).value, std::exp(x)), 1e-12) << x;
  }
}

TEST(MlSeries, OneTwoIdentity) {
  for (Complex z : {Complex{1}, Complex{-1}, Complex{0, 1}, Complex{0, -1}, Complex{2.5, -1.5}}) {
    EXPECT_LE(rel(ml_eval({1.0, 2.0}, z).value, oracle::ml_one_two(z)), 1e-12) << z;
  }
}

TEST(MlSeries, NaiveLongDoubleOracleNearOrigin) {
  for (Complex z : {Complex{0.3, -0.4}, Complex{-1.2, 0.1}, Complex{0.9, 0.9}}) {
    for (double a : {0.4, 0.8}) {
      const Complex ref = oracle::naive_series(a, 1.3, z);
      EXPECT_LE(rel(ml_series({a, 1.3}, z, 1e-16).value, ref), 1e-14);
    }
  }
}

TEST(MlSeries, CompensatedMatchesPlainWhereBothAreAccurate) {
  for (Complex z : {Complex{1.5, 0.5}, Complex{-3.0, 0.0}, Complex{0.0, 3.5}}) {
    const EvalResult p = ml_series({0.8, 1.0}, z, 1e-16, SeriesMode::plain);
    const EvalResult c = ml_series({0.8, 1.0}, z, 1e-16, SeriesMode::compensated);
    EXPECT_EQ(c.method, Method::compensated_series);
    EXPECT_LE(std::abs(p.value - c.value), p.err_estimate + c.err_estimate + 1e-15);
  }
}

TEST(MlSeries, CancellationIsVisibleInErrorEstimate) {
  // Terms reach ~1e40 before cancelling down to ~1e-2.
  const EvalResult p = ml_series({0.5, 1.0}, -10.0, 1e-16, SeriesMode::plain);
  EXPECT_GT(p.err_estimate, 1e-2 * std::abs(p.value));
  const EvalResult c = ml_series({0.5, 1.0}, -10.0, 1e-16, SeriesMode::compensated);
  EXPECT_LE(rel(c.value, oracle::ml_half(-10.0)), 1e-13);
  EXPECT_LE(c.err_estimate, 1e-14 * std::abs(c.value));
}

TEST(MlSeries, TermCapRaises) {
  EXPECT_THROW(ml_series({0.5, 1.0}, 3.0, 1e-16, SeriesMode::plain, 5), ConvergenceError);
  EXPECT_THROW(ml_series({0.5, 1.0}, 3.0, 1e-16, SeriesMode::compensated, 5), ConvergenceError);
}

TEST(MlSeries, Preconditions) {
  EXPECT_THROW(ml_series({0.0, 1.0}, 1.0, 1e-16), PreconditionError);
  EXPECT_THROW(ml_series({1.5, 1.0}, 1.0, 1e-16), PreconditionError);
  EXPECT_THROW(ml_series({0.5, 1.0}, 1.0, 0.0), PreconditionError);
  EXPECT_THROW(ml_series_deriv({0.5, 1.0}, 1.0, -1.0, 1, 1e-16), PreconditionError);
  EXPECT_THROW(ml_series_deriv({0.5, 1.0}, 1.0, 1.0, -1, 1e-16), PreconditionError);
}

TEST(MlSeriesDeriv, ZerothOrderIsTheSeries) {
  for (Complex lambda : {Complex{-1.0, 0.3}, Complex{2.0, 0.0}}) {
    for (double t : {0.0, 0.5, 2.0}) {
      const Complex z = lambda * std::pow(t, 0.7);
      const EvalResult a = ml_series_deriv({0.7, 1.0}, lambda, t, 0, 1e-16);
      const EvalResult b = ml_series({0.7, 1.0}, z, 1e-16);
      EXPECT_EQ(a.value, b.value);
      EXPECT_EQ(a.err_estimate, b.err_estimate);
    }
  }
}

TEST(MlSeriesDeriv, ExponentialCase) {
  const EvalResult r = ml_series_deriv({1.0, 1.0}, 2.0, 1.0, 1, 1e-16);
  EXPECT_NEAR(r.value.real(), std::exp(2.0), 1e-14);
}

TEST(MlSeriesDeriv, AtTimeZeroOnlyTheConstantSurvives) {
  EXPECT_EQ(ml_series_deriv({0.6, 1.0}, -1.0, 0.0, 2, 1e-16).value, Complex(0.0));
  EXPECT_NEAR(ml_series_deriv({0.6, 2.0}, -1.0, 0.0, 0, 1e-16).value.real(), 1.0, 1e-16);
}

TEST(MlSeriesDeriv, MatchesCauchyCircleOracle) {
  const MLParams p{0.8, 1.0};
  auto f = [&](Complex lam) { return ml_series(p, lam, 1e-16).value; };
  const Complex ref = oracle::cauchy_derivative(f, -1.0, 1, 0.25, 64);
  EXPECT_LE(rel(ml_series_deriv(p, -1.0, 1.0, 1, 1e-16).value, ref), 1e-8);
}

TEST(MlSeriesDeriv, CauchyOracleGrid) {
  for (double alpha : {0.5, 0.8}) {
    for (int l : {1, 2}) {
      for (Complex lambda : {Complex{-2.0, 0.0}, Complex{1.0, 1.0}, Complex{0.0, -1.5},
                             Complex{0.5, 0.0}}) {
        for (double t : {0.5, 1.0, 2.0}) {
          const MLParams p{alpha, 1.0};
          const double tau = std::pow(t, alpha);
          auto f = [&](Complex lam) { return ml_series(p, lam * tau, 1e-16).value; };
          const Complex ref = oracle::cauchy_derivative(f, lambda, l, 0.25, 64);
          const Complex got = ml_series_deriv(p, lambda, t, l, 1e-16).value;
          EXPECT_LE(rel(got, ref), 1e-8) << alpha << " " << l << " " << lambda << " " << t;
        }
      }
    }
  }
}

TEST(MlEval, DispatchTags) {
  EXPECT_EQ(ml_eval({0.6, 0.6}, -0.5).method, Method::series);
  EXPECT_EQ(ml_eval({0.6, 1.0}, Complex{0.0, 7.0}).method, Method::compensated_series);
  EXPECT_EQ(ml_eval({0.6, 1.0}, -20.0).method, Method::contour);
  EXPECT_NEAR(ml_eval({1.0, 2.0}, 1.0).value.real(), std::numbers::e - 1.0, 1e-15);
}

TEST(MlEval, ContourBeyondOverlapMatchesCompensatedSeries) {
  const EvalResult c = ml_eval({0.6, 1.0}, -20.0);
  const EvalResult s = ml_series({0.6, 1.0}, -20.0, 1e-16, SeriesMode::compensated);
  EXPECT_LE(rel(c.value, s.value), 1e-8);
}

TEST(MlEval, AlphaOneBeyondSeriesRangeIsUnsupported) {
  EXPECT_THROW(ml_eval({1.0, 1.0}, 20.0), UnsupportedDomainError);
  EXPECT_THROW(ml_deriv_eval({1.0, 1.0}, 20.0, 1.0, 1), UnsupportedDomainError);
}

TEST(MlEval, CostlySeriesPointsUseContour) {
  // alpha = 0.3 at |z| = 12 peaks past term 10000.
  const EvalResult r = ml_eval({0.3, 1.0}, -12.0);
  EXPECT_EQ(r.method, Method::contour);
  EXPECT_TRUE(std::isfinite(std::abs(r.value)));
}

TEST(MlEval, PlainSeriesEscalatesUnderCancellation) {
  const EvalResult r = ml_eval({0.3, 1.0}, -4.0);
  EXPECT_EQ(r.method, Method::compensated_series);
  EXPECT_LE(r.err_estimate, 1e-12 * std::abs(r.value));
}

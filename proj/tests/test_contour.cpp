#include <gtest/gtest.h>

#include <cmath>

#include "mlfunc/contour.hpp"
#include "mlfunc/eval.hpp"
#include "mlfunc/gamma.hpp"
#include "oracles.hpp"
#include "oracles/frozen_values.hpp"

using namespace mlfunc;

namespace {

double rel(Complex a, Complex b) { return std::abs(a - b) / std::abs(b); }

ContourSpec spec(double alpha, double theta, double eps = 1.0) {
  ContourSpec c;
  c.alpha = alpha;
  c.theta = theta;
  c.eps = eps;
  return c;
}

}  // namespace

TEST(ClassifyRegion, Examples) {
  const ContourSpec c = spec(0.6, 0.45 * kPi);
  EXPECT_EQ(classify_region(-5.0, c, 0.1), RegionClass::GMinus);
  EXPECT_EQ(classify_region(5.0, c, 0.1), RegionClass::GPlus);
  EXPECT_EQ(classify_region(0.5, c, 0.01), RegionClass::GMinus);
  EXPECT_EQ(classify_region(std::polar(3.0, 0.45 * kPi), c, 0.1), RegionClass::NearContour);
  EXPECT_EQ(classify_region(1.0, c, 0.05), RegionClass::NearContour);
  EXPECT_THROW(classify_region(0.0, c, 0.1), DomainError);
}

TEST(ClassifyRegion, ConjugateSymmetric) {
  const ContourSpec c = spec(0.7, 0.5 * kPi);
  for (Complex z : {Complex{2, 3}, Complex{-1, 0.2}, Complex{0.3, 0.1}, Complex{4, 5}}) {
    EXPECT_EQ(classify_region(z, c, 0.01), classify_region(std::conj(z), c, 0.01));
  }
}

TEST(ContourSpec, Validation) {
  EXPECT_THROW(spec(0.6, 0.2 * kPi).validate(), PreconditionError);
  EXPECT_THROW(spec(0.6, 0.6 * kPi).validate(), PreconditionError);
  EXPECT_THROW(spec(1.0, 0.75 * kPi).validate(), PreconditionError);
  EXPECT_THROW(spec(0.6, 0.45 * kPi, 0.0).validate(), PreconditionError);
  EXPECT_NO_THROW(spec(0.6, 0.45 * kPi).validate());
}

TEST(ContourIntegral, SpecExampleNegativeAxis) {
  const auto q = eval_contour_integral({0.7, 1.0}, -3.0, spec(0.7, 0.65 * 0.7 * kPi));
  EXPECT_LE(rel(q.value, 0.1378971096650270789), 1e-10);
  const auto h = eval_contour_integral({0.5, 0.5}, -10.0, spec(0.5, 0.375 * kPi));
  EXPECT_LE(rel(h.value, oracle::ml_half_half(-10.0)), 1e-10);
}

TEST(ContourIntegral, GPlusNeedsExplicitTerm) {
  const MLParams p{0.6, 1.0};
  const ContourSpec c = spec(0.6, 0.45 * kPi);
  ASSERT_EQ(classify_region(2.0, c, 0.04), RegionClass::GPlus);
  const Complex v = eval_contour_integral(p, 2.0, c).value + explicit_term(p, 2.0);
  EXPECT_LE(rel(v, 39.692804958505462309), 1e-10);
}

TEST(ContourIntegral, NearContourRaises) {
  const ContourSpec c = spec(0.6, 0.45 * kPi);
  EXPECT_THROW(eval_contour_integral({0.6, 1.0}, std::polar(4.0, 0.45 * kPi), c),
               PoleProximityError);
  EXPECT_THROW(eval_contour_integral({0.5, 1.0}, -3.0, c), PreconditionError);
}

TEST(MlContour, DecayOnNegativeAxis) {
  const auto r = ml_contour({0.6, 1.0}, -15.0, select_contour(0.6, -15.0));
  EXPECT_LE(std::abs(r.value), 1.0);
  EXPECT_GT(r.value.real(), 0.0);
  EXPECT_LE(rel(r.value, 0.030759491256463478842), 1e-10);
}

TEST(MlContour, ExplicitTermDominatesOnPositiveAxis) {
  const MLParams p{0.5, 1.0};
  const auto r = ml_contour(p, 4.0, select_contour(0.5, 4.0));
  EXPECT_LE(rel(r.value, 2.0 * std::exp(16.0)), 1e-3);
  EXPECT_LE(rel(r.value, oracle::ml_half(4.0)), 1e-12);
}

TEST(MlContour, NearContourPointRetriesWithNewTheta) {
  const MLParams p{0.6, 1.0};
  const Complex z = std::polar(6.0, 0.45 * kPi);
  const auto r = ml_contour(p, z, spec(0.6, 0.45 * kPi));
  const auto s = ml_series(p, z, 1e-16, SeriesMode::compensated);
  EXPECT_LE(rel(r.value, s.value), 1e-9);
}

TEST(RecipGammaViaContour, Examples) {
  EXPECT_NEAR(std::abs(recip_gamma_via_contour({0.5, 0.5}, spec(0.5, 0.375 * kPi))), 0.0, 1e-10);
  EXPECT_NEAR(std::abs(recip_gamma_via_contour({0.5, 1.5}, spec(0.5, 0.375 * kPi)) - 1.0), 0.0,
              1e-10);
  EXPECT_NEAR(std::abs(recip_gamma_via_contour({0.7, 0.2}, spec(0.7, 0.525 * kPi)) -
                       (-0.2820947918)),
              0.0, 1e-9);
}

TEST(RecipGammaViaContour, IdentityAcrossParameters) {
  for (double alpha : {0.2, 0.4, 0.6, 0.8, 0.95}) {
    for (Complex beta : {Complex{0.1}, Complex{1.0}, Complex{2.7}, Complex{-0.4}, Complex{1, -2}}) {
      const Complex v = recip_gamma_via_contour({alpha, beta}, spec(alpha, 0.75 * alpha * kPi));
      EXPECT_LE(std::abs(v - recip_gamma(beta - alpha)), 1e-9) << alpha << " " << beta;
    }
  }
}

TEST(RecipGammaViaContour, ReversedOrientationFlipsSign) {
  ContourSpec c = spec(0.5, 0.375 * kPi);
  c.reverse_orientation = true;
  EXPECT_NEAR(std::abs(recip_gamma_via_contour({0.5, 1.5}, c) + 1.0), 0.0, 1e-10);
}

TEST(ContourIntegral, IndependentOfThetaAndEps) {
  const MLParams p{0.6, 1.0};
  const Complex z = std::polar(10.0, 0.9 * kPi);
  const Complex ref = eval_contour_integral(p, z, spec(0.6, 0.75 * 0.6 * kPi)).value;
  for (double theta : {0.55, 0.65, 0.85, 0.95}) {
    for (double eps : {0.5, 1.0, 3.0}) {
      const Complex v = eval_contour_integral(p, z, spec(0.6, theta * 0.6 * kPi, eps)).value;
      EXPECT_LE(rel(v, ref), 1e-10) << theta << " " << eps;
    }
  }
}

TEST(ContourIntegral, GMinusAndGPlusRepresentationsAgree) {
  // With arg z between the two angles, z lies in GMinus for the small theta
  // and in GPlus for the large one.
  const MLParams p{0.7, 1.0};
  const Complex z = std::polar(7.0, 0.6 * kPi);
  const ContourSpec lo = spec(0.7, 0.55 * kPi);
  const ContourSpec hi = spec(0.7, 0.65 * kPi);
  ASSERT_EQ(classify_region(z, lo, 0.1), RegionClass::GMinus);
  ASSERT_EQ(classify_region(z, hi, 0.1), RegionClass::GPlus);
  const Complex a = eval_contour_integral(p, z, lo).value;
  const Complex b = eval_contour_integral(p, z, hi).value + explicit_term(p, z);
  EXPECT_LE(rel(a, b), 1e-10);
}

TEST(Overlap, SeriesAndContourAgreeOnAnnulus) {
  for (double alpha : {0.5, 0.7, 0.9}) {
    for (Complex beta : {Complex{alpha}, Complex{1.0}, Complex{1.7, 0.5}}) {
      for (double r : {5.0, 8.0, 12.0}) {
        for (double a : {0.0, 0.3, 0.6, 0.8, 1.0}) {
          const MLParams p{alpha, beta};
          const Complex z = std::polar(r, a * kPi);
          const auto c = ml_contour(p, z, select_contour(alpha, z));
          const auto s = ml_series(p, z, 1e-16, SeriesMode::compensated);
          EXPECT_LE(rel(c.value, s.value), 1e-8) << alpha << " " << beta << " " << z;
        }
      }
    }
  }
}

TEST(Overlap, SmallAlphaAgreesWhereSeriesIsAffordable) {
  for (double r : {5.0, 6.0}) {
    for (double a : {0.3, 0.8, 1.0}) {
      const MLParams p{0.3, 1.0};
      const Complex z = std::polar(r, a * kPi);
      const auto c = ml_contour(p, z, select_contour(0.3, z));
      const auto s = ml_series(p, z, 1e-16, SeriesMode::compensated);
      EXPECT_LE(rel(c.value, s.value), 1e-8) << z;
    }
  }
}

TEST(FrozenValues, EvaluatorReproducesHighPrecisionReferences) {
  for (const auto& f : oracle::kFrozen) {
    const EvalResult r = ml_eval({f.alpha, f.beta}, f.z);
    EXPECT_LE(rel(r.value, f.value), 1e-10)
        << "alpha=" << f.alpha << " beta=" << f.beta << " z=" << f.z;
    EXPECT_LE(std::abs(r.value - f.value), 10.0 * r.err_estimate + 1e-14 * std::abs(f.value));
  }
}

TEST(MlContourDeriv, MatchesSeriesDerivative) {
  for (int l : {1, 2, 3}) {
    for (Complex lambda : {Complex{-1.0, 0.0}, std::polar(1.0, 0.75 * kPi), Complex{0.0, 2.0}}) {
      const MLParams p{0.8, 1.0};
      const double t = 6.0;
      const Complex z = lambda * std::pow(t, 0.8);
      const auto c = ml_contour_deriv(p, lambda, t, l, select_contour(0.8, z));
      const auto s = ml_series_deriv(p, lambda, t, l, 1e-16, SeriesMode::compensated);
      EXPECT_LE(rel(c.value, s.value), 1e-8) << l << " " << lambda;
    }
  }
}

TEST(MlContourDeriv, MatchesCauchyOracleOfContourValues) {
  const MLParams p{0.6, 0.6};
  const Complex lambda = -2.0;
  const double t = 20.0;
  const double tau = std::pow(t, 0.6);
  auto f = [&](Complex lam) { return ml_eval(p, lam * tau).value; };
  const Complex ref = oracle::cauchy_derivative(f, lambda, 1, 0.2, 64);
  const Complex z = lambda * tau;
  EXPECT_LE(rel(ml_contour_deriv(p, lambda, t, 1, select_contour(0.6, z)).value, ref), 1e-7);
}

TEST(SelectContour, AvoidsPointsOnTheRays) {
  for (double alpha : {0.4, 0.7}) {
    const Complex z = std::polar(5.0, 0.75 * alpha * kPi);
    const ContourSpec c = select_contour(alpha, z);
    EXPECT_NO_THROW(c.validate());
    EXPECT_NE(classify_region(z, c, default_margin(z)), RegionClass::NearContour);
  }
  const ContourSpec c = select_contour(0.5, -1.05);
  EXPECT_NE(classify_region(-1.05, c, default_margin(-1.05)), RegionClass::NearContour);
}

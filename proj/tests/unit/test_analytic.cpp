#include <cmath>

#include <gtest/gtest.h>

#include "kornkit/analytic.hpp"
#include "kornkit/error.hpp"
#include "kornkit/random.hpp"

using namespace kornkit;

namespace {

// Central difference of the analytic value, step 1e-5: an oracle independent
// of the closed-form derivatives.
Grad27 numeric_gradient(const AnalyticMatrixField& f, const Vec3& x) {
  const double s = 1e-5;
  Grad27 g;
  for (int d = 0; d < 3; ++d) {
    const Vec3 e = Vec3::Unit(d) * s;
    const Mat3 diff = (f.value(x + e) - f.value(x - e)) / (2 * s);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) g(i, j, d) = diff(i, j);
    }
  }
  return g;
}

}  // namespace

TEST(Analytic, ParseKinds) {
  EXPECT_EQ(parse_analytic_kind("polynomial"), AnalyticKind::Polynomial);
  EXPECT_EQ(parse_analytic_kind("trigonometric"), AnalyticKind::Trigonometric);
  EXPECT_EQ(parse_analytic_kind("rotation-valued"), AnalyticKind::RotationValued);
  try {
    parse_analytic_kind("spline");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnknownKind);
  }
  EXPECT_EQ(to_string(AnalyticKind::RotationValued), "rotation-valued");
}

TEST(Analytic, DegreeZeroPolynomialIsConstant) {
  AnalyticParams p;
  p.degree = 0;
  const AnalyticMatrixField f = AnalyticMatrixField::make(AnalyticKind::Polynomial, p);
  const Mat3 v0 = f.value(Vec3::Zero());
  EXPECT_EQ(f.value(Vec3(0.3, -0.7, 2.0)), v0);
  for (double g : f.gradient(Vec3(0.1, 0.2, 0.3)).values) EXPECT_EQ(g, 0.0);
}

TEST(Analytic, ZeroAmplitudeTrigIsZero) {
  AnalyticParams p;
  p.amplitude = 0.0;
  const AnalyticMatrixField f = AnalyticMatrixField::make(AnalyticKind::Trigonometric, p);
  EXPECT_EQ(f.sample(GridSpec::cube(3, 4)).max_abs(), 0.0);
  const AnalyticVectorField v = AnalyticVectorField::make(AnalyticKind::Trigonometric, p);
  EXPECT_EQ(v.sample(GridSpec::cube(3, 4)).max_abs(), 0.0);
}

TEST(Analytic, RotationValuesAreInSO3) {
  AnalyticParams p;
  p.amplitude = 2.0;
  const AnalyticMatrixField f = AnalyticMatrixField::make(AnalyticKind::RotationValued, p);
  Rng rng(4);
  for (int s = 0; s < 200; ++s) {
    const Vec3 x(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2));
    const Mat3 r = f.value(x);
    EXPECT_NEAR(r.determinant(), 1.0, 1e-14);
    EXPECT_LE(max_abs(r.transpose() * r - Mat3::Identity()), 1e-14);
  }
}

TEST(Analytic, RodriguesMatchesExponentialSeries) {
  Rng rng(5);
  for (int s = 0; s < 50; ++s) {
    const Vec3 w(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2));
    const Mat3 k = smat(w).matrix();
    Mat3 series = Mat3::Identity();
    Mat3 term = Mat3::Identity();
    for (int n = 1; n < 40; ++n) {
      term = term * k / n;
      series += term;
    }
    EXPECT_LE(max_abs(rodrigues(w) - series), 1e-13);
  }
  EXPECT_EQ(rodrigues(Vec3::Zero()), Mat3(Mat3::Identity()));
}

TEST(Analytic, RodriguesDerivativesNearZeroAngle) {
  for (double t : {1e-9, 1e-5, 1e-3, 0.5}) {
    const Vec3 w = Vec3(0.3, -0.5, 0.8).normalized() * t;
    const std::array<Mat3, 3> d = rodrigues_derivatives(w);
    for (int a = 0; a < 3; ++a) {
      const double s = 1e-6;
      const Vec3 e = Vec3::Unit(a) * s;
      const Mat3 fd = (rodrigues(w + e) - rodrigues(w - e)) / (2 * s);
      EXPECT_LE(max_abs(d[static_cast<std::size_t>(a)] - fd), 1e-8) << "t=" << t << " axis " << a;
    }
  }
}

TEST(Analytic, GradientsMatchNumericDifferentiation) {
  Rng rng(6);
  for (AnalyticKind kind : {AnalyticKind::Polynomial, AnalyticKind::Trigonometric, AnalyticKind::RotationValued}) {
    AnalyticParams p;
    p.seed = 77;
    const AnalyticMatrixField f = AnalyticMatrixField::make(kind, p);
    for (int s = 0; s < 20; ++s) {
      const Vec3 x(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
      const Grad27 a = f.gradient(x);
      const Grad27 n = numeric_gradient(f, x);
      for (std::size_t k = 0; k < 27; ++k) ASSERT_NEAR(a.values[k], n.values[k], 1e-7);
      ASSERT_LE(max_abs(f.curl(x) - curl_from_grad(a)), 1e-14);
    }
  }
}

TEST(Analytic, MultilinearHasNoPureSquares) {
  AnalyticParams p;
  p.multilinear = true;
  const AnalyticVectorField f = AnalyticVectorField::make(AnalyticKind::Polynomial, p, 3);
  // Along each axis the field is affine: the second difference vanishes.
  const Vec3 x(0.2, -0.4, 0.7);
  for (int a = 0; a < 3; ++a) {
    const Vec3 e = Vec3::Unit(a) * 0.3;
    const Eigen::VectorXd second = f.value(x + e) - 2 * f.value(x) + f.value(x - e);
    EXPECT_LE(second.cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(Analytic, VectorJacobianMatchesNumeric) {
  AnalyticParams p;
  const AnalyticVectorField f = AnalyticVectorField::make(AnalyticKind::Trigonometric, p, 3);
  const Vec3 x(0.1, 0.5, -0.3);
  const Eigen::MatrixXd j = f.jacobian(x);
  for (int d = 0; d < 3; ++d) {
    const Vec3 e = Vec3::Unit(d) * 1e-5;
    const Eigen::VectorXd col = (f.value(x + e) - f.value(x - e)) / 2e-5;
    EXPECT_LE((j.col(d) - col).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(Analytic, RotationVectorFieldRejected) {
  try {
    AnalyticVectorField::make(AnalyticKind::RotationValued, AnalyticParams{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnknownKind);
  }
}

TEST(Analytic, DeterministicForSeed) {
  AnalyticParams p;
  p.seed = 123;
  const GridSpec g = GridSpec::cube(3, 5);
  const MatrixField a = AnalyticMatrixField::make(AnalyticKind::Trigonometric, p).sample(g);
  const MatrixField b = AnalyticMatrixField::make(AnalyticKind::Trigonometric, p).sample(g);
  EXPECT_TRUE(std::equal(a.data().begin(), a.data().end(), b.data().begin()));
}

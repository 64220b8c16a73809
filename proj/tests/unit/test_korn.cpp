#include <cmath>
#include <functional>
#include <numeric>

#include <gtest/gtest.h>

#include "kornkit/analytic.hpp"
#include "kornkit/error.hpp"
#include "kornkit/korn.hpp"
#include "kornkit/random.hpp"

using namespace kornkit;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no kornkit::Error thrown";
  return ErrorKind::InvalidArgument;
}

MatrixField identity_p(const GridSpec& g, double s = 1.0) {
  return make_p_family(PFamily::Identity, g, PFamilyParams{0.5, 1.0, s, 7});
}

VectorField random_u(const GridSpec& g, std::uint64_t seed, const BoundaryMask* zero_on = nullptr) {
  VectorField u(g, 3);
  Rng rng(seed);
  for (std::size_t p = 0; p < g.point_count(); ++p) {
    for (int c = 0; c < 3; ++c) u(p, c) = (zero_on && (*zero_on)[p]) ? 0.0 : rng.uniform(-1, 1);
  }
  return u;
}

VectorField rigid_motion(const GridSpec& g, const Vec3& w, const Vec3& a) {
  VectorField u(g, 3);
  for (std::size_t p = 0; p < g.point_count(); ++p) u.set(p, w.cross(g.position(p)) + a);
  return u;
}

}  // namespace

TEST(KornProblem, Validation) {
  const GridSpec g = GridSpec::cube(3, 4);
  MatrixField p = identity_p(g);
  EXPECT_EQ(kind_of([&] { KornProblem(p, BoundaryMask(g.point_count(), 0)); }), ErrorKind::EmptyBoundaryPatch);
  EXPECT_EQ(kind_of([&] { KornProblem(p, BoundaryMask(3, 1)); }), ErrorKind::DimensionMismatch);
  BoundaryMask interior(g.point_count(), 0);
  interior[g.index({1, 1, 1})] = 1;
  EXPECT_EQ(kind_of([&] { KornProblem(p, interior); }), ErrorKind::InvalidArgument);
  MatrixField flipped = p;
  flipped.set(5, Vec3(1, 1, -1).asDiagonal().toDenseMatrix());
  EXPECT_EQ(kind_of([&] { KornProblem(flipped, face_mask(g, 0, true)); }), ErrorKind::DeterminantTooSmall);
  EXPECT_EQ(kind_of([&] { KornProblem::without_boundary(identity_p(g, 1e-5)); }), ErrorKind::DeterminantTooSmall);
  EXPECT_NO_THROW(KornProblem::without_boundary(identity_p(g, 1e-3)));
  const KornProblem ok(p, face_mask(g, 2, false));
  EXPECT_TRUE(ok.has_boundary());
  EXPECT_EQ(std::accumulate(ok.gamma().begin(), ok.gamma().end(), 0), 16);
}

TEST(Quadrature, WeightsArePositiveAndSumToVolume) {
  const GridSpec g = GridSpec::cube(3, 6, 2.0);
  const std::vector<double> w = quadrature_weights(g);
  for (double v : w) EXPECT_GT(v, 0.0);
  EXPECT_NEAR(std::accumulate(w.begin(), w.end(), 0.0), 8.0, 1e-13);
}

TEST(Seminorm, Examples) {
  const GridSpec g = GridSpec::cube(3, 7);
  const MatrixField p = identity_p(g);
  EXPECT_EQ(seminorm(VectorField(g, 3), p), 0.0);
  EXPECT_LE(seminorm(rigid_motion(g, Vec3(0.3, -1.2, 0.5), Vec3(1, 2, 3)), p), 1e-12);
  VectorField u(g, 3);
  for (std::size_t k = 0; k < g.point_count(); ++k) u(k, 0) = g.position(k)(0);
  EXPECT_NEAR(seminorm(u, p), 1.0, 1e-12);
}

TEST(Seminorm, RotatedKernelWithConstantP) {
  const GridSpec g = GridSpec::cube(3, 5);
  const Mat3 r = rodrigues(Vec3(0.2, 0.4, -0.3));
  MatrixField p(g, 3, 3);
  for (std::size_t k = 0; k < g.point_count(); ++k) p.set(k, r);
  const Mat3 grad = smat(Vec3(1, -1, 2)).matrix() * r;
  VectorField u(g, 3);
  for (std::size_t k = 0; k < g.point_count(); ++k) u.set(k, grad * g.position(k));
  EXPECT_LE(seminorm(u, p), 1e-12);
}

TEST(Form, MatchesSeminormSquared) {
  const GridSpec g = GridSpec::cube(3, 5);
  const MatrixField p = make_p_family(PFamily::RotationValued, g, PFamilyParams{0.8, 1.0, 1.5, 3});
  const BoundaryMask gamma = face_mask(g, 0, true);
  const KornProblem problem(p, gamma);
  const DiscreteForm form = assemble_form(problem);
  EXPECT_EQ(form.value(VectorField(g, 3)), 0.0);
  for (std::uint64_t s = 1; s <= 20; ++s) {
    const VectorField u = random_u(g, s, &gamma);
    const double sn = seminorm(u, p);
    ASSERT_NEAR(form.value(u), sn * sn, 1e-10 * sn * sn);
    ASSERT_GT(form.value(u), 0.0);
  }
  const Eigen::SparseMatrix<double> asym = form.form - Eigen::SparseMatrix<double>(form.form.transpose());
  EXPECT_LE(asym.norm(), 1e-12 * form.form.norm());
}

TEST(Form, ClampedFaceEliminatesDofs) {
  const GridSpec g = GridSpec::cube(3, 4);
  const DiscreteForm form = assemble_form(KornProblem(identity_p(g), face_mask(g, 1, true)));
  EXPECT_EQ(form.free_dofs.size(), 3u * (64u - 16u));
  EXPECT_EQ(form.form.rows(), static_cast<Eigen::Index>(form.free_dofs.size()));
  const VectorField u = random_u(g, 3);
  const VectorField back = form.expand(form.restrict(u));
  for (std::size_t p = 0; p < g.point_count(); ++p) {
    if (g.multi_index(p)[1] == 0) {
      EXPECT_EQ(back.vec3(p), Vec3::Zero());
    } else {
      EXPECT_EQ(back.vec3(p), u.vec3(p));
    }
  }
}

TEST(Rayleigh, FreeIdentityProblemHasSixRigidModes) {
  for (int n : {3, 4, 5}) {
    const GridSpec g = GridSpec::cube(3, n);
    const DiscreteForm form = assemble_form(KornProblem::without_boundary(identity_p(g)));
    const RayleighResult r = min_rayleigh(form, GramKind::L2);
    EXPECT_EQ(r.kernel_dimension, 6u) << "n = " << n;
    EXPECT_GT(r.smallest[6], 1e6 * r.threshold);
    EXPECT_LE(seminorm(r.eigvec, identity_p(g)), 1e-6);
  }
}

TEST(Rayleigh, ClampedFaceIsPositiveForBothGrams) {
  const GridSpec g = GridSpec::cube(3, 5);
  const DiscreteForm form = assemble_form(KornProblem(identity_p(g), face_mask(g, 0, true)));
  for (GramKind k : {GramKind::L2, GramKind::H1}) {
    const RayleighResult r = min_rayleigh(form, k);
    EXPECT_EQ(r.kernel_dimension, 0u);
    EXPECT_GT(r.lambda_min, r.threshold);
    EXPECT_TRUE(r.dense);
  }
}

TEST(Rayleigh, ScalingPKeepsKernel) {
  const GridSpec g = GridSpec::cube(3, 4);
  const RayleighResult a = min_rayleigh(assemble_form(KornProblem::without_boundary(identity_p(g, 1.0))), GramKind::L2);
  const RayleighResult b = min_rayleigh(assemble_form(KornProblem::without_boundary(identity_p(g, 2.0))), GramKind::L2);
  EXPECT_EQ(a.kernel_dimension, b.kernel_dimension);
  EXPECT_NEAR(b.smallest[6], a.smallest[6] / 4.0, 1e-10 * a.smallest[6]);
}

TEST(Rayleigh, IterativePathAgreesWithDense) {
  const GridSpec g = GridSpec::cube(3, 5);
  const MatrixField p = make_p_family(PFamily::RotationValued, g, PFamilyParams{0.6, 1.0, 1.0, 9});
  EigenSettings iterative;
  iterative.dense_cap = 0;
  for (bool free : {false, true}) {
    const KornProblem problem = free ? KornProblem::without_boundary(p) : KornProblem(p, face_mask(g, 2, true));
    const DiscreteForm form = assemble_form(problem);
    for (GramKind k : {GramKind::L2, GramKind::H1}) {
      const RayleighResult d = min_rayleigh(form, k);
      const RayleighResult it = min_rayleigh(form, k, iterative);
      EXPECT_FALSE(it.dense);
      EXPECT_EQ(it.kernel_dimension, d.kernel_dimension);
      for (std::size_t j = 0; j < 7; ++j) {
        EXPECT_NEAR(it.smallest[j], d.smallest[j], 1e-8 * std::max(d.smallest[7], 1.0)) << j;
      }
    }
  }
}

TEST(Rayleigh, NoFallbackBeyondCap) {
  const GridSpec g = GridSpec::cube(3, 4);
  const DiscreteForm form = assemble_form(KornProblem(identity_p(g), face_mask(g, 0, true)));
  EigenSettings s;
  s.dense_cap = 10;
  s.iterative_fallback = false;
  EXPECT_EQ(kind_of([&] { min_rayleigh(form, GramKind::L2, s); }), ErrorKind::EigensolveFailed);
}

TEST(Gp, ConstantPGivesZero) {
  const GridSpec g = GridSpec::cube(3, 5);
  EXPECT_EQ(build_gp(identity_p(g, 2.0)).max_abs(), 0.0);
}

TEST(Gp, MatchesPointwiseDefinitionAndIsLinear) {
  const GridSpec g = GridSpec::cube(3, 6);
  const MatrixField p = make_p_family(PFamily::RotationValued, g, PFamilyParams{0.7, 1.0, 1.0, 5});
  const MatrixField curl_p = fd_curl_rowwise(p);
  const CoefficientTensorField gp = build_gp(p, &curl_p);
  Rng rng(8);
  for (int s = 0; s < 30; ++s) {
    const std::size_t k = rng.next() % g.point_count();
    const Vec3 z(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    const Mat9 l = build_l(p.mat3(k));
    const Mat3 expected = -mat_of_vec(l.fullPivLu().solve(vec_of_mat(smat(z).matrix() * curl_p.mat3(k))));
    const SmallMat got = gp.apply(k, z);
    EXPECT_LE((got - expected).cwiseAbs().maxCoeff(), 1e-12);
    const double alpha = rng.uniform(-3, 3);
    EXPECT_LE((gp.apply(k, alpha * z) - alpha * got).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(Gp, ConsistencyIsSecondOrder) {
  AnalyticParams zp;
  zp.seed = 12;
  const AnalyticVectorField zeta = AnalyticVectorField::make(AnalyticKind::Trigonometric, zp, 3);
  const PFamilyParams pp{0.5, 2.0, 1.0, 13};
  const ConvergenceReport rep = measure_convergence(GridSpec::cube(3, 9), 3, [&](const GridSpec& g) {
    return gp_consistency_discrepancy(zeta.sample(g), make_p_family(PFamily::RotationValued, g, pp));
  });
  ASSERT_EQ(rep.orders.size(), 2u);
  EXPECT_GE(rep.orders.back(), 1.9);
  EXPECT_LT(rep.errors[2], rep.errors[1]);
}

TEST(Probe, ClampedIdentityHoldsTheNorm) {
  const GridSpec g = GridSpec::cube(3, 5);
  const ProbeReport r = norm_property_probe(KornProblem(identity_p(g), face_mask(g, 0, true)));
  EXPECT_FALSE(r.kernel_found);
  EXPECT_FALSE(r.diagnostics.has_value());
  EXPECT_EQ(r.verdict.rfind("norm holds at h", 0), 0u);
}

TEST(Probe, FreeProblemFlagsVacuousBoundary) {
  const GridSpec g = GridSpec::cube(3, 5);
  const ProbeReport r = norm_property_probe(KornProblem::without_boundary(identity_p(g)));
  ASSERT_TRUE(r.kernel_found);
  ASSERT_TRUE(r.diagnostics.has_value());
  const DisplacementDiagnostics& d = *r.diagnostics;
  EXPECT_TRUE(d.boundary_condition_vacuous);
  EXPECT_LE(d.skewness_residual, 1e-6);
  EXPECT_LE(d.transport_residual.max_residual, 1e-6);
  EXPECT_NE(r.verdict.find("vacuous"), std::string::npos);
}

TEST(Probe, RigidMotionGivesConstantZeta) {
  const GridSpec g = GridSpec::cube(3, 5);
  const KornProblem problem = KornProblem::without_boundary(identity_p(g));
  const Vec3 w(0.4, -0.2, 0.9);
  const DisplacementDiagnostics d = probe_displacement(problem, rigid_motion(g, w, Vec3(1, 0, 0)));
  EXPECT_LE(d.skewness_residual, 1e-12);
  EXPECT_LE(d.transport_residual.max_residual, 1e-12);
  EXPECT_GT(d.zeta_max, 0.0);
}

TEST(Probe, ZeroDisplacement) {
  const GridSpec g = GridSpec::cube(3, 4);
  const KornProblem problem(identity_p(g), face_mask(g, 0, true));
  const DisplacementDiagnostics d = probe_displacement(problem, VectorField(g, 3));
  EXPECT_EQ(d.seminorm, 0.0);
  EXPECT_EQ(d.skewness_residual, 0.0);
  EXPECT_EQ(d.zeta_max, 0.0);
  EXPECT_EQ(d.zeta_on_gamma, 0.0);
  EXPECT_EQ(d.transport_residual.max_residual, 0.0);
  EXPECT_FALSE(d.boundary_condition_vacuous);
}

TEST(Families, ParseAndDeterminants) {
  EXPECT_EQ(parse_p_family("graded-roughness"), PFamily::GradedRoughness);
  EXPECT_EQ(kind_of([] { parse_p_family("wobbly"); }), ErrorKind::UnknownKind);
  const GridSpec g = GridSpec::cube(3, 6);
  for (PFamily f : {PFamily::Identity, PFamily::RotationValued, PFamily::GradedRoughness}) {
    const MatrixField p = make_p_family(f, g, PFamilyParams{0.9, 0.5, 2.0, 4});
    for (std::size_t k = 0; k < p.size(); ++k) ASSERT_NEAR(p.mat3(k).determinant(), 8.0, 1e-12);
  }
}

TEST(Families, RoughnessSweepReportsTrend) {
  const GridSpec g = GridSpec::cube(3, 5);
  const std::vector<RoughnessSample> s = roughness_sweep(g, face_mask(g, 0, true), {2.0, 1.0, 0.5});
  ASSERT_EQ(s.size(), 3u);
  for (const auto& x : s) {
    EXPECT_GT(x.lambda_min_l2, 0.0);
    EXPECT_GT(x.lambda_min_h1, 0.0);
    EXPECT_EQ(x.kernel_dimension, 0u);
    EXPECT_GT(x.curl_p_l2, 0.0);
  }
}

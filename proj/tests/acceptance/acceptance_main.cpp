#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "kornkit/algebra.hpp"
#include "kornkit/analytic.hpp"
#include "kornkit/error.hpp"
#include "kornkit/fields.hpp"
#include "kornkit/korn.hpp"
#include "kornkit/random.hpp"
#include "kornkit/transport.hpp"

using namespace kornkit;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

Mat3 random_mat(Rng& rng) {
  Mat3 m;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) m(i, j) = rng.uniform(-1, 1);
  }
  return m;
}

Vec3 random_vec(Rng& rng) { return Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)); }

Outcome determinant_identity() {
  Rng rng(1);
  double worst = 0.0;
  for (int s = 0; s < 1000; ++s) {
    const Mat3 y = random_mat(rng);
    const double d = y.determinant();
    const double err = std::abs(det_l(y) + 2 * d * d * d) / std::max(1.0, std::abs(d * d * d));
    worst = std::max(worst, err);
  }
  return {worst <= 1e-10, "max scaled error " + fmt(worst)};
}

Outcome curl_product() {
  AnalyticParams px;
  px.multilinear = true;
  px.seed = 21;
  AnalyticParams py = px;
  py.seed = 22;
  const AnalyticMatrixField qx = AnalyticMatrixField::make(AnalyticKind::Polynomial, px);
  const AnalyticMatrixField qy = AnalyticMatrixField::make(AnalyticKind::Polynomial, py);
  const GridSpec g17 = GridSpec::cube(3, 17);
  const double poly = curl_product_discrepancy(qx.sample(g17), qy.sample(g17));
  AnalyticParams gx;
  gx.seed = 21;
  AnalyticParams gy = gx;
  gy.seed = 22;
  const double general = curl_product_discrepancy(AnalyticMatrixField::make(AnalyticKind::Polynomial, gx).sample(g17),
                                                  AnalyticMatrixField::make(AnalyticKind::Polynomial, gy).sample(g17));

  AnalyticParams tx;
  tx.seed = 23;
  AnalyticParams ty = tx;
  ty.seed = 24;
  const AnalyticMatrixField fx = AnalyticMatrixField::make(AnalyticKind::Trigonometric, tx);
  const AnalyticMatrixField fy = AnalyticMatrixField::make(AnalyticKind::Trigonometric, ty);
  const ConvergenceReport rep = verify_curl_product(
      [&](const GridSpec& g) { return CurlProductCase{fx.sample(g), fy.sample(g), std::nullopt}; }, g17, 2);
  const double order = rep.min_order();
  return {poly <= 1e-9 && order >= 1.9, "multilinear quadratic discrepancy " + fmt(poly) +
                                           ", trigonometric order " + fmt(order) +
                                           ", general quadratic discrepancy " + fmt(general) + " (not asserted)"};
}

Outcome skew_specialization() {
  Rng rng(3);
  double worst = 0.0;
  for (int s = 0; s < 100; ++s) {
    const Vec3 zeta = random_vec(rng);
    const Mat3 grad_axl = random_mat(rng);
    const Mat3 y = random_mat(rng);
    const Mat3 curl_y = random_mat(rng);
    Grad27 grad_x;
    for (int d = 0; d < 3; ++d) {
      const Mat3 dx = smat(grad_axl.col(d)).matrix();
      for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) grad_x(r, c, d) = dx(r, c);
      }
    }
    const SkewMat3 a = smat(zeta);
    const Mat3 general = curl_product_pointwise(grad_x, a.matrix(), y, curl_y);
    const Mat3 skew = curl_product_skew_pointwise(grad_axl, a, y, curl_y);
    worst = std::max(worst, max_abs(general - skew));
  }
  return {worst <= 1e-13, "max discrepancy " + fmt(worst)};
}

LineCoefficient random_bounded(Rng& rng, int dim) {
  Eigen::MatrixXd a(dim, dim), b(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      a(i, j) = rng.uniform(-1, 1);
      b(i, j) = rng.uniform(-1, 1);
    }
  }
  const double w = rng.uniform(1, 6);
  const double phi = rng.uniform(0, 3);
  LineCoefficient g;
  g.a = rng.uniform(-1, 0);
  g.b = g.a + rng.uniform(0.5, 2.0);
  g.dim = dim;
  g.sampler = [a, b, w, phi](double t) -> Eigen::MatrixXd { return a + b * std::sin(w * t + phi); };
  return g;
}

Outcome gronwall_uniqueness() {
  Rng rng(4);
  double zero_max = 0.0;
  double worst_ratio = 0.0;
  for (int s = 0; s < 20; ++s) {
    const LineCoefficient g = random_bounded(rng, 1 + s % 3);
    const Trajectory zero = integrate_line(g, Eigen::VectorXd::Zero(g.dim), 400);
    for (const auto& v : zero.values) zero_max = std::max(zero_max, v.cwiseAbs().maxCoeff());
    Eigen::VectorXd z0(g.dim);
    for (int i = 0; i < g.dim; ++i) z0(i) = rng.uniform(-1, 1);
    const Trajectory t = integrate_line(g, z0, 400);
    const GronwallEnvelope env = gronwall_bound(g, z0.cwiseAbs().maxCoeff());
    for (std::size_t k = 0; k < t.times.size(); ++k) {
      worst_ratio = std::max(worst_ratio, t.values[k].cwiseAbs().maxCoeff() / env(t.times[k]));
    }
  }
  return {zero_max <= 1e-10 && worst_ratio <= 1 + 1e-6,
          "zero-data max " + fmt(zero_max) + ", worst |zeta| / envelope " + fmt(worst_ratio)};
}

Outcome counterexample() {
  const CounterexampleReport r = counterexample_demo(1e-3, 4000);
  const bool ok = r.numeric_residual <= 1e-12 && r.analytic_residual <= 1e-12 && !r.singular_integral.finite &&
                  r.truncated_zero_max <= 1e-10;
  return {ok, "residual " + fmt(r.numeric_residual) + ", 1/t integrable: " +
                  (r.singular_integral.finite ? "yes" : "no") + ", truncated max " + fmt(r.truncated_zero_max)};
}

CoefficientTensorField random_tensor(const GridSpec& grid, double amp, std::uint64_t seed) {
  CoefficientTensorField g(grid);
  Rng rng(seed);
  const int n = grid.dim;
  for (std::size_t p = 0; p < grid.point_count(); ++p) {
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        for (int i = 0; i < n; ++i) g(p, r, c, i) = rng.uniform(-amp, amp);
      }
    }
  }
  return g;
}

Outcome cube_and_flood() {
  const GridSpec grid = GridSpec::cube(3, 33);
  const CoefficientTensorField g = random_tensor(grid, 1.0, 6);
  const VectorField zeta = propagate_cube(g, VectorField(face_grid(grid, 2), 3), 64);
  const ResidualReport res = system_residual(zeta, g);

  const GridSpec lgrid = GridSpec::cube(3, 13);
  const int last = 12;
  IndexBox whole;
  for (int a = 0; a < 3; ++a) whole.hi[a] = last;
  IndexBox bar = whole;
  bar.hi[1] = last / 2;
  IndexBox arm = whole;
  arm.hi[0] = last / 2;
  const VoxelDomain domain = VoxelDomain::union_of(lgrid, {bar, arm});
  IndexBox seed = whole;
  FloodSettings settings;
  seed.hi[0] = settings.overlap_cells;
  const FloodReport flood =
      flood_propagate(domain, seed, random_tensor(lgrid, 1.0, 7), VectorField(lgrid, 3), settings);
  const bool ok = zeta.max_abs() <= 1e-10 && res.pass && flood.pass && flood.chain.size() >= 2 &&
                  flood.covered_points == flood.domain_points;
  return {ok, "cube max " + fmt(zeta.max_abs()) + ", residual " + fmt(res.max_residual) + ", L-shape cuboids " +
                  std::to_string(flood.chain.size()) + " (" + flood.verdict + ")"};
}

Outcome korn_kernel() {
  const GridSpec grid = GridSpec::cube(3, 5);
  const MatrixField p = make_p_family(PFamily::Identity, grid);
  const DiscreteForm free_form = assemble_form(KornProblem::without_boundary(p));
  const RayleighResult free_r = min_rayleigh(free_form, GramKind::L2);
  const DiscreteForm clamped = assemble_form(KornProblem(p, face_mask(grid, 0, true)));
  const RayleighResult l2 = min_rayleigh(clamped, GramKind::L2);
  const RayleighResult h1 = min_rayleigh(clamped, GramKind::H1);
  const bool ok = free_r.kernel_dimension == 6 && l2.dense && h1.dense && l2.kernel_dimension == 0 &&
                  h1.kernel_dimension == 0 && l2.lambda_min > 0 && h1.lambda_min > 0;
  return {ok, "free kernel " + std::to_string(free_r.kernel_dimension) + ", clamped lambda_min L2 " +
                  fmt(l2.lambda_min) + " H1 " + fmt(h1.lambda_min)};
}

Outcome gp_consistency() {
  AnalyticParams zp;
  zp.seed = 8;
  const AnalyticVectorField zeta = AnalyticVectorField::make(AnalyticKind::Trigonometric, zp, 3);
  const PFamilyParams pp{0.5, 1.0, 1.0, 9};
  const ConvergenceReport rep = measure_convergence(GridSpec::cube(3, 9), 3, [&](const GridSpec& g) {
    return gp_consistency_discrepancy(zeta.sample(g), make_p_family(PFamily::RotationValued, g, pp));
  });
  return {rep.min_order() >= 1.9, "finest discrepancy " + fmt(rep.finest_error()) + ", order " + fmt(rep.min_order())};
}

struct RigidCase {
  VectorField phi;
  VectorField psi;
};

RigidCase rigid_case(const GridSpec& g, const std::function<Vec3(const Vec3&)>& psi_of, const Mat3& a,
                     const Vec3& t) {
  RigidCase c{VectorField(g, 3), VectorField(g, 3)};
  for (std::size_t k = 0; k < g.point_count(); ++k) {
    const Vec3 s = psi_of(g.position(k));
    c.psi.set(k, s);
    c.phi.set(k, a * s + t);
  }
  return c;
}

Outcome rigid_recovery() {
  const Vec3 w(0.3, -0.7, 0.4), t(1.0, -0.5, 2.0);
  const Mat3 a = smat(w).matrix();
  const Mat3 rot = rodrigues(Vec3(0.5, 1.0, -0.3));
  const GridSpec g9 = GridSpec::cube(3, 9);
  const RigidCase affine = rigid_case(g9, [&](const Vec3& x) { return Vec3(rot * x); }, a, t);
  const RigidRecovery ra = rigid_recover(affine.phi, affine.psi);
  const double affine_err = std::max({(ra.a_matrix.axial() - w).cwiseAbs().maxCoeff(),
                                      (ra.translation - t).cwiseAbs().maxCoeff(), ra.reconstruction_residual});

  const GridSpec g33 = GridSpec::cube(3, 33);
  const RigidCase curved =
      rigid_case(g33, [](const Vec3& x) { return Vec3(x(0), x(1), x(2) + 0.25 * x(0) * x(0)); }, a, t);
  const RigidRecovery rc = rigid_recover(curved.phi, curved.psi);
  const double a_err = (rc.a_matrix.axial() - w).cwiseAbs().maxCoeff();
  const bool ok = affine_err <= 1e-12 && a_err <= 1e-6 && rc.reconstruction_residual <= g33.h * g33.h;
  return {ok, "affine error " + fmt(affine_err) + ", curvilinear A error " + fmt(a_err) + ", reconstruction " +
                  fmt(rc.reconstruction_residual)};
}

Outcome conjugation() {
  Rng rng(10);
  double worst = 0.0;
  for (int s = 0; s < 1000; ++s) {
    const Mat3 grad_phi = random_mat(rng);
    const Mat3 grad_psi = Mat3::Identity() + 0.3 * random_mat(rng);
    const ConjugationSides c = sym_conjugation(grad_phi, grad_psi);
    worst = std::max(worst, max_abs(c.conjugated - c.direct));
  }
  return {worst <= 1e-12, "max discrepancy " + fmt(worst)};
}

struct Criterion {
  int id;
  const char* name;
  double time_limit;  // seconds, <= 0 for none
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "determinant identity", 1.0, determinant_identity},
      {2, "curl product formula", 30.0, curl_product},
      {3, "skew specialization", 0.0, skew_specialization},
      {4, "gronwall uniqueness", 0.0, gronwall_uniqueness},
      {5, "1/t counterexample", 0.0, counterexample},
      {6, "cube and flood propagation", 60.0, cube_and_flood},
      {7, "korn kernel structure", 60.0, korn_kernel},
      {8, "G_P consistency", 0.0, gp_consistency},
      {9, "rigid displacement recovery", 0.0, rigid_recovery},
      {10, "conjugation identity", 0.0, conjugation},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.time_limit > 0 && secs >= c.time_limit) {
      out.pass = false;
      out.detail += ", over time limit";
    }
    std::printf("%s %2d %s: %s (%.2f s)\n", out.pass ? "PASS" : "FAIL", c.id, c.name, out.detail.c_str(), secs);
    failures += out.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}

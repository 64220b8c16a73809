#include <algorithm>
#include <cmath>
#include <string>

#include "kornkit/analytic.hpp"
#include "kornkit/error.hpp"
#include "kornkit/korn.hpp"

namespace kornkit {

namespace {

MatrixField smat_field(const VectorField& zeta) {
  MatrixField out(zeta.grid(), 3, 3);
  for (std::size_t p = 0; p < zeta.size(); ++p) out.set(p, smat(zeta.vec3(p)).matrix());
  return out;
}

void require_matching(const VectorField& u, const MatrixField& p) {
  if (!(u.grid() == p.grid())) throw Error(ErrorKind::DimensionMismatch, "field grids differ");
  if (u.components() != 3 || p.rows() != 3 || p.cols() != 3) {
    throw Error(ErrorKind::DimensionMismatch, "expected a 3-vector field and a 3x3 matrix field");
  }
}

}  // namespace

CoefficientTensorField build_gp(const MatrixField& p, const MatrixField* curl_p, double min_det) {
  if (p.rows() != 3 || p.cols() != 3 || p.grid().dim != 3) {
    throw Error(ErrorKind::DimensionMismatch, "G_P needs a 3x3 field on a 3-D grid");
  }
  MatrixField computed;
  if (curl_p == nullptr) {
    computed = fd_curl_rowwise(p);
    curl_p = &computed;
  } else if (!(curl_p->grid() == p.grid())) {
    throw Error(ErrorKind::DimensionMismatch, "Curl P grid differs from P grid");
  }
  CoefficientTensorField g(p.grid());
  for (std::size_t k = 0; k < p.size(); ++k) {
    const Mat9 l_inv = invert_l(p.mat3(k), min_det);
    const Mat3 c = curl_p->mat3(k);
    for (int in = 0; in < 3; ++in) {
      const Mat3 m = -mat_of_vec(l_inv * vec_of_mat(smat(Vec3::Unit(in)).matrix() * c));
      for (int r = 0; r < 3; ++r) {
        for (int col = 0; col < 3; ++col) g(k, r, col, in) = m(r, col);
      }
    }
  }
  return g;
}

double gp_consistency_discrepancy(const VectorField& zeta, const MatrixField& p) {
  require_matching(zeta, p);
  const MatrixField s = smat_field(zeta);
  const MatrixField lhs = fd_curl_rowwise(pointwise_product(s, p));
  const MatrixField curl_p = fd_curl_rowwise(p);
  const MatrixField grad_zeta = fd_grad(zeta);
  MatrixField rhs(p.grid(), 3, 3);
  for (std::size_t k = 0; k < p.size(); ++k) {
    rhs.set(k, mat_of_vec(build_l(p.mat3(k)) * vec_of_mat(grad_zeta.mat3(k))) + s.mat3(k) * curl_p.mat3(k));
  }
  return interior_max_abs_diff(lhs, rhs);
}

DisplacementDiagnostics probe_displacement(const KornProblem& problem, const VectorField& u_in,
                                           const ProbeSettings& settings) {
  require_matching(u_in, problem.p());
  VectorField u = u_in;
  const double scale = u.max_abs();
  if (scale > 0.0) {
    for (double& v : u.data()) v /= scale;
  }
  const GridSpec& g = problem.grid();
  const MatrixField grad = fd_grad(u);

  DisplacementDiagnostics d;
  d.seminorm = seminorm(u, problem.p(), problem.min_det());
  VectorField zeta(g, 3);
  for (std::size_t k = 0; k < g.point_count(); ++k) {
    const Mat3 a = grad.mat3(k) * problem.p_inverse().mat3(k);
    d.skewness_residual = std::max(d.skewness_residual, max_abs(sym(a)));
    const Vec3 z = axl(SkewMat3::skew_part(a));
    for (int c = 0; c < 3; ++c) zeta(k, c) = z(c);
  }
  d.zeta_max = zeta.max_abs();
  d.boundary_condition_vacuous = !problem.has_boundary();
  for (std::size_t k = 0; k < g.point_count(); ++k) {
    if (!problem.gamma()[k]) continue;
    d.zeta_on_gamma = std::max(d.zeta_on_gamma, zeta.vec3(k).cwiseAbs().maxCoeff());
    d.u_on_gamma = std::max(d.u_on_gamma, u.vec3(k).cwiseAbs().maxCoeff());
  }
  const CoefficientTensorField gp = build_gp(problem.p(), nullptr, problem.min_det());
  d.transport_residual = system_residual(zeta, gp, settings.transport_tolerance);
  return d;
}

ProbeReport norm_property_probe(const KornProblem& problem, const ProbeSettings& settings) {
  const DiscreteForm form = assemble_form(problem);
  ProbeReport report;
  report.rayleigh = min_rayleigh(form, GramKind::L2, settings.eigen);
  report.kernel_found = report.rayleigh.kernel_dimension > 0;
  const std::string h = std::to_string(problem.grid().h);
  if (!report.kernel_found) {
    report.verdict = "norm holds at h = " + h;
    return report;
  }
  report.diagnostics = probe_displacement(problem, report.rayleigh.eigvec, settings);
  const DisplacementDiagnostics& d = *report.diagnostics;
  if (d.boundary_condition_vacuous) {
    report.verdict = "kernel of dimension " + std::to_string(report.rayleigh.kernel_dimension) +
                     ": boundary condition zeta|Gamma = 0 is vacuous (Gamma empty)";
  } else if (!d.transport_residual.pass) {
    report.verdict = "kernel found at h = " + h + ": transport system residual fails";
  } else {
    report.verdict = "kernel found at h = " + h + ": zeta satisfies the transport system";
  }
  return report;
}

// ---------------------------------------------------------------- P families

PFamily parse_p_family(std::string_view name) {
  if (name == "identity") return PFamily::Identity;
  if (name == "rotation-valued") return PFamily::RotationValued;
  if (name == "graded-roughness") return PFamily::GradedRoughness;
  throw Error(ErrorKind::UnknownKind, "unknown P family '" + std::string(name) + "'");
}

std::string_view to_string(PFamily family) {
  switch (family) {
    case PFamily::Identity: return "identity";
    case PFamily::RotationValued: return "rotation-valued";
    case PFamily::GradedRoughness: return "graded-roughness";
  }
  return "identity";
}

MatrixField make_p_family(PFamily family, const GridSpec& grid, const PFamilyParams& params) {
  if (grid.dim != 3) throw Error(ErrorKind::DimensionMismatch, "P families live on 3-D grids");
  if (!std::isfinite(params.amplitude) || !std::isfinite(params.exponent) || !std::isfinite(params.scale)) {
    throw Error(ErrorKind::InvalidArgument, "non-finite P family parameter");
  }
  MatrixField p(grid, 3, 3);
  switch (family) {
    case PFamily::Identity:
      for (std::size_t k = 0; k < p.size(); ++k) p.set(k, params.scale * Mat3::Identity());
      break;
    case PFamily::RotationValued: {
      AnalyticParams ap;
      ap.amplitude = params.amplitude;
      ap.seed = params.seed;
      const MatrixField r = AnalyticMatrixField::make(AnalyticKind::RotationValued, ap).sample(grid);
      for (std::size_t k = 0; k < p.size(); ++k) p.set(k, params.scale * r.mat3(k));
      break;
    }
    case PFamily::GradedRoughness: {
      Vec3 centre;
      for (int a = 0; a < 3; ++a) {
        centre(a) = grid.origin[static_cast<std::size_t>(a)] + 0.5 * (grid.shape[static_cast<std::size_t>(a)] - 1) * grid.h + 0.5 * grid.h;
      }
      for (std::size_t k = 0; k < p.size(); ++k) {
        const double r = (grid.position(k) - centre).norm();
        const double theta = params.amplitude * std::pow(r, params.exponent);
        Mat3 rot = Mat3::Identity();
        rot(0, 0) = std::cos(theta);
        rot(0, 1) = -std::sin(theta);
        rot(1, 0) = std::sin(theta);
        rot(1, 1) = std::cos(theta);
        p.set(k, params.scale * rot);
      }
      break;
    }
  }
  return p;
}

std::vector<RoughnessSample> roughness_sweep(const GridSpec& grid, const BoundaryMask& gamma,
                                             const std::vector<double>& exponents,
                                             const PFamilyParams& base, const EigenSettings& eigen) {
  const std::vector<double> w = quadrature_weights(grid);
  const bool constrained = std::any_of(gamma.begin(), gamma.end(), [](std::uint8_t v) { return v != 0; });
  std::vector<RoughnessSample> out;
  for (double e : exponents) {
    PFamilyParams params = base;
    params.exponent = e;
    MatrixField p = make_p_family(PFamily::GradedRoughness, grid, params);
    const MatrixField curl_p = fd_curl_rowwise(p);
    const KornProblem problem = constrained ? KornProblem(std::move(p), gamma) : KornProblem::without_boundary(std::move(p));
    const DiscreteForm form = assemble_form(problem);
    const RayleighResult l2 = min_rayleigh(form, GramKind::L2, eigen);
    const RayleighResult h1 = min_rayleigh(form, GramKind::H1, eigen);
    RoughnessSample s;
    s.exponent = e;
    s.lambda_min_l2 = l2.lambda_min;
    s.lambda_min_h1 = h1.lambda_min;
    s.kernel_dimension = l2.kernel_dimension;
    double sum = 0.0;
    for (std::size_t k = 0; k < curl_p.size(); ++k) sum += w[k] * curl_p.mat3(k).squaredNorm();
    s.curl_p_l2 = std::sqrt(sum);
    out.push_back(s);
  }
  return out;
}

// ---------------------------------------------------------------- rigid

RigidRecovery rigid_recover(const VectorField& phi, const VectorField& psi, double min_det) {
  if (!(phi.grid() == psi.grid())) throw Error(ErrorKind::DimensionMismatch, "Phi and Psi grids differ");
  if (phi.components() != 3 || psi.components() != 3 || phi.grid().dim != 3) {
    throw Error(ErrorKind::DimensionMismatch, "Phi and Psi must be 3-vector fields on a 3-D grid");
  }
  const GridSpec& g = phi.grid();
  const MatrixField grad_phi = fd_grad(phi);
  const MatrixField grad_psi = fd_grad(psi);
  const MatrixField grad_psi_inv = invert_checked(grad_psi, min_det);
  const std::vector<double> w = quadrature_weights(g);
  double volume = 0.0;
  for (double v : w) volume += v;

  std::vector<Mat3> a(g.point_count());
  Mat3 mean = Mat3::Zero();
  RigidRecovery rec;
  for (std::size_t k = 0; k < a.size(); ++k) {
    a[k] = grad_phi.mat3(k) * grad_psi_inv.mat3(k);
    rec.skewness_residual = std::max(rec.skewness_residual, max_abs(sym(a[k])));
    mean += w[k] * a[k];
  }
  mean /= volume;
  rec.a_matrix = SkewMat3::skew_part(mean);
  const Mat3 a_bar = rec.a_matrix.matrix();

  Vec3 t = Vec3::Zero();
  for (std::size_t k = 0; k < a.size(); ++k) {
    rec.constancy_residual = std::max(rec.constancy_residual, max_abs(a[k] - a_bar));
    t += w[k] * (phi.vec3(k) - a_bar * psi.vec3(k));
  }
  rec.translation = t / volume;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const Vec3 r = phi.vec3(k) - (a_bar * psi.vec3(k) + rec.translation);
    rec.reconstruction_residual = std::max(rec.reconstruction_residual, r.cwiseAbs().maxCoeff());
  }
  return rec;
}

}  // namespace kornkit

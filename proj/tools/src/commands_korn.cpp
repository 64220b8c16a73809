#include <algorithm>
#include <cmath>

#include "common.hpp"
#include "kornkit/analytic.hpp"
#include "kornkit/error.hpp"
#include "kornkit/field_io.hpp"
#include "kornkit/random.hpp"

namespace kornkit::cli::detail {

namespace {

EigenSettings eigen_from(Section& parent) {
  Section s = parent.child("eigen");
  EigenSettings e;
  e.dense_cap = static_cast<std::size_t>(s.integer("dense_cap", static_cast<int>(e.dense_cap), 0, 1 << 20));
  e.iterative_fallback = s.flag("iterative_fallback", e.iterative_fallback);
  e.kernel_rel_threshold = s.positive("kernel_rel_threshold", e.kernel_rel_threshold);
  e.iterative_block = s.integer("iterative_block", e.iterative_block, 1, 64);
  e.max_iterations = s.integer("max_iterations", e.max_iterations, 1, 100'000);
  e.iterative_tol = s.positive("iterative_tol", e.iterative_tol);
  s.finish();
  return e;
}

KornProblem problem_from(MatrixField p, BoundaryMask gamma, double min_det) {
  const bool any = std::any_of(gamma.begin(), gamma.end(), [](std::uint8_t v) { return v != 0; });
  return any ? KornProblem(std::move(p), std::move(gamma), min_det)
             : KornProblem::without_boundary(std::move(p), min_det);
}

nlohmann::json rayleigh_json(const RayleighResult& r, std::size_t listed) {
  std::vector<double> head(r.smallest.begin(),
                           r.smallest.begin() + static_cast<std::ptrdiff_t>(std::min(listed, r.smallest.size())));
  return {{"lambda_min", r.lambda_min},        {"kernel_dimension", r.kernel_dimension},
          {"threshold", r.threshold},          {"dense", r.dense},
          {"iterations", r.iterations},        {"smallest", head}};
}

double symmetry_defect(const Eigen::SparseMatrix<double>& m) {
  const Eigen::SparseMatrix<double> d = m - Eigen::SparseMatrix<double>(m.transpose());
  double worst = 0.0;
  for (Eigen::Index c = 0; c < d.outerSize(); ++c) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(d, c); it; ++it) worst = std::max(worst, std::abs(it.value()));
  }
  double scale = 0.0;
  for (Eigen::Index c = 0; c < m.outerSize(); ++c) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, c); it; ++it) scale = std::max(scale, std::abs(it.value()));
  }
  return scale > 0.0 ? worst / scale : worst;
}

nlohmann::json diagnostics_json(const DisplacementDiagnostics& d) {
  return {{"seminorm", d.seminorm},
          {"skewness_residual", d.skewness_residual},
          {"zeta_max", d.zeta_max},
          {"boundary_condition_vacuous", d.boundary_condition_vacuous},
          {"zeta_on_gamma", d.zeta_on_gamma},
          {"u_on_gamma", d.u_on_gamma},
          {"transport_residual",
           {{"max_residual", d.transport_residual.max_residual},
            {"per_axis", d.transport_residual.per_axis},
            {"tolerance", d.transport_residual.tolerance},
            {"pass", d.transport_residual.pass}}}};
}

}  // namespace

void run_korn_eig(Context& ctx) {
  const GridSpec grid = grid_from(ctx.root, 5, 3, 3);
  MatrixField p = p_from(ctx, ctx.root, grid, "identity");
  BoundaryMask gamma = gamma_from(ctx.root, grid, "face");
  const std::string gram = ctx.root.choice("gram", "both", {"l2", "h1", "both"});
  const EigenSettings eigen = eigen_from(ctx.root);
  const double min_det = ctx.root.positive("min_det", kDefaultMinDet);
  const int expect = ctx.root.integer("expect_kernel_dimension", -1, -1, 1 << 20);
  const int listed = ctx.root.integer("list_eigenvalues", 12, 1, 1000);
  ctx.root.finish();

  const KornProblem problem = problem_from(std::move(p), std::move(gamma), min_det);
  const DiscreteForm form = assemble_form(problem);
  const double sym_tol = ctx.tolerance("symmetry", 1e-12);
  const double defect = symmetry_defect(form.form);
  ctx.results["dofs"] = form.free_dofs.size();
  ctx.results["symmetry_defect"] = defect;
  ctx.results["boundary"] = problem.has_boundary();
  ctx.pass = defect <= sym_tol;

  Table t{"eigenvalues", {"gram", "index", "lambda"}, {}};
  std::vector<GramKind> kinds;
  if (gram != "h1") kinds.push_back(GramKind::L2);
  if (gram != "l2") kinds.push_back(GramKind::H1);
  for (GramKind k : kinds) {
    const RayleighResult r = min_rayleigh(form, k, eigen);
    const std::string name(to_string(k));
    ctx.results[name] = rayleigh_json(r, static_cast<std::size_t>(listed));
    ctx.tolerances["kernel_threshold_" + name] = r.threshold;
    // The form is non-negative: allow only round-off below zero.
    ctx.pass = ctx.pass && r.lambda_min >= -r.threshold;
    if (expect >= 0) ctx.pass = ctx.pass && r.kernel_dimension == static_cast<std::size_t>(expect);
    for (std::size_t i = 0; i < std::min<std::size_t>(static_cast<std::size_t>(listed), r.smallest.size()); ++i) {
      t.rows.push_back({name, std::to_string(i), fmt(r.smallest[i])});
    }
  }
  if (expect >= 0) ctx.results["expected_kernel_dimension"] = expect;
  ctx.tables.push_back(std::move(t));
}

void run_korn_probe(Context& ctx) {
  const GridSpec grid = grid_from(ctx.root, 5, 3, 3);
  MatrixField p = p_from(ctx, ctx.root, grid, "identity");
  BoundaryMask gamma = gamma_from(ctx.root, grid, "face");
  ProbeSettings settings;
  settings.eigen = eigen_from(ctx.root);
  const double min_det = ctx.root.positive("min_det", kDefaultMinDet);
  Section sweep = ctx.root.child("sweep");
  const std::vector<double> exponents = sweep.numbers("exponents", {});
  PFamilyParams sweep_params;
  sweep_params.amplitude = sweep.number("amplitude", sweep_params.amplitude);
  sweep.finish();
  ctx.root.finish();
  settings.transport_tolerance = ctx.tolerance("transport", settings.transport_tolerance);

  const BoundaryMask gamma_copy = gamma;
  const KornProblem problem = problem_from(std::move(p), std::move(gamma), min_det);
  const ProbeReport rep = norm_property_probe(problem, settings);
  ctx.results["verdict"] = rep.verdict;
  ctx.results["kernel_found"] = rep.kernel_found;
  ctx.results["rayleigh"] = rayleigh_json(rep.rayleigh, 12);
  if (rep.diagnostics) ctx.results["diagnostics"] = diagnostics_json(*rep.diagnostics);
  // A kernel is only acceptable when the boundary condition is vacuous.
  ctx.pass = !rep.kernel_found || (rep.diagnostics && rep.diagnostics->boundary_condition_vacuous);

  if (!exponents.empty()) {
    const std::vector<RoughnessSample> samples =
        roughness_sweep(grid, gamma_copy, exponents, sweep_params, settings.eigen);
    Table t{"roughness_sweep", {"exponent", "lambda_min_l2", "lambda_min_h1", "kernel_dimension", "curl_p_l2"}, {}};
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& s : samples) {
      t.rows.push_back({fmt(s.exponent), fmt(s.lambda_min_l2), fmt(s.lambda_min_h1),
                        std::to_string(s.kernel_dimension), fmt(s.curl_p_l2)});
      rows.push_back({{"exponent", s.exponent},
                      {"lambda_min_l2", s.lambda_min_l2},
                      {"lambda_min_h1", s.lambda_min_h1},
                      {"kernel_dimension", s.kernel_dimension},
                      {"curl_p_l2", s.curl_p_l2}});
    }
    ctx.results["roughness_sweep"] = {{"label", "evidence, not proof"}, {"samples", rows}};
    ctx.tables.push_back(std::move(t));
  }
}

void run_korn_rigid(Context& ctx) {
  const std::string kind = ctx.root.choice("case", "affine", {"affine", "curvilinear", "files"});
  const GridSpec grid = grid_from(ctx.root, kind == "curvilinear" ? 33 : 9, 3, 3);
  const auto phi_file = ctx.root.path("phi_file");
  const auto psi_file = ctx.root.path("psi_file");
  const double min_det = ctx.root.positive("min_det", kDefaultMinDet);
  ctx.root.finish();

  std::optional<VectorField> phi;
  std::optional<VectorField> psi;
  std::optional<SkewMat3> a_true;
  Vec3 t_true = Vec3::Zero();
  if (kind == "files") {
    if (!phi_file) throw ConfigError("phi_file", "required when case is \"files\"");
    if (!psi_file) throw ConfigError("psi_file", "required when case is \"files\"");
    phi = load_vector_field(ctx.resolve(*phi_file));
    psi = load_vector_field(ctx.resolve(*psi_file));
  } else {
    Rng rng(ctx.config.seed);
    const Vec3 omega(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    t_true = Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    a_true = smat(omega);
    const Vec3 axis(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    const Mat3 r = rodrigues(axis);
    psi.emplace(grid, 3);
    phi.emplace(grid, 3);
    for (std::size_t k = 0; k < grid.point_count(); ++k) {
      const Vec3 x = grid.position(k);
      const Vec3 s = kind == "affine" ? Vec3(r * x) : Vec3(x(0), x(1), x(2) + 0.25 * x(0) * x(0));
      const Vec3 f = a_true->matrix() * s + t_true;
      for (int c = 0; c < 3; ++c) {
        (*psi)(k, c) = s(c);
        (*phi)(k, c) = f(c);
      }
    }
  }
  const RigidRecovery rec = rigid_recover(*phi, *psi, min_det);
  const double tol = ctx.tolerance("residual", 1e-9);
  ctx.results["a"] = {rec.a_matrix.axial()(0), rec.a_matrix.axial()(1), rec.a_matrix.axial()(2)};
  ctx.results["translation"] = {rec.translation(0), rec.translation(1), rec.translation(2)};
  ctx.results["skewness_residual"] = rec.skewness_residual;
  ctx.results["constancy_residual"] = rec.constancy_residual;
  ctx.results["reconstruction_residual"] = rec.reconstruction_residual;
  ctx.pass = rec.skewness_residual <= tol && rec.constancy_residual <= tol && rec.reconstruction_residual <= tol;
  Table t{"recovery", {"quantity", "value"}, {}};
  t.rows.push_back({"skewness_residual", fmt(rec.skewness_residual)});
  t.rows.push_back({"constancy_residual", fmt(rec.constancy_residual)});
  t.rows.push_back({"reconstruction_residual", fmt(rec.reconstruction_residual)});
  if (a_true) {
    const double a_err = max_abs(rec.a_matrix.matrix() - a_true->matrix());
    const double t_err = (rec.translation - t_true).cwiseAbs().maxCoeff();
    ctx.results["a_error"] = a_err;
    ctx.results["translation_error"] = t_err;
    ctx.pass = ctx.pass && a_err <= tol && t_err <= tol;
    t.rows.push_back({"a_error", fmt(a_err)});
    t.rows.push_back({"translation_error", fmt(t_err)});
  }
  ctx.tables.push_back(std::move(t));
}

void run_korn_gp(Context& ctx) {
  const int coarsest = ctx.root.integer("coarsest", 17, 3, 1025);
  const int levels = ctx.root.integer("levels", 2, 1, 6);
  Section psec = ctx.root.child("p");
  const std::string family = psec.choice("family", "rotation-valued", {"identity", "rotation-valued", "graded-roughness"});
  PFamilyParams pp;
  pp.amplitude = psec.number("amplitude", pp.amplitude);
  pp.exponent = psec.number("exponent", 2.0);
  pp.scale = psec.positive("scale", pp.scale);
  pp.seed = psec.seed("seed", ctx.config.seed);
  psec.finish();
  Section zsec = ctx.root.child("zeta");
  AnalyticParams zp;
  zp.amplitude = zsec.number("amplitude", 1.0);
  zp.wavenumber = zsec.number("wavenumber", 1.0);
  zp.seed = zsec.seed("seed", ctx.config.seed + 1);
  zsec.finish();
  const double min_order = ctx.root.positive("min_order", 1.9);
  const double exact_floor = ctx.root.positive("exact_floor", 1e-12);
  ctx.root.finish();
  ctx.tolerances["min_order"] = min_order;
  ctx.tolerances["exact_floor"] = exact_floor;

  const PFamily fam = parse_p_family(family);
  const AnalyticVectorField zeta = AnalyticVectorField::make(AnalyticKind::Trigonometric, zp, 3);
  const ConvergenceReport rep = measure_convergence(GridSpec::cube(3, coarsest), levels, [&](const GridSpec& g) {
    return gp_consistency_discrepancy(zeta.sample(g), make_p_family(fam, g, pp));
  });
  const GridSpec g0 = GridSpec::cube(3, coarsest);
  const CoefficientTensorField gp = build_gp(make_p_family(fam, g0, pp));
  ctx.results["gp_max_abs"] = gp.max_abs();
  ctx.results["spacings"] = rep.spacings;
  ctx.results["discrepancies"] = rep.errors;
  ctx.results["orders"] = rep.orders;
  Table t{"convergence", {"h", "discrepancy", "order"}, {}};
  for (std::size_t k = 0; k < rep.errors.size(); ++k) {
    t.rows.push_back({fmt(rep.spacings[k]), fmt(rep.errors[k]), k == 0 ? "" : fmt(rep.orders[k - 1])});
  }
  ctx.tables.push_back(std::move(t));
  const bool exact = *std::max_element(rep.errors.begin(), rep.errors.end()) <= exact_floor;
  ctx.results["exact_at_all_levels"] = exact;
  ctx.pass = exact || (levels >= 2 && rep.min_order() >= min_order);
}

}  // namespace kornkit::cli::detail

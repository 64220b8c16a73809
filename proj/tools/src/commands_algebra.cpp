#include <algorithm>
#include <cmath>

#include "common.hpp"
#include "kornkit/algebra.hpp"
#include "kornkit/analytic.hpp"
#include "kornkit/random.hpp"

namespace kornkit::cli::detail {

namespace {

Mat3 random_mat(Rng& rng, double lo = -1.0, double hi = 1.0) {
  Mat3 m;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) m(i, j) = rng.uniform(lo, hi);
  }
  return m;
}

Vec3 random_vec(Rng& rng) { return {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)}; }

struct CheckTable {
  Context& ctx;
  Table table{"checks", {"check", "value", "tolerance", "pass"}, {}};

  void add(const std::string& name, double value, double tol) {
    const bool ok = value <= tol;
    ctx.pass = ctx.pass && ok;
    ctx.results[name] = {{"value", finite_or_string(value)}, {"tolerance", tol}, {"pass", ok}};
    table.rows.push_back({name, fmt(value), fmt(tol), ok ? "1" : "0"});
  }
};

}  // namespace

void run_algebra_selftest(Context& ctx) {
  const int samples = ctx.root.integer("samples", 1000, 1, 1'000'000);
  ctx.root.finish();
  const auto tol = [&](const std::string& name, double t) { return ctx.tolerance(name, t); };
  CheckTable checks{ctx};
  Rng rng(ctx.config.seed);

  {
    Vec9 v;
    for (int k = 0; k < 9; ++k) v(k) = k + 1;
    Mat3 expected;
    expected << 1, 2, 3, 4, 5, 6, 7, 8, 9;
    checks.add("mat_of_vec_example", max_abs(mat_of_vec(v) - expected), 0.0);
    const Mat3 m = expected;
    const double d = (dvec(m) - Vec3(1, 5, 9)).cwiseAbs().maxCoeff() +
                     (skewvec(m) - Vec3(-6, 3, -2)).cwiseAbs().maxCoeff() +
                     (symvec(m) - Vec3(8, -7, 4)).cwiseAbs().maxCoeff();
    checks.add("dvec_skewvec_symvec_example", d, 0.0);
    Mat3 s;
    s << 0, -3, 2, 3, 0, -1, -2, 1, 0;
    checks.add("smat_example", max_abs(smat(Vec3(1, 2, 3)).matrix() - s), 0.0);
  }

  double roundtrip = 0.0;
  double cross = 0.0;
  double so3 = 0.0;
  double l_sym = 0.0;
  double det_rel = 0.0;
  double inv_res = 0.0;
  double skew_spec = 0.0;
  double conj = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Mat3 y = random_mat(rng);
    const Vec9 v = vec_of_mat(random_mat(rng));
    roundtrip = std::max(roundtrip, (vec_of_mat(mat_of_vec(v)) - v).cwiseAbs().maxCoeff());
    const Vec3 a = random_vec(rng);
    const Vec3 x = random_vec(rng);
    cross = std::max(cross, (smat(a).matrix() * x - a.cross(x)).cwiseAbs().maxCoeff());
    const SkewMat3 sk = smat(a);
    so3 = std::max({so3, (axl(sk) - a).cwiseAbs().maxCoeff(), (skewvec(sk.matrix()) - a).cwiseAbs().maxCoeff(),
                    (symvec(sk.matrix()) - a).cwiseAbs().maxCoeff(), dvec(sk.matrix()).cwiseAbs().maxCoeff()});

    const LOperators l = build_l_operators(y);
    l_sym = std::max({l_sym, (l.full - l.full.transpose()).cwiseAbs().maxCoeff(),
                      (l.full - (l.skew + l.sym)).cwiseAbs().maxCoeff()});
    const double dy = y.determinant();
    det_rel = std::max(det_rel, std::abs(det_l(y) + 2.0 * dy * dy * dy) / std::max(1.0, std::abs(dy * dy * dy)));

    const Mat3 yw = Mat3::Identity() + 0.3 * random_mat(rng);
    const Mat9 lw = build_l(yw);
    inv_res = std::max(inv_res, (lw * invert_l(yw) - Mat9::Identity()).cwiseAbs().maxCoeff() /
                                    lw.cwiseAbs().maxCoeff());

    Grad27 g;
    const Mat3 grad_axl = random_mat(rng);
    // Entry gradients of smat(zeta) from the gradients of zeta.
    for (int d = 0; d < 3; ++d) {
      const Mat3 sd = smat(grad_axl.col(d)).matrix();
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) g(i, j, d) = sd(i, j);
      }
    }
    const Mat3 curl_y = random_mat(rng);
    skew_spec = std::max(skew_spec, max_abs(curl_product_pointwise(g, sk.matrix(), y, curl_y) -
                                            curl_product_skew_pointwise(grad_axl, sk, y, curl_y)));

    const ConjugationSides c = sym_conjugation(random_mat(rng), Mat3::Identity() + 0.3 * random_mat(rng));
    conj = std::max(conj, max_abs(c.conjugated - c.direct));
  }
  checks.add("mat_vec_roundtrip", roundtrip, 0.0);
  checks.add("smat_cross_product", cross, tol("smat_cross_product", 1e-15));
  checks.add("so3_extractions", so3, 0.0);
  checks.add("l_symmetric_and_split", l_sym, 0.0);
  checks.add("det_l_identity", det_rel, tol("det_l_identity", 1e-10));
  checks.add("invert_l_residual", inv_res, tol("invert_l_residual", 1e-12));
  checks.add("skew_specialisation", skew_spec, tol("skew_specialisation", 1e-13));
  checks.add("conjugation_identity", conj, tol("conjugation_identity", 1e-12));

  {
    Mat3 y = Vec3(1, 2, 3).asDiagonal();
    checks.add("det_l_diag123", std::abs(det_l(y) + 432.0), tol("det_l_identity", 1e-10) * 432.0);
  }
  ctx.results["samples"] = samples;
  ctx.tables.push_back(std::move(checks.table));
}

void run_fields_verify_curl(Context& ctx) {
  const std::string kind_name =
      ctx.root.choice("kind", "polynomial", {"polynomial", "trigonometric", "rotation-valued"});
  const bool multilinear = ctx.root.flag("multilinear", true);
  const int coarsest = ctx.root.integer("coarsest", 17, 3, 1025);
  const int levels = ctx.root.integer("levels", 2, 1, 6);
  const double amplitude = ctx.root.number("amplitude", 1.0);
  const double wavenumber = ctx.root.number("wavenumber", 1.0);
  const bool exact_curl = ctx.root.flag("exact_curl_y", false);
  const double min_order = ctx.root.positive("min_order", 1.9);
  ctx.root.finish();

  const AnalyticKind kind = parse_analytic_kind(kind_name);
  AnalyticParams px;
  px.multilinear = multilinear;
  px.amplitude = amplitude;
  px.wavenumber = wavenumber;
  px.seed = ctx.config.seed;
  AnalyticParams py = px;
  py.seed = ctx.config.seed + 0x9e3779b97f4a7c15ULL;
  // X is always polynomial or trigonometric; Y may be rotation-valued.
  const AnalyticKind kind_x = kind == AnalyticKind::RotationValued ? AnalyticKind::Trigonometric : kind;
  const AnalyticMatrixField fx = AnalyticMatrixField::make(kind_x, px);
  const AnalyticMatrixField fy = AnalyticMatrixField::make(kind, py);

  const GridSpec grid = GridSpec::cube(3, coarsest);
  const ConvergenceReport rep = verify_curl_product(
      [&](const GridSpec& g) {
        CurlProductCase c{fx.sample(g), fy.sample(g), std::nullopt};
        if (exact_curl) c.curl_y = fy.sample_curl(g);
        return c;
      },
      grid, levels);

  Table table{"convergence", {"h", "discrepancy", "order"}, {}};
  for (std::size_t k = 0; k < rep.errors.size(); ++k) {
    table.rows.push_back({fmt(rep.spacings[k]), fmt(rep.errors[k]), k == 0 ? "" : fmt(rep.orders[k - 1])});
  }
  ctx.tables.push_back(std::move(table));
  ctx.results["spacings"] = rep.spacings;
  ctx.results["discrepancies"] = rep.errors;
  ctx.results["orders"] = rep.orders;

  const bool polynomial_exact = kind == AnalyticKind::Polynomial && multilinear;
  if (polynomial_exact) {
    const double tol = ctx.tolerance("max_discrepancy", 1e-9);
    ctx.pass = rep.finest_error() <= tol;
    ctx.results["criterion"] = "finest discrepancy <= tolerance (stencils exact on this data)";
  } else {
    ctx.tolerances["min_order"] = min_order;
    ctx.pass = levels >= 2 && rep.min_order() >= min_order;
    ctx.results["criterion"] = "observed order >= min_order";
    ctx.results["min_order_observed"] = finite_or_string(rep.min_order());
  }
}

}  // namespace kornkit::cli::detail

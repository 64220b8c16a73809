#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include "kornkit/error.hpp"
#include "kornkit/korn.hpp"
#include "kornkit/random.hpp"

namespace kornkit {

namespace {

using Triplet = Eigen::Triplet<double>;
using SpMat = Eigen::SparseMatrix<double>;

struct StencilTerm {
  std::size_t point;
  double coeff;
};

// The fd_grad stencil for d/dx_axis at one point.
std::array<StencilTerm, 3> stencil(const GridSpec& g, const Index3& ijk, int axis, int* terms) {
  const int n = g.shape[axis];
  const int i = ijk[axis];
  const double s = 1.0 / (2.0 * g.h);
  auto at = [&](int k) {
    Index3 q = ijk;
    q[axis] = k;
    return g.index(q);
  };
  if (i == 0) {
    *terms = 3;
    return {{{at(0), -3.0 * s}, {at(1), 4.0 * s}, {at(2), -1.0 * s}}};
  }
  if (i == n - 1) {
    *terms = 3;
    return {{{at(n - 1), 3.0 * s}, {at(n - 2), -4.0 * s}, {at(n - 3), 1.0 * s}}};
  }
  *terms = 2;
  return {{{at(i + 1), s}, {at(i - 1), -s}, {0, 0.0}}};
}

double trace_of(const SpMat& m) { return m.diagonal().sum(); }

void require_3d(const GridSpec& g) {
  if (g.dim != 3) throw Error(ErrorKind::DimensionMismatch, "Korn operators need a 3-D grid");
  g.require_stencil_points();
}

}  // namespace

// ---------------------------------------------------------------- problem

BoundaryMask face_mask(const GridSpec& grid, int axis, bool low_side) {
  if (axis < 0 || axis >= grid.dim) throw Error(ErrorKind::InvalidArgument, "axis out of range");
  BoundaryMask mask(grid.point_count(), 0);
  const int target = low_side ? 0 : grid.shape[axis] - 1;
  for (std::size_t p = 0; p < grid.point_count(); ++p) {
    if (grid.multi_index(p)[axis] == target) mask[p] = 1;
  }
  return mask;
}

MatrixField invert_checked(const MatrixField& p, double min_det) {
  if (p.rows() != 3 || p.cols() != 3) throw Error(ErrorKind::DimensionMismatch, "P must be 3x3");
  MatrixField inv(p.grid(), 3, 3);
  for (std::size_t k = 0; k < p.size(); ++k) {
    const Mat3 m = p.mat3(k);
    const double det = m.determinant();
    if (!(det >= min_det)) {
      throw Error(ErrorKind::DeterminantTooSmall,
                  "det P = " + std::to_string(det) + " at point " + std::to_string(k) +
                      " is below min_det = " + std::to_string(min_det));
    }
    inv.set(k, m.inverse());
  }
  return inv;
}

KornProblem::KornProblem(MatrixField p, BoundaryMask gamma, double min_det)
    : KornProblem(std::move(p), std::move(gamma), min_det, false) {}

KornProblem KornProblem::without_boundary(MatrixField p, double min_det) {
  BoundaryMask none(p.grid().point_count(), 0);
  return KornProblem(std::move(p), std::move(none), min_det, true);
}

KornProblem::KornProblem(MatrixField p, BoundaryMask gamma, double min_det, bool allow_empty)
    : p_(std::move(p)), p_inv_(invert_checked(p_, min_det)), gamma_(std::move(gamma)), min_det_(min_det) {
  require_3d(p_.grid());
  if (gamma_.size() != p_.grid().point_count()) {
    throw Error(ErrorKind::DimensionMismatch, "boundary mask length does not match the grid");
  }
  for (std::size_t k = 0; k < gamma_.size(); ++k) {
    if (gamma_[k] && !p_.grid().is_boundary(p_.grid().multi_index(k))) {
      throw Error(ErrorKind::InvalidArgument, "boundary mask marks an interior point");
    }
  }
  if (!allow_empty && !has_boundary()) {
    throw Error(ErrorKind::EmptyBoundaryPatch, "gamma must contain at least one boundary point");
  }
}

bool KornProblem::has_boundary() const {
  return std::any_of(gamma_.begin(), gamma_.end(), [](std::uint8_t v) { return v != 0; });
}

std::vector<double> quadrature_weights(const GridSpec& grid) {
  std::vector<double> w(grid.point_count());
  const double cell = std::pow(grid.h, grid.dim);
  for (std::size_t p = 0; p < w.size(); ++p) {
    const Index3 ijk = grid.multi_index(p);
    double v = cell;
    for (int a = 0; a < grid.dim; ++a) {
      if (ijk[a] == 0 || ijk[a] == grid.shape[a] - 1) v *= 0.5;
    }
    w[p] = v;
  }
  return w;
}

double seminorm(const VectorField& u, const MatrixField& p, double min_det) {
  if (!(u.grid() == p.grid())) throw Error(ErrorKind::DimensionMismatch, "u and P grids differ");
  if (u.components() != 3) throw Error(ErrorKind::DimensionMismatch, "u must have 3 components");
  require_3d(u.grid());
  const MatrixField p_inv = invert_checked(p, min_det);
  const MatrixField grad = fd_grad(u);
  const std::vector<double> w = quadrature_weights(u.grid());
  double sum = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    sum += w[k] * sym(grad.mat3(k) * p_inv.mat3(k)).squaredNorm();
  }
  return std::sqrt(sum);
}

std::string_view to_string(GramKind kind) { return kind == GramKind::L2 ? "L2" : "H1"; }

// ---------------------------------------------------------------- assembly

Eigen::VectorXd DiscreteForm::restrict(const VectorField& u) const {
  if (!(u.grid() == grid) || u.components() != 3) {
    throw Error(ErrorKind::DimensionMismatch, "displacement does not match the form");
  }
  Eigen::VectorXd out(static_cast<Eigen::Index>(free_dofs.size()));
  for (std::size_t k = 0; k < free_dofs.size(); ++k) out(static_cast<Eigen::Index>(k)) = u.data()[free_dofs[k]];
  return out;
}

VectorField DiscreteForm::expand(const Eigen::VectorXd& free_values) const {
  if (free_values.size() != static_cast<Eigen::Index>(free_dofs.size())) {
    throw Error(ErrorKind::DimensionMismatch, "free vector length does not match the form");
  }
  VectorField u(grid, 3);
  for (std::size_t k = 0; k < free_dofs.size(); ++k) u.data()[free_dofs[k]] = free_values(static_cast<Eigen::Index>(k));
  return u;
}

double DiscreteForm::value(const VectorField& u) const {
  const Eigen::VectorXd x = restrict(u);
  return x.dot(form * x);
}

DiscreteForm assemble_form(const KornProblem& problem) {
  const GridSpec& g = problem.grid();
  const std::size_t n_points = g.point_count();
  const auto n_dofs = static_cast<Eigen::Index>(3 * n_points);
  const std::vector<double> w = quadrature_weights(g);

  // B maps nodal displacements to the nine entries of sym(grad u P^{-1}).
  std::vector<Triplet> b_trip;
  b_trip.reserve(n_points * 9 * 3 * 3 * 2);
  // S_d: scalar derivative operators for the H^1 Gram.
  std::vector<std::vector<Triplet>> d_trip(3);
  for (std::size_t p = 0; p < n_points; ++p) {
    const Index3 ijk = g.multi_index(p);
    const Mat3 p_inv = problem.p_inverse().mat3(p);
    for (int d = 0; d < 3; ++d) {
      int terms = 0;
      const auto st = stencil(g, ijk, d, &terms);
      for (int t = 0; t < terms; ++t) {
        const std::size_t q = st[static_cast<std::size_t>(t)].point;
        const double c = st[static_cast<std::size_t>(t)].coeff;
        d_trip[static_cast<std::size_t>(d)].emplace_back(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q), c);
        for (int i = 0; i < 3; ++i) {
          for (int j = 0; j < 3; ++j) {
            const auto row = static_cast<Eigen::Index>(9 * p + static_cast<std::size_t>(3 * i + j));
            b_trip.emplace_back(row, static_cast<Eigen::Index>(3 * q + static_cast<std::size_t>(i)),
                                0.5 * c * p_inv(d, j));
            b_trip.emplace_back(row, static_cast<Eigen::Index>(3 * q + static_cast<std::size_t>(j)),
                                0.5 * c * p_inv(d, i));
          }
        }
      }
    }
  }
  SpMat b(static_cast<Eigen::Index>(9 * n_points), n_dofs);
  b.setFromTriplets(b_trip.begin(), b_trip.end());

  Eigen::VectorXd w9(static_cast<Eigen::Index>(9 * n_points));
  Eigen::VectorXd w3(n_dofs);
  for (std::size_t p = 0; p < n_points; ++p) {
    w9.segment<9>(static_cast<Eigen::Index>(9 * p)).setConstant(w[p]);
    w3.segment<3>(static_cast<Eigen::Index>(3 * p)).setConstant(w[p]);
  }
  const SpMat k_full = SpMat(b.transpose() * w9.asDiagonal() * b);

  const auto np = static_cast<Eigen::Index>(n_points);
  const Eigen::Map<const Eigen::VectorXd> wp(w.data(), np);
  SpMat stiffness_scalar(np, np);
  for (int d = 0; d < 3; ++d) {
    SpMat dd(np, np);
    dd.setFromTriplets(d_trip[static_cast<std::size_t>(d)].begin(), d_trip[static_cast<std::size_t>(d)].end());
    stiffness_scalar += SpMat(dd.transpose() * wp.asDiagonal() * dd);
  }
  std::vector<Triplet> h1_trip;
  h1_trip.reserve(static_cast<std::size_t>(stiffness_scalar.nonZeros()) * 3 + 3 * n_points);
  for (Eigen::Index col = 0; col < stiffness_scalar.outerSize(); ++col) {
    for (SpMat::InnerIterator it(stiffness_scalar, col); it; ++it) {
      for (Eigen::Index c = 0; c < 3; ++c) h1_trip.emplace_back(3 * it.row() + c, 3 * it.col() + c, it.value());
    }
  }
  for (Eigen::Index k = 0; k < n_dofs; ++k) h1_trip.emplace_back(k, k, w3(k));
  SpMat h1_full(n_dofs, n_dofs);
  h1_full.setFromTriplets(h1_trip.begin(), h1_trip.end());

  DiscreteForm form;
  form.grid = g;
  for (std::size_t p = 0; p < n_points; ++p) {
    if (problem.gamma()[p]) continue;
    for (std::size_t c = 0; c < 3; ++c) form.free_dofs.push_back(3 * p + c);
  }
  const auto n_free = static_cast<Eigen::Index>(form.free_dofs.size());
  std::vector<Triplet> sel_trip;
  sel_trip.reserve(form.free_dofs.size());
  for (std::size_t k = 0; k < form.free_dofs.size(); ++k) {
    sel_trip.emplace_back(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(form.free_dofs[k]), 1.0);
  }
  SpMat sel(n_free, n_dofs);
  sel.setFromTriplets(sel_trip.begin(), sel_trip.end());

  form.form = SpMat(sel * k_full * sel.transpose());
  form.gram_h1 = SpMat(sel * h1_full * sel.transpose());
  const Eigen::VectorXd w_free = sel * w3;
  form.gram_l2 = SpMat(n_free, n_free);
  std::vector<Triplet> l2_trip;
  for (Eigen::Index k = 0; k < n_free; ++k) l2_trip.emplace_back(k, k, w_free(k));
  form.gram_l2.setFromTriplets(l2_trip.begin(), l2_trip.end());
  return form;
}

// ---------------------------------------------------------------- eigen

namespace {

// M-orthonormalises the columns of x in place (two passes of Gram-Schmidt).
void m_orthonormalize(Eigen::MatrixXd& x, const SpMat& m) {
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      const Eigen::VectorXd mx = m * x.col(j);
      for (Eigen::Index i = 0; i < j; ++i) x.col(j) -= x.col(i).dot(mx) * x.col(i);
    }
    const double nrm = std::sqrt(x.col(j).dot(m * x.col(j)));
    if (!(nrm > 0.0) || !std::isfinite(nrm)) {
      throw Error(ErrorKind::EigensolveFailed, "subspace collapsed during orthonormalisation");
    }
    x.col(j) /= nrm;
  }
}

RayleighResult solve_iterative(const DiscreteForm& df, const SpMat& k, const SpMat& m,
                               const EigenSettings& s, double scale) {
  const Eigen::Index n = k.rows();
  const Eigen::Index block = std::min<Eigen::Index>(std::max(s.iterative_block, 1) + 2, n);
  const double shift = -1e-6 * scale;
  Eigen::SimplicialLDLT<SpMat> solver(SpMat(k - shift * m));
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::EigensolveFailed, "factorisation of the shifted operator failed");
  }
  Rng rng(0x5eed);
  Eigen::MatrixXd x(n, block);
  for (Eigen::Index j = 0; j < block; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) x(i, j) = rng.uniform(-1.0, 1.0);
  }
  m_orthonormalize(x, m);

  const Eigen::Index wanted = std::min<Eigen::Index>(s.iterative_block, block);
  Eigen::VectorXd previous = Eigen::VectorXd::Constant(block, std::numeric_limits<double>::infinity());
  RayleighResult res;
  res.dense = false;
  for (int it = 1; it <= s.max_iterations; ++it) {
    Eigen::MatrixXd y = solver.solve(Eigen::MatrixXd(m * x));
    m_orthonormalize(y, m);
    const Eigen::MatrixXd kr = y.transpose() * (k * y);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(0.5 * (kr + kr.transpose()));
    x = y * ritz.eigenvectors();
    const Eigen::VectorXd theta = ritz.eigenvalues();
    bool converged = true;
    for (Eigen::Index j = 0; j < wanted; ++j) {
      converged = converged && std::abs(theta(j) - previous(j)) <= s.iterative_tol * std::max(std::abs(theta(j)), scale);
    }
    previous = theta;
    if (converged) {
      res.iterations = it;
      for (Eigen::Index j = 0; j < wanted; ++j) res.smallest.push_back(theta(j));
      res.lambda_min = theta(0);
      res.eigvec = df.expand(x.col(0));
      return res;
    }
  }
  throw Error(ErrorKind::EigensolveFailed,
              "shift-invert iteration did not converge in " + std::to_string(s.max_iterations) + " sweeps");
}

}  // namespace

RayleighResult min_rayleigh(const DiscreteForm& df, GramKind gram, const EigenSettings& s) {
  const SpMat& k = df.form;
  const SpMat& m = df.gram(gram);
  const auto n = static_cast<std::size_t>(k.rows());
  if (n == 0) throw Error(ErrorKind::EigensolveFailed, "no free degrees of freedom");
  const double scale = trace_of(k) / trace_of(m);

  RayleighResult res;
  if (n <= s.dense_cap) {
    const Eigen::MatrixXd kd(k);
    const Eigen::MatrixXd md(m);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(0.5 * (kd + kd.transpose()),
                                                                  0.5 * (md + md.transpose()));
    if (ges.info() != Eigen::Success) throw Error(ErrorKind::EigensolveFailed, "dense generalized eigensolve failed");
    const Eigen::VectorXd& ev = ges.eigenvalues();
    res.smallest.assign(ev.data(), ev.data() + ev.size());
    res.lambda_min = ev(0);
    res.eigvec = df.expand(ges.eigenvectors().col(0));
    res.dense = true;
  } else {
    if (!s.iterative_fallback) {
      throw Error(ErrorKind::EigensolveFailed, std::to_string(n) + " DOFs exceed the dense cap and no fallback is enabled");
    }
    res = solve_iterative(df, k, m, s, scale);
  }
  res.threshold = s.kernel_rel_threshold * scale;
  res.kernel_dimension = static_cast<std::size_t>(
      std::count_if(res.smallest.begin(), res.smallest.end(), [&](double v) { return v < res.threshold; }));
  return res;
}

}  // namespace kornkit

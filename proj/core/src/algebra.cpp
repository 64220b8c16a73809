#include "kornkit/algebra.hpp"

#include <cmath>

#include <Eigen/LU>

#include "kornkit/error.hpp"

namespace kornkit {

namespace {

void put_block(Mat9& target, int block_row, int block_col, const Mat3& block) {
  target.block<3, 3>(3 * block_row, 3 * block_col) = block;
}

// Gradient of entry (row, col), optionally negated, placed into slot of a
// nine-vector.
void put_grad(Vec9& target, int slot, const Grad27& g, int row, int col,
              double sign) {
  target.segment<3>(3 * slot) = sign * g.gradient_of(row, col);
}

}  // namespace

Mat3 make_mat3(std::span<const double, 9> entries) {
  Mat3 m;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double v = entries[static_cast<std::size_t>(3 * i + j)];
      if (!std::isfinite(v)) {
        throw Error(ErrorKind::NonFinite, "matrix entry is not finite");
      }
      m(i, j) = v;
    }
  }
  return m;
}

bool all_finite(const Mat3& m) { return m.allFinite(); }

SkewMat3 SkewMat3::skew_part(const Mat3& m) {
  return SkewMat3(Vec3(0.5 * (m(2, 1) - m(1, 2)), 0.5 * (m(0, 2) - m(2, 0)),
                       0.5 * (m(1, 0) - m(0, 1))));
}

Mat3 SkewMat3::matrix() const {
  Mat3 m;
  m << 0.0, -axial_(2), axial_(1),  //
      axial_(2), 0.0, -axial_(0),   //
      -axial_(1), axial_(0), 0.0;
  return m;
}

Mat3 mat_of_vec(const Vec9& v) {
  Mat3 m;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) m(i, j) = v(3 * i + j);
  }
  return m;
}

Vec9 vec_of_mat(const Mat3& m) {
  Vec9 v;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) v(3 * i + j) = m(i, j);
  }
  return v;
}

Vec3 axl(const SkewMat3& a) { return a.axial(); }
SkewMat3 smat(const Vec3& a) { return SkewMat3(a); }

Vec3 dvec(const Mat3& m) { return {m(0, 0), m(1, 1), m(2, 2)}; }
Vec3 skewvec(const Mat3& m) { return {-m(1, 2), m(0, 2), -m(0, 1)}; }
Vec3 symvec(const Mat3& m) { return {m(2, 1), -m(2, 0), m(1, 0)}; }

Mat3 sym(const Mat3& m) { return 0.5 * (m + m.transpose()); }

LOperators build_l_operators(const Mat3& y) {
  const Mat3 s1 = smat(y.row(0).transpose()).matrix();
  const Mat3 s2 = smat(y.row(1).transpose()).matrix();
  const Mat3 s3 = smat(y.row(2).transpose()).matrix();

  LOperators ops;
  ops.diag.setZero();
  ops.skew.setZero();
  ops.sym.setZero();

  put_block(ops.diag, 0, 0, -s1);
  put_block(ops.diag, 1, 1, -s2);
  put_block(ops.diag, 2, 2, -s3);

  put_block(ops.skew, 0, 1, -s3);
  put_block(ops.skew, 0, 2, s2);
  put_block(ops.skew, 1, 0, s3);

  put_block(ops.sym, 1, 2, -s1);
  put_block(ops.sym, 2, 0, -s2);
  put_block(ops.sym, 2, 1, s1);

  ops.full = ops.skew + ops.sym;
  return ops;
}

Mat9 build_l(const Mat3& y) { return build_l_operators(y).full; }

double det_l(const Mat3& y) {
  return Eigen::PartialPivLU<Mat9>(build_l(y)).determinant();
}

Mat9 invert_l(const Mat3& y, double min_det) {
  if (!(min_det > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "min_det must be positive");
  }
  const double det_y = y.determinant();
  if (!(std::abs(det_y) >= min_det)) {
    throw Error(ErrorKind::DeterminantTooSmall,
                "|det Y| = " + std::to_string(std::abs(det_y)) +
                    " below min_det = " + std::to_string(min_det));
  }
  return Eigen::PartialPivLU<Mat9>(build_l(y)).inverse();
}

Vec9 grad_hat_dvec(const Grad27& g) {
  Vec9 out;
  put_grad(out, 0, g, 0, 0, 1.0);
  put_grad(out, 1, g, 1, 1, 1.0);
  put_grad(out, 2, g, 2, 2, 1.0);
  return out;
}

Vec9 grad_hat_skewvec(const Grad27& g) {
  Vec9 out;
  put_grad(out, 0, g, 1, 2, -1.0);
  put_grad(out, 1, g, 0, 2, 1.0);
  put_grad(out, 2, g, 0, 1, -1.0);
  return out;
}

Vec9 grad_hat_symvec(const Grad27& g) {
  Vec9 out;
  put_grad(out, 0, g, 2, 1, 1.0);
  put_grad(out, 1, g, 2, 0, -1.0);
  put_grad(out, 2, g, 1, 0, 1.0);
  return out;
}

Mat3 curl_product_pointwise(const Grad27& grad_x, const Mat3& x, const Mat3& y,
                            const Mat3& curl_y) {
  const LOperators ops = build_l_operators(y);
  const Vec9 derivative_part = ops.diag * grad_hat_dvec(grad_x) +
                               ops.skew * grad_hat_skewvec(grad_x) +
                               ops.sym * grad_hat_symvec(grad_x);
  return mat_of_vec(derivative_part) + x * curl_y;
}

Mat3 curl_product_skew_pointwise(const Mat3& grad_axl, const SkewMat3& a,
                                 const Mat3& y, const Mat3& curl_y) {
  return mat_of_vec(build_l(y) * vec_of_mat(grad_axl)) + a.matrix() * curl_y;
}

ConjugationSides sym_conjugation(const Mat3& grad_phi, const Mat3& grad_psi,
                                 double min_det) {
  const double det_psi = grad_psi.determinant();
  if (!(std::abs(det_psi) >= min_det)) {
    throw Error(ErrorKind::DeterminantTooSmall,
                "det grad Psi below min_det in conjugation identity");
  }
  const Mat3 inv = grad_psi.inverse();
  ConjugationSides sides;
  sides.conjugated =
      inv.transpose() * sym(grad_phi.transpose() * grad_psi) * inv;
  sides.direct = sym(grad_phi * inv);
  return sides;
}

double max_abs(const Mat3& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace kornkit

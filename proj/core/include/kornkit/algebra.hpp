#pragma once

// Pointwise 3x3 matrix algebra: the R^9 <-> R^{3x3} isomorphisms, the
// so(3) <-> R^3 isomorphism, the dvec/skewvec/symvec extractions, the 9x9
// L-operators built from the rows of a matrix Y, and the pointwise formula
// for the row-wise Curl of a product XY.
//
// Entry numbering is row-major throughout: a_1..a_9 is
//   [a1 a2 a3]
//   [a4 a5 a6]
//   [a7 a8 a9]
// so vec(M)[3*i + j] == M(i, j) with zero-based i, j.

#include <array>
#include <span>

#include <Eigen/Dense>

namespace kornkit {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec9 = Eigen::Matrix<double, 9, 1>;
using Mat9 = Eigen::Matrix<double, 9, 9>;

inline constexpr double kDefaultMinDet = 1e-12;

/// Builds a Mat3 from nine row-major entries; throws NonFinite on NaN/Inf.
Mat3 make_mat3(std::span<const double, 9> entries);

bool all_finite(const Mat3& m);

/// A skew-symmetric 3x3 matrix stored by its axial vector, so A + A^T == 0
/// holds exactly no matter what arithmetic produced it.
class SkewMat3 {
 public:
  SkewMat3() : axial_(Vec3::Zero()) {}
  explicit SkewMat3(const Vec3& axial) : axial_(axial) {}

  /// Skew part (M - M^T)/2 of an arbitrary matrix.
  static SkewMat3 skew_part(const Mat3& m);

  const Vec3& axial() const { return axial_; }
  Mat3 matrix() const;
  Vec3 apply(const Vec3& x) const { return axial_.cross(x); }

 private:
  Vec3 axial_;
};

/// Gradients of the nine entries of a matrix field at one point, stacked in
/// vec order: values[3*k + d] = d/dx_d of vec(X)[k].
struct Grad27 {
  std::array<double, 27> values{};

  double& operator()(int row, int col, int axis) {
    return values[static_cast<std::size_t>(9 * row + 3 * col + axis)];
  }
  double operator()(int row, int col, int axis) const {
    return values[static_cast<std::size_t>(9 * row + 3 * col + axis)];
  }
  Vec3 gradient_of(int row, int col) const {
    return {(*this)(row, col, 0), (*this)(row, col, 1), (*this)(row, col, 2)};
  }
};

Mat3 mat_of_vec(const Vec9& v);
Vec9 vec_of_mat(const Mat3& m);

Vec3 axl(const SkewMat3& a);
SkewMat3 smat(const Vec3& a);

Vec3 dvec(const Mat3& m);
Vec3 skewvec(const Mat3& m);
Vec3 symvec(const Mat3& m);

Mat3 sym(const Mat3& m);

struct LOperators {
  Mat9 diag;
  Mat9 skew;
  Mat9 sym;
  Mat9 full;
};

LOperators build_l_operators(const Mat3& y);

/// L_Y alone, for callers that do not need the split.
Mat9 build_l(const Mat3& y);

/// Determinant of L_Y by partially pivoted LU.
double det_l(const Mat3& y);

/// Inverse of L_Y. Throws DeterminantTooSmall when |det Y| < min_det.
Mat9 invert_l(const Mat3& y, double min_det = kDefaultMinDet);

/// The nine-vector of gradients of dvec X (resp. skewvec X, symvec X),
/// i.e. hat-nabla applied to those vector fields.
Vec9 grad_hat_dvec(const Grad27& grad_x);
Vec9 grad_hat_skewvec(const Grad27& grad_x);
Vec9 grad_hat_symvec(const Grad27& grad_x);

/// Right-hand side of the Curl-product formula at one point:
///   mat(L_diag grad^dvec X + L_skew grad^skewvec X + L_sym grad^symvec X)
///     + X Curl Y.
/// X itself only enters through X Curl Y.
Mat3 curl_product_pointwise(const Grad27& grad_x, const Mat3& x, const Mat3& y,
                            const Mat3& curl_y);

/// Skew specialisation: mat(L_Y vec(grad_axl)) + A Curl Y, where row i of
/// grad_axl is the gradient of the i-th component of axl A.
Mat3 curl_product_skew_pointwise(const Mat3& grad_axl, const SkewMat3& a,
                                 const Mat3& y, const Mat3& curl_y);

/// Both sides of the conjugation identity
///   (grad Psi)^{-T} sym(grad Phi^T grad Psi) (grad Psi)^{-1}
///     == sym(grad Phi (grad Psi)^{-1}).
struct ConjugationSides {
  Mat3 conjugated;
  Mat3 direct;
};
ConjugationSides sym_conjugation(const Mat3& grad_phi, const Mat3& grad_psi,
                                 double min_det = kDefaultMinDet);

/// Max absolute entry.
double max_abs(const Mat3& m);

}  // namespace kornkit

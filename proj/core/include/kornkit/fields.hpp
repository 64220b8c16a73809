#pragma once

// Regular-grid fields on axis-aligned cuboids and the finite-difference
// operators acting on them.
//
// Point ordering is row-major over the grid shape (last axis fastest), the
// same order used by the binary field file format.

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "kornkit/algebra.hpp"

namespace kornkit {

using Index3 = std::array<int, 3>;

struct GridSpec {
  static constexpr std::size_t kDefaultPointCap = std::size_t{1} << 24;

  int dim = 3;  // 1 only for boundary-face grids
  Index3 shape{1, 1, 1};  // unused trailing axes are 1
  std::array<double, 3> origin{0.0, 0.0, 0.0};
  double h = 1.0;

  /// Validated construction; throws GridTooSmall / GridTooLarge /
  /// InvalidArgument.
  static GridSpec make(int dim, std::span<const int> shape,
                       std::span<const double> origin, double h,
                       std::size_t point_cap = kDefaultPointCap);

  /// Cube [origin, origin + length]^dim with n points per axis.
  static GridSpec cube(int dim, int n, double length = 1.0,
                       double origin = 0.0);

  std::size_t point_count() const;
  std::size_t index(const Index3& ijk) const;
  Index3 multi_index(std::size_t linear) const;
  Eigen::Vector3d position(std::size_t linear) const;
  Eigen::Vector3d position(const Index3& ijk) const;

  bool is_interior(const Index3& ijk) const;
  bool is_boundary(const Index3& ijk) const { return !is_interior(ijk); }

  /// Same physical extent, spacing halved, 2n - 1 points per axis.
  GridSpec refined() const;

  /// Throws GridTooSmall unless every active axis has >= 3 points.
  void require_stencil_points() const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

class VectorField {
 public:
  VectorField() : VectorField(GridSpec{}, 3) {}
  VectorField(GridSpec grid, int components);
  VectorField(GridSpec grid, int components, std::vector<double> data);

  const GridSpec& grid() const { return grid_; }
  int components() const { return components_; }
  std::size_t size() const { return grid_.point_count(); }

  double& operator()(std::size_t point, int comp) {
    return data_[point * static_cast<std::size_t>(components_) +
                 static_cast<std::size_t>(comp)];
  }
  double operator()(std::size_t point, int comp) const {
    return data_[point * static_cast<std::size_t>(components_) +
                 static_cast<std::size_t>(comp)];
  }

  Vec3 vec3(std::size_t point) const;
  void set(std::size_t point, const Vec3& v);

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  double max_abs() const;

 private:
  GridSpec grid_;
  int components_;
  std::vector<double> data_;
};

class MatrixField {
 public:
  MatrixField() : MatrixField(GridSpec{}, 3, 3) {}
  MatrixField(GridSpec grid, int rows, int cols);
  MatrixField(GridSpec grid, int rows, int cols, std::vector<double> data);

  const GridSpec& grid() const { return grid_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t size() const { return grid_.point_count(); }

  double& operator()(std::size_t point, int r, int c) {
    return data_[offset(point) + static_cast<std::size_t>(r * cols_ + c)];
  }
  double operator()(std::size_t point, int r, int c) const {
    return data_[offset(point) + static_cast<std::size_t>(r * cols_ + c)];
  }

  /// Requires a 3x3 field.
  Mat3 mat3(std::size_t point) const;
  void set(std::size_t point, const Mat3& m);

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  double max_abs() const;

 private:
  std::size_t offset(std::size_t point) const {
    return point * static_cast<std::size_t>(rows_ * cols_);
  }

  GridSpec grid_;
  int rows_;
  int cols_;
  std::vector<double> data_;
};

VectorField sample_vector_field(
    const GridSpec& grid, int components,
    const std::function<Eigen::VectorXd(const Eigen::Vector3d&)>& f);
MatrixField sample_matrix_field(
    const GridSpec& grid, const std::function<Mat3(const Eigen::Vector3d&)>& f);

/// Second-order central differences inside, second-order one-sided
/// differences on boundary faces. Row i of the result is grad f_i.
MatrixField fd_grad(const VectorField& f);

/// Entrywise gradient of a 3x3 field on a 3-D grid.
std::vector<Grad27> fd_grad_entries(const MatrixField& m);

/// Row-wise curl of a 3x3 field: row l of the result is curl of row l.
MatrixField fd_curl_rowwise(const MatrixField& m);

/// Row-wise curl assembled from precomputed entry gradients.
Mat3 curl_from_grad(const Grad27& g);

MatrixField pointwise_product(const MatrixField& a, const MatrixField& b);

/// Max over interior points of max |a - b| entrywise.
double interior_max_abs_diff(const MatrixField& a, const MatrixField& b);
double interior_max_abs(const MatrixField& a);

struct ConvergenceReport {
  std::vector<double> spacings;
  std::vector<double> errors;
  /// orders[k] = log2(errors[k] / errors[k + 1]).
  std::vector<double> orders;

  double min_order() const;
  double finest_error() const { return errors.empty() ? 0.0 : errors.back(); }
};

/// Evaluates `error_at` on `coarsest` and successive factor-2 refinements.
ConvergenceReport measure_convergence(
    const GridSpec& coarsest, int levels,
    const std::function<double(const GridSpec&)>& error_at);

/// Max interior discrepancy between the FD Curl(XY) and the pointwise
/// product formula evaluated with FD entry gradients of X. Curl Y is taken
/// from `curl_y_exact` when given, else from fd_curl_rowwise(Y).
double curl_product_discrepancy(const MatrixField& x, const MatrixField& y,
                                const MatrixField* curl_y_exact = nullptr);

struct CurlProductCase {
  MatrixField x;
  MatrixField y;
  std::optional<MatrixField> curl_y;
};

ConvergenceReport verify_curl_product(
    const std::function<CurlProductCase(const GridSpec&)>& make_case,
    const GridSpec& coarsest, int levels);

}  // namespace kornkit

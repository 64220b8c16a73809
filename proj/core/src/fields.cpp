#include "kornkit/fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "kornkit/error.hpp"

namespace kornkit {

namespace {

std::size_t stride_of(const GridSpec& g, int axis) {
  std::size_t s = 1;
  for (int a = g.dim - 1; a > axis; --a) s *= static_cast<std::size_t>(g.shape[a]);
  return s;
}

// d/dx_axis of every component, for data laid out as [point][comp].
std::vector<double> fd_partial(const GridSpec& g, std::span<const double> data,
                               int comps, int axis) {
  const std::size_t n_points = g.point_count();
  const auto c = static_cast<std::size_t>(comps);
  const std::size_t stride = stride_of(g, axis) * c;
  const int n = g.shape[axis];
  const double inv2h = 1.0 / (2.0 * g.h);
  std::vector<double> out(n_points * c);

  for (std::size_t p = 0; p < n_points; ++p) {
    const int i = g.multi_index(p)[axis];
    const std::size_t base = p * c;
    for (std::size_t k = 0; k < c; ++k) {
      const std::size_t at = base + k;
      double d = 0.0;
      if (i == 0) {
        d = (-3.0 * data[at] + 4.0 * data[at + stride] - data[at + 2 * stride]) * inv2h;
      } else if (i == n - 1) {
        d = (3.0 * data[at] - 4.0 * data[at - stride] + data[at - 2 * stride]) * inv2h;
      } else {
        d = (data[at + stride] - data[at - stride]) * inv2h;
      }
      out[at] = d;
    }
  }
  return out;
}

void require_same_grid(const GridSpec& a, const GridSpec& b) {
  if (!(a == b)) {
    throw Error(ErrorKind::DimensionMismatch, "fields live on different grids");
  }
}

void require_3x3_on_3d(const MatrixField& m) {
  if (m.grid().dim != 3 || m.rows() != 3 || m.cols() != 3) {
    throw Error(ErrorKind::DimensionMismatch,
                "operation needs a 3x3 matrix field on a 3-D grid");
  }
}

}  // namespace

// ---------------------------------------------------------------- GridSpec

GridSpec GridSpec::make(int dim, std::span<const int> shape,
                        std::span<const double> origin, double h,
                        std::size_t point_cap) {
  if (dim < 1 || dim > 3) {
    throw Error(ErrorKind::InvalidArgument, "grid dimension must be 1, 2 or 3");
  }
  if (shape.size() != static_cast<std::size_t>(dim) ||
      origin.size() != static_cast<std::size_t>(dim)) {
    throw Error(ErrorKind::InvalidArgument,
                "shape and origin must have one entry per axis");
  }
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw Error(ErrorKind::InvalidArgument, "grid spacing must be positive");
  }
  GridSpec g;
  g.dim = dim;
  g.h = h;
  std::size_t count = 1;
  for (int a = 0; a < dim; ++a) {
    if (shape[a] < 1) {
      throw Error(ErrorKind::GridTooSmall, "every axis needs at least one point");
    }
    if (!std::isfinite(origin[a])) {
      throw Error(ErrorKind::InvalidArgument, "grid origin must be finite");
    }
    g.shape[a] = shape[a];
    g.origin[a] = origin[a];
    count *= static_cast<std::size_t>(shape[a]);
    if (count > point_cap) {
      throw Error(ErrorKind::GridTooLarge,
                  "grid exceeds the point cap of " + std::to_string(point_cap));
    }
  }
  return g;
}

GridSpec GridSpec::cube(int dim, int n, double length, double origin) {
  if (dim < 1 || dim > 3) throw Error(ErrorKind::InvalidArgument, "grid dimension must be 1, 2 or 3");
  if (n < 2) throw Error(ErrorKind::GridTooSmall, "cube grid needs n >= 2");
  const std::array<int, 3> shape{n, n, n};
  const std::array<double, 3> org{origin, origin, origin};
  return make(dim, std::span<const int>(shape.data(), static_cast<std::size_t>(dim)),
              std::span<const double>(org.data(), static_cast<std::size_t>(dim)),
              length / (n - 1));
}

std::size_t GridSpec::point_count() const {
  std::size_t n = 1;
  for (int a = 0; a < dim; ++a) n *= static_cast<std::size_t>(shape[a]);
  return n;
}

std::size_t GridSpec::index(const Index3& ijk) const {
  std::size_t linear = 0;
  for (int a = 0; a < dim; ++a) {
    linear = linear * static_cast<std::size_t>(shape[a]) +
             static_cast<std::size_t>(ijk[a]);
  }
  return linear;
}

Index3 GridSpec::multi_index(std::size_t linear) const {
  Index3 ijk{0, 0, 0};
  for (int a = dim - 1; a >= 0; --a) {
    const auto n = static_cast<std::size_t>(shape[a]);
    ijk[a] = static_cast<int>(linear % n);
    linear /= n;
  }
  return ijk;
}

Eigen::Vector3d GridSpec::position(const Index3& ijk) const {
  Eigen::Vector3d x = Eigen::Vector3d::Zero();
  for (int a = 0; a < dim; ++a) x(a) = origin[a] + h * ijk[a];
  return x;
}

Eigen::Vector3d GridSpec::position(std::size_t linear) const {
  return position(multi_index(linear));
}

bool GridSpec::is_interior(const Index3& ijk) const {
  for (int a = 0; a < dim; ++a) {
    if (ijk[a] <= 0 || ijk[a] >= shape[a] - 1) return false;
  }
  return true;
}

GridSpec GridSpec::refined() const {
  GridSpec g = *this;
  for (int a = 0; a < dim; ++a) g.shape[a] = 2 * shape[a] - 1;
  g.h = h / 2.0;
  return g;
}

void GridSpec::require_stencil_points() const {
  for (int a = 0; a < dim; ++a) {
    if (shape[a] < 3) {
      throw Error(ErrorKind::GridTooSmall,
                  "axis " + std::to_string(a) + " has fewer than 3 points");
    }
  }
}

// ---------------------------------------------------------------- fields

VectorField::VectorField(GridSpec grid, int components)
    : grid_(grid),
      components_(components),
      data_(grid.point_count() * static_cast<std::size_t>(components), 0.0) {
  if (components < 1) throw Error(ErrorKind::InvalidArgument, "components < 1");
}

VectorField::VectorField(GridSpec grid, int components, std::vector<double> data)
    : grid_(grid), components_(components), data_(std::move(data)) {
  if (components < 1) throw Error(ErrorKind::InvalidArgument, "components < 1");
  if (data_.size() != grid_.point_count() * static_cast<std::size_t>(components)) {
    throw Error(ErrorKind::DimensionMismatch, "vector field data length mismatch");
  }
  if (!std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); })) {
    throw Error(ErrorKind::NonFinite, "vector field has non-finite entries");
  }
}

Vec3 VectorField::vec3(std::size_t point) const {
  Vec3 v = Vec3::Zero();
  for (int k = 0; k < std::min(components_, 3); ++k) v(k) = (*this)(point, k);
  return v;
}

void VectorField::set(std::size_t point, const Vec3& v) {
  for (int k = 0; k < std::min(components_, 3); ++k) (*this)(point, k) = v(k);
}

double VectorField::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

MatrixField::MatrixField(GridSpec grid, int rows, int cols)
    : grid_(grid),
      rows_(rows),
      cols_(cols),
      data_(grid.point_count() * static_cast<std::size_t>(rows * cols), 0.0) {
  if (rows < 1 || cols < 1) throw Error(ErrorKind::InvalidArgument, "empty matrix shape");
}

MatrixField::MatrixField(GridSpec grid, int rows, int cols, std::vector<double> data)
    : grid_(grid), rows_(rows), cols_(cols), data_(std::move(data)) {
  if (rows < 1 || cols < 1) throw Error(ErrorKind::InvalidArgument, "empty matrix shape");
  if (data_.size() != grid_.point_count() * static_cast<std::size_t>(rows * cols)) {
    throw Error(ErrorKind::DimensionMismatch, "matrix field data length mismatch");
  }
  if (!std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); })) {
    throw Error(ErrorKind::NonFinite, "matrix field has non-finite entries");
  }
}

Mat3 MatrixField::mat3(std::size_t point) const {
  Mat3 m;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) m(r, c) = (*this)(point, r, c);
  }
  return m;
}

void MatrixField::set(std::size_t point, const Mat3& m) {
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) (*this)(point, r, c) = m(r, c);
  }
}

double MatrixField::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

VectorField sample_vector_field(
    const GridSpec& grid, int components,
    const std::function<Eigen::VectorXd(const Eigen::Vector3d&)>& f) {
  VectorField out(grid, components);
  for (std::size_t p = 0; p < grid.point_count(); ++p) {
    const Eigen::VectorXd v = f(grid.position(p));
    if (v.size() != components) {
      throw Error(ErrorKind::DimensionMismatch, "sampler returned wrong length");
    }
    for (int k = 0; k < components; ++k) out(p, k) = v(k);
  }
  return out;
}

MatrixField sample_matrix_field(
    const GridSpec& grid, const std::function<Mat3(const Eigen::Vector3d&)>& f) {
  MatrixField out(grid, 3, 3);
  for (std::size_t p = 0; p < grid.point_count(); ++p) out.set(p, f(grid.position(p)));
  return out;
}

// ---------------------------------------------------------------- FD

MatrixField fd_grad(const VectorField& f) {
  const GridSpec& g = f.grid();
  g.require_stencil_points();
  const int m = f.components();
  MatrixField out(g, m, g.dim);
  for (int axis = 0; axis < g.dim; ++axis) {
    const std::vector<double> d = fd_partial(g, f.data(), m, axis);
    for (std::size_t p = 0; p < g.point_count(); ++p) {
      for (int i = 0; i < m; ++i) {
        out(p, i, axis) = d[p * static_cast<std::size_t>(m) + static_cast<std::size_t>(i)];
      }
    }
  }
  return out;
}

std::vector<Grad27> fd_grad_entries(const MatrixField& m) {
  require_3x3_on_3d(m);
  const GridSpec& g = m.grid();
  g.require_stencil_points();
  std::vector<Grad27> out(g.point_count());
  for (int axis = 0; axis < 3; ++axis) {
    const std::vector<double> d = fd_partial(g, m.data(), 9, axis);
    for (std::size_t p = 0; p < g.point_count(); ++p) {
      for (int k = 0; k < 9; ++k) out[p](k / 3, k % 3, axis) = d[9 * p + static_cast<std::size_t>(k)];
    }
  }
  return out;
}

Mat3 curl_from_grad(const Grad27& g) {
  Mat3 c;
  for (int l = 0; l < 3; ++l) {
    c(l, 0) = g(l, 2, 1) - g(l, 1, 2);
    c(l, 1) = g(l, 0, 2) - g(l, 2, 0);
    c(l, 2) = g(l, 1, 0) - g(l, 0, 1);
  }
  return c;
}

MatrixField fd_curl_rowwise(const MatrixField& m) {
  if (m.grid().dim != 3) {
    throw Error(ErrorKind::DimensionMismatch, "row-wise Curl needs a 3-D grid");
  }
  const std::vector<Grad27> grads = fd_grad_entries(m);
  MatrixField out(m.grid(), 3, 3);
  for (std::size_t p = 0; p < grads.size(); ++p) out.set(p, curl_from_grad(grads[p]));
  return out;
}

MatrixField pointwise_product(const MatrixField& a, const MatrixField& b) {
  require_same_grid(a.grid(), b.grid());
  require_3x3_on_3d(a);
  require_3x3_on_3d(b);
  MatrixField out(a.grid(), 3, 3);
  for (std::size_t p = 0; p < a.size(); ++p) out.set(p, a.mat3(p) * b.mat3(p));
  return out;
}

double interior_max_abs_diff(const MatrixField& a, const MatrixField& b) {
  require_same_grid(a.grid(), b.grid());
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "matrix shapes differ");
  }
  const GridSpec& g = a.grid();
  double worst = 0.0;
  for (std::size_t p = 0; p < g.point_count(); ++p) {
    if (!g.is_interior(g.multi_index(p))) continue;
    for (int r = 0; r < a.rows(); ++r) {
      for (int c = 0; c < a.cols(); ++c) worst = std::max(worst, std::abs(a(p, r, c) - b(p, r, c)));
    }
  }
  return worst;
}

double interior_max_abs(const MatrixField& a) {
  return interior_max_abs_diff(a, MatrixField(a.grid(), a.rows(), a.cols()));
}

// ---------------------------------------------------------------- convergence

double ConvergenceReport::min_order() const {
  if (orders.empty()) return std::numeric_limits<double>::quiet_NaN();
  return *std::min_element(orders.begin(), orders.end());
}

ConvergenceReport measure_convergence(
    const GridSpec& coarsest, int levels,
    const std::function<double(const GridSpec&)>& error_at) {
  if (levels < 1) throw Error(ErrorKind::InvalidArgument, "levels must be >= 1");
  ConvergenceReport report;
  GridSpec g = coarsest;
  for (int l = 0; l < levels; ++l) {
    report.spacings.push_back(g.h);
    report.errors.push_back(error_at(g));
    if (l + 1 < levels) g = g.refined();
  }
  for (std::size_t k = 0; k + 1 < report.errors.size(); ++k) {
    report.orders.push_back(std::log2(report.errors[k] / report.errors[k + 1]));
  }
  return report;
}

double curl_product_discrepancy(const MatrixField& x, const MatrixField& y,
                                const MatrixField* curl_y_exact) {
  require_same_grid(x.grid(), y.grid());
  require_3x3_on_3d(x);
  require_3x3_on_3d(y);
  const MatrixField lhs = fd_curl_rowwise(pointwise_product(x, y));
  const MatrixField curl_y = curl_y_exact ? *curl_y_exact : fd_curl_rowwise(y);
  require_same_grid(curl_y.grid(), x.grid());
  const std::vector<Grad27> grad_x = fd_grad_entries(x);

  MatrixField rhs(x.grid(), 3, 3);
  for (std::size_t p = 0; p < x.size(); ++p) {
    rhs.set(p, curl_product_pointwise(grad_x[p], x.mat3(p), y.mat3(p), curl_y.mat3(p)));
  }
  return interior_max_abs_diff(lhs, rhs);
}

ConvergenceReport verify_curl_product(
    const std::function<CurlProductCase(const GridSpec&)>& make_case,
    const GridSpec& coarsest, int levels) {
  return measure_convergence(coarsest, levels, [&](const GridSpec& g) {
    const CurlProductCase c = make_case(g);
    return curl_product_discrepancy(c.x, c.y, c.curl_y ? &*c.curl_y : nullptr);
  });
}

}  // namespace kornkit

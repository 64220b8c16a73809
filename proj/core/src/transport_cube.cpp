#include <algorithm>
#include <cmath>
#include <string>

#include "kornkit/error.hpp"
#include "kornkit/transport.hpp"

namespace kornkit {

CoefficientTensorField::CoefficientTensorField(GridSpec grid)
    : grid_(grid),
      data_(grid.point_count() * static_cast<std::size_t>(grid.dim * grid.dim * grid.dim), 0.0) {}

SmallMat CoefficientTensorField::apply(std::size_t point, const SmallVec& zeta) const {
  const int nn = n();
  SmallMat out = SmallMat::Zero(nn, nn);
  for (int r = 0; r < nn; ++r) {
    for (int c = 0; c < nn; ++c) {
      double s = 0.0;
      for (int k = 0; k < nn; ++k) s += (*this)(point, r, c, k) * zeta(k);
      out(r, c) = s;
    }
  }
  return out;
}

SmallMat CoefficientTensorField::column_map(std::size_t point, int col) const {
  const int nn = n();
  SmallMat out(nn, nn);
  for (int r = 0; r < nn; ++r) {
    for (int k = 0; k < nn; ++k) out(r, k) = (*this)(point, r, col, k);
  }
  return out;
}

double CoefficientTensorField::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

CoefficientTensorField CoefficientTensorField::restrict_to(const Index3& lo, const Index3& hi) const {
  std::array<int, 3> shape{1, 1, 1};
  std::array<double, 3> origin{0, 0, 0};
  for (int a = 0; a < grid_.dim; ++a) {
    if (lo[a] < 0 || hi[a] >= grid_.shape[a] || lo[a] > hi[a]) {
      throw Error(ErrorKind::InvalidArgument, "restriction box outside the grid");
    }
    shape[a] = hi[a] - lo[a] + 1;
    origin[a] = grid_.origin[a] + grid_.h * lo[a];
  }
  const auto d = static_cast<std::size_t>(grid_.dim);
  CoefficientTensorField sub(GridSpec::make(grid_.dim, std::span<const int>(shape.data(), d),
                                            std::span<const double>(origin.data(), d), grid_.h));
  const std::size_t block = d * d * d;
  for (std::size_t p = 0; p < sub.grid().point_count(); ++p) {
    Index3 ijk = sub.grid().multi_index(p);
    for (int a = 0; a < grid_.dim; ++a) ijk[a] += lo[a];
    const std::size_t q = grid_.index(ijk);
    std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(q * block), block,
                sub.data_.begin() + static_cast<std::ptrdiff_t>(p * block));
  }
  return sub;
}

GridSpec face_grid(const GridSpec& grid, int axis) {
  if (grid.dim < 2) throw Error(ErrorKind::DimensionMismatch, "a face needs a grid of dim >= 2");
  if (axis < 0 || axis >= grid.dim) throw Error(ErrorKind::InvalidArgument, "axis out of range");
  std::array<int, 3> shape{1, 1, 1};
  std::array<double, 3> origin{0, 0, 0};
  int k = 0;
  for (int a = 0; a < grid.dim; ++a) {
    if (a == axis) continue;
    shape[k] = grid.shape[a];
    origin[k] = grid.origin[a];
    ++k;
  }
  const auto d = static_cast<std::size_t>(grid.dim - 1);
  return GridSpec::make(grid.dim - 1, std::span<const int>(shape.data(), d),
                        std::span<const double>(origin.data(), d), grid.h);
}

namespace {

bool close(double a, double b) { return std::abs(a - b) <= 1e-12 * (1.0 + std::abs(a) + std::abs(b)); }

void check_face(const GridSpec& expected, const GridSpec& face, int components, int n) {
  bool ok = face.dim == expected.dim && components == n && close(face.h, expected.h);
  for (int a = 0; ok && a < expected.dim; ++a) {
    ok = face.shape[a] == expected.shape[a] && close(face.origin[a], expected.origin[a]);
  }
  if (!ok) throw Error(ErrorKind::FaceMismatch, "face data grid does not match the cuboid face");
}

// Local cubic (fewer points on short lines) Lagrange interpolation of the
// node matrices at fractional node coordinate u.
SmallMat interpolate(const std::vector<SmallMat>& nodes, double u) {
  const int n = static_cast<int>(nodes.size());
  const int width = std::min(n, 4);
  int j0 = static_cast<int>(std::floor(u)) - (width - 1) / 2;
  j0 = std::clamp(j0, 0, n - width);
  SmallMat out = SmallMat::Zero(nodes[0].rows(), nodes[0].cols());
  for (int i = 0; i < width; ++i) {
    double w = 1.0;
    for (int j = 0; j < width; ++j) {
      if (j != i) w *= (u - (j0 + j)) / static_cast<double>(i - j);
    }
    out += w * nodes[static_cast<std::size_t>(j0 + i)];
  }
  return out;
}

}  // namespace

VectorField propagate_along(const CoefficientTensorField& g, const VectorField& face_data, int steps,
                            int axis, bool forward) {
  const GridSpec& grid = g.grid();
  const int nn = grid.dim;
  if (axis < 0 || axis >= nn) throw Error(ErrorKind::InvalidArgument, "axis out of range");
  if (steps < 1) throw Error(ErrorKind::InvalidArgument, "steps must be >= 1");
  const int n_line = grid.shape[axis];
  if (n_line < 2) throw Error(ErrorKind::GridTooSmall, "propagation axis needs >= 2 points");
  check_face(face_grid(grid, axis), face_data.grid(), face_data.components(), nn);

  const int substeps = (steps + n_line - 2) / (n_line - 1);
  const double du = 1.0 / substeps;
  const double scale = forward ? grid.h : -grid.h;

  VectorField out(grid, nn);
  std::vector<SmallMat> nodes(static_cast<std::size_t>(n_line));
  std::vector<std::size_t> points(static_cast<std::size_t>(n_line));

  for (std::size_t f = 0; f < face_data.size(); ++f) {
    const Index3 face_ijk = face_data.grid().multi_index(f);
    Index3 ijk{0, 0, 0};
    for (int a = 0, k = 0; a < nn; ++a) {
      if (a != axis) ijk[a] = face_ijk[k++];
    }
    for (int k = 0; k < n_line; ++k) {
      ijk[axis] = forward ? k : n_line - 1 - k;
      const std::size_t p = grid.index(ijk);
      points[static_cast<std::size_t>(k)] = p;
      nodes[static_cast<std::size_t>(k)] = scale * g.column_map(p, axis);
    }

    SmallVec z(nn);
    for (int c = 0; c < nn; ++c) z(c) = face_data(f, c);
    for (int c = 0; c < nn; ++c) out(points[0], c) = z(c);

    for (int cell = 0; cell + 1 < n_line; ++cell) {
      for (int s = 0; s < substeps; ++s) {
        const double u = cell + s * du;
        const SmallMat m0 = (s == 0) ? nodes[static_cast<std::size_t>(cell)] : interpolate(nodes, u);
        const SmallMat mh = interpolate(nodes, u + 0.5 * du);
        const SmallMat m1 = (s + 1 == substeps) ? nodes[static_cast<std::size_t>(cell + 1)]
                                                : interpolate(nodes, u + du);
        const SmallVec k1 = m0 * z;
        const SmallVec k2 = mh * (z + 0.5 * du * k1);
        const SmallVec k3 = mh * (z + 0.5 * du * k2);
        const SmallVec k4 = m1 * (z + du * k3);
        z += (du / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
      const std::size_t p = points[static_cast<std::size_t>(cell + 1)];
      for (int c = 0; c < nn; ++c) out(p, c) = z(c);
    }
  }
  return out;
}

VectorField propagate_cube(const CoefficientTensorField& g, const VectorField& face_data, int steps) {
  return propagate_along(g, face_data, steps, g.grid().dim - 1, true);
}

ResidualReport system_residual(const VectorField& zeta, const CoefficientTensorField& g, double tolerance) {
  if (!(zeta.grid() == g.grid())) throw Error(ErrorKind::DimensionMismatch, "zeta and G grids differ");
  const int nn = g.n();
  if (zeta.components() != nn) throw Error(ErrorKind::DimensionMismatch, "zeta must have N components");
  const MatrixField grad = fd_grad(zeta);
  const GridSpec& grid = g.grid();

  ResidualReport rep;
  rep.tolerance = tolerance;
  rep.per_axis.assign(static_cast<std::size_t>(nn), 0.0);
  SmallVec z(nn);
  for (std::size_t p = 0; p < grid.point_count(); ++p) {
    if (!grid.is_interior(grid.multi_index(p))) continue;
    for (int c = 0; c < nn; ++c) z(c) = zeta(p, c);
    const SmallMat gz = g.apply(p, z);
    for (int r = 0; r < nn; ++r) {
      for (int d = 0; d < nn; ++d) {
        double& slot = rep.per_axis[static_cast<std::size_t>(d)];
        slot = std::max(slot, std::abs(grad(p, r, d) - gz(r, d)));
      }
    }
  }
  rep.max_residual = *std::max_element(rep.per_axis.begin(), rep.per_axis.end());
  rep.pass = rep.max_residual <= tolerance;
  return rep;
}

}  // namespace kornkit

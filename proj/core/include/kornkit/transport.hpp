#pragma once

// Unique continuation for grad zeta = G zeta, zeta = 0 on a boundary patch,
// carried out numerically: integrate along lines, sweep a cuboid from one
// face, check the remaining directions via the full-system residual, and
// chain cuboids over a voxel domain.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "kornkit/fields.hpp"

namespace kornkit {

inline constexpr double kVanishTolerance = 1e-10;

using SmallMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;
using SmallVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1>;

/// Operator infinity-norm (max absolute row sum).
double operator_inf_norm(const Eigen::Ref<const Eigen::MatrixXd>& m);

/// A matrix-valued coefficient t -> G(t) on [a, b]. The sampler may blow up
/// at the endpoints; the line integrator and quadrature only call it where
/// documented.
struct LineCoefficient {
  double a = 0.0;
  double b = 1.0;
  int dim = 1;
  std::function<Eigen::MatrixXd(double)> sampler;

  static LineCoefficient constant(const Eigen::MatrixXd& g, double a, double b);
};

struct QuadratureSettings {
  double value_cap = 1e6;
  int max_depth = 40;
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  /// A leaf still unresolved at max_depth is tolerated when its own mass is
  /// below this (integrable endpoint singularities).
  double negligible_leaf = 1e-5;
};

struct IntegrabilityReport {
  bool finite = true;
  double integral = 0.0;  // value reached (partial when !finite)
  int deepest_level = 0;
  std::size_t evaluations = 0;
  std::string reason;     // empty when finite
};

/// Dyadic adaptive two-point Gauss estimate of int_from^to ||G(t)|| dt.
/// Never samples the interval endpoints.
IntegrabilityReport estimate_integrability(const LineCoefficient& g, double from, double to,
                                           const QuadratureSettings& settings = {});

struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> values;
  /// max-norm difference between the run with `steps` and with 2*steps at
  /// each shared time.
  std::vector<double> error_estimates;

  const Eigen::VectorXd& final_value() const { return values.back(); }
  double final_error() const { return error_estimates.back(); }
};

/// Fixed-step classical RK4 for zeta' = G(t) zeta on [a, b] with step
/// (b - a) / steps, plus a step-halving error estimate.
/// Throws NonFiniteCoefficient if G is not finite at any RK4 node.
Trajectory integrate_line(const LineCoefficient& g, const Eigen::VectorXd& zeta0, int steps);

/// x -> |zeta(a)| exp(int_a^x ||G||), built from one adaptive partition of
/// [a, b]. Construction throws NotIntegrable when the integral diverges.
class GronwallEnvelope {
 public:
  GronwallEnvelope(LineCoefficient g, double zeta_a_norm, QuadratureSettings settings = {});

  double operator()(double x) const;
  double integral_to(double x) const;
  double total_integral() const { return total_; }

 private:
  struct Leaf {
    double lo;
    double hi;
    double cumulative_before;
  };

  LineCoefficient g_;
  double zeta_a_norm_;
  QuadratureSettings settings_;
  std::vector<Leaf> leaves_;
  double total_ = 0.0;
};

GronwallEnvelope gronwall_bound(const LineCoefficient& g, double zeta_a_norm,
                                const QuadratureSettings& settings = {});

/// Per grid point a linear map R^N -> R^{NxN}, stored [row][col][input]:
/// (G zeta)(row, col) = sum_input G(row, col, input) zeta(input).
class CoefficientTensorField {
 public:
  explicit CoefficientTensorField(GridSpec grid);

  const GridSpec& grid() const { return grid_; }
  int n() const { return grid_.dim; }

  double& operator()(std::size_t point, int row, int col, int input) {
    return data_[offset(point, row, col, input)];
  }
  double operator()(std::size_t point, int row, int col, int input) const {
    return data_[offset(point, row, col, input)];
  }

  /// The NxN matrix G zeta at one point.
  SmallMat apply(std::size_t point, const SmallVec& zeta) const;
  /// v -> (G v) e^col as an NxN matrix.
  SmallMat column_map(std::size_t point, int col) const;

  double max_abs() const;

  /// Sub-block on an index box (inclusive bounds), with a shifted origin.
  CoefficientTensorField restrict_to(const Index3& lo, const Index3& hi) const;

 private:
  std::size_t offset(std::size_t point, int row, int col, int input) const {
    const auto nn = static_cast<std::size_t>(grid_.dim);
    return ((point * nn + static_cast<std::size_t>(row)) * nn + static_cast<std::size_t>(col)) * nn +
           static_cast<std::size_t>(input);
  }

  GridSpec grid_;
  std::vector<double> data_;
};

/// Grid made of every axis except `axis`, in order.
GridSpec face_grid(const GridSpec& grid, int axis);

/// Integrates each grid line parallel to the last axis from the face
/// x_N = origin_N, using G_gamma(x) v = (G(gamma, x) v) e^N with G
/// interpolated between nodes by local cubics. At least `steps` RK4 steps
/// per line, rounded up to a whole number per cell.
VectorField propagate_cube(const CoefficientTensorField& g, const VectorField& face_data, int steps);

/// Same along an arbitrary axis; `forward == false` starts from the far
/// face and integrates towards the origin.
VectorField propagate_along(const CoefficientTensorField& g, const VectorField& face_data,
                            int steps, int axis, bool forward);

struct ResidualReport {
  double max_residual = 0.0;
  std::vector<double> per_axis;
  double tolerance = kVanishTolerance;
  bool pass = true;
};

/// Interior max-norm of fd_grad(zeta) - G zeta, per axis.
ResidualReport system_residual(const VectorField& zeta, const CoefficientTensorField& g,
                               double tolerance = kVanishTolerance);

// ---------------------------------------------------------------- flooding

struct IndexBox {
  Index3 lo{0, 0, 0};
  Index3 hi{0, 0, 0};  // inclusive

  bool contains(const Index3& ijk, int dim) const;
  std::size_t count(int dim) const;
};

class VoxelDomain {
 public:
  explicit VoxelDomain(GridSpec grid);
  static VoxelDomain full(const GridSpec& grid);
  static VoxelDomain union_of(const GridSpec& grid, const std::vector<IndexBox>& boxes);

  const GridSpec& grid() const { return grid_; }
  bool contains(const Index3& ijk) const;
  bool contains(std::size_t point) const { return mask_[point] != 0; }
  void insert(std::size_t point) { mask_[point] = 1; }
  std::size_t count() const;

 private:
  GridSpec grid_;
  std::vector<std::uint8_t> mask_;
};

struct CoveringCuboid {
  IndexBox box;
  int axis = 0;
  bool forward = true;
  std::size_t newly_covered = 0;
  double zeta_max = 0.0;        // supplied zeta on the cuboid
  double propagated_max = 0.0;  // propagation from zero face data
  std::optional<ResidualReport> residual;  // absent when an axis has < 3 points
  bool pass = true;
};

struct FloodSettings {
  int steps = 64;
  double tolerance = -1.0;  // < 0: kVanishTolerance * (1 + max |zeta|)
  int overlap_cells = 2;
};

struct FloodReport {
  double tolerance = 0.0;
  double seed_max = 0.0;
  bool seed_ok = true;
  std::vector<CoveringCuboid> chain;
  std::optional<std::size_t> first_failure;
  std::size_t domain_points = 0;
  std::size_t covered_points = 0;
  bool pass = false;
  std::string verdict;
};

/// Greedy cuboid covering of a voxel domain starting from a seed box on
/// which zeta is verified to vanish. Throws SeedOutsideDomain or
/// DisconnectedDomain.
FloodReport flood_propagate(const VoxelDomain& domain, const IndexBox& seed,
                            const CoefficientTensorField& g, const VectorField& zeta,
                            const FloodSettings& settings = {});

// ---------------------------------------------------------------- 1/t

struct CounterexampleReport {
  double epsilon = 1e-3;
  // zeta(t) = t against zeta' = zeta / t on [epsilon, 1]
  double analytic_residual = 0.0;
  double numeric_residual = 0.0;
  double integrated_final = 0.0;  // RK4 from zeta(epsilon) = epsilon, at t = 1
  // int_0^1 dt / t
  IntegrabilityReport singular_integral;
  // G_eps = 1 / max(t, eps), zero data
  double truncated_integral = 0.0;
  double truncated_zero_max = 0.0;
  bool pass = false;
};

CounterexampleReport counterexample_demo(double epsilon = 1e-3, int steps = 4000);

}  // namespace kornkit

#pragma once

// The generalized Korn seminorm u -> ||sym(grad u P^{-1})||_{L^2} on a
// regular grid, its discrete kernel, the coefficient G_P that turns
// sym(grad u P^{-1}) = 0 into a first-order system for zeta = axl A, and
// recovery of infinitesimal rigid displacements Phi = A Psi + a.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/SparseCore>

#include "kornkit/algebra.hpp"
#include "kornkit/fields.hpp"
#include "kornkit/transport.hpp"

namespace kornkit {

using BoundaryMask = std::vector<std::uint8_t>;

/// Marks every point of one boundary face (axis, low or high side).
BoundaryMask face_mask(const GridSpec& grid, int axis, bool low_side);

class KornProblem {
 public:
  /// Throws DeterminantTooSmall if det P < min_det anywhere and
  /// EmptyBoundaryPatch if gamma marks no point.
  KornProblem(MatrixField p, BoundaryMask gamma, double min_det = kDefaultMinDet);

  /// Same checks on P, but no boundary condition at all.
  static KornProblem without_boundary(MatrixField p, double min_det = kDefaultMinDet);

  const GridSpec& grid() const { return p_.grid(); }
  const MatrixField& p() const { return p_; }
  const MatrixField& p_inverse() const { return p_inv_; }
  const BoundaryMask& gamma() const { return gamma_; }
  bool has_boundary() const;
  double min_det() const { return min_det_; }

 private:
  KornProblem(MatrixField p, BoundaryMask gamma, double min_det, bool allow_empty);

  MatrixField p_;
  MatrixField p_inv_;
  BoundaryMask gamma_;
  double min_det_;
};

/// Pointwise inverse; throws DeterminantTooSmall where det P < min_det.
MatrixField invert_checked(const MatrixField& p, double min_det = kDefaultMinDet);

/// Trapezoid weights (h^3, halved once per boundary axis); they sum to the
/// cuboid volume.
std::vector<double> quadrature_weights(const GridSpec& grid);

/// Discrete L^2 norm of sym(fd_grad(u) P^{-1}).
double seminorm(const VectorField& u, const MatrixField& p, double min_det = kDefaultMinDet);

enum class GramKind { L2, H1 };
std::string_view to_string(GramKind kind);

struct DiscreteForm {
  GridSpec grid;
  /// Full DOF index (3 * point + component) of every free DOF.
  std::vector<std::size_t> free_dofs;
  Eigen::SparseMatrix<double> form;
  Eigen::SparseMatrix<double> gram_l2;
  Eigen::SparseMatrix<double> gram_h1;

  const Eigen::SparseMatrix<double>& gram(GramKind kind) const {
    return kind == GramKind::L2 ? gram_l2 : gram_h1;
  }
  Eigen::VectorXd restrict(const VectorField& u) const;
  VectorField expand(const Eigen::VectorXd& free_values) const;
  /// u^T K u for the restriction of u to the free DOFs.
  double value(const VectorField& u) const;
};

/// Quadratic form u -> seminorm(u, P)^2 with u = 0 hard-eliminated on
/// gamma, plus the L^2 and H^1 Gram matrices on the same DOFs.
DiscreteForm assemble_form(const KornProblem& problem);

struct EigenSettings {
  std::size_t dense_cap = 6000;
  bool iterative_fallback = true;
  double kernel_rel_threshold = 1e-10;
  /// Eigenpairs resolved by the shift-invert path.
  int iterative_block = 8;
  int max_iterations = 500;
  double iterative_tol = 1e-10;
};

struct RayleighResult {
  double lambda_min = 0.0;
  VectorField eigvec;
  /// Smallest generalized eigenvalues, ascending (all of them on the dense
  /// path, iterative_block of them otherwise).
  std::vector<double> smallest;
  /// lambda < kernel_rel_threshold * trace(form) / trace(gram).
  double threshold = 0.0;
  std::size_t kernel_dimension = 0;
  bool dense = true;
  int iterations = 0;
};

RayleighResult min_rayleigh(const DiscreteForm& form, GramKind gram, const EigenSettings& settings = {});

/// Per point the map zeta -> -mat(L_P^{-1} vec(smat(zeta) Curl P)).
/// Curl P is computed by fd_curl_rowwise when not supplied.
CoefficientTensorField build_gp(const MatrixField& p, const MatrixField* curl_p = nullptr,
                                double min_det = kDefaultMinDet);

/// Interior max of |Curl(smat(zeta) P) - mat L_P(vec grad zeta) - smat(zeta) Curl P|
/// with every derivative taken by finite differences.
double gp_consistency_discrepancy(const VectorField& zeta, const MatrixField& p);

struct DisplacementDiagnostics {
  double seminorm = 0.0;
  double skewness_residual = 0.0;  // max |sym(grad u P^{-1})|
  double zeta_max = 0.0;
  bool boundary_condition_vacuous = false;
  double zeta_on_gamma = 0.0;      // max |zeta| on gamma (0 when vacuous)
  double u_on_gamma = 0.0;
  ResidualReport transport_residual;
};

struct ProbeSettings {
  EigenSettings eigen;
  double transport_tolerance = 1e-8;
};

/// Runs grad u P^{-1} = A, zeta = axl A, grad zeta = G_P zeta on one
/// displacement (normalised to max |u| = 1 unless u vanishes).
DisplacementDiagnostics probe_displacement(const KornProblem& problem, const VectorField& u,
                                           const ProbeSettings& settings = {});

struct ProbeReport {
  RayleighResult rayleigh;
  bool kernel_found = false;
  std::optional<DisplacementDiagnostics> diagnostics;
  std::string verdict;
};

ProbeReport norm_property_probe(const KornProblem& problem, const ProbeSettings& settings = {});

// ---------------------------------------------------------------- P families

enum class PFamily { Identity, RotationValued, GradedRoughness };
PFamily parse_p_family(std::string_view name);
std::string_view to_string(PFamily family);

struct PFamilyParams {
  double amplitude = 0.5;
  /// Graded roughness: rotation angle amplitude * r^exponent about e3, with
  /// r the distance to a point offset half a cell from the grid centre.
  /// |Curl P| grows like r^(exponent - 1).
  double exponent = 1.0;
  double scale = 1.0;  // P is multiplied by this
  std::uint64_t seed = 7;
};

MatrixField make_p_family(PFamily family, const GridSpec& grid, const PFamilyParams& params = {});

struct RoughnessSample {
  double exponent = 0.0;
  double lambda_min_l2 = 0.0;
  double lambda_min_h1 = 0.0;
  std::size_t kernel_dimension = 0;
  double curl_p_l2 = 0.0;
};

/// Conjecture probe: lambda_min trends as P loses Curl-integrability.
/// Evidence, not proof.
std::vector<RoughnessSample> roughness_sweep(const GridSpec& grid, const BoundaryMask& gamma,
                                             const std::vector<double>& exponents,
                                             const PFamilyParams& base = {},
                                             const EigenSettings& eigen = {});

// ---------------------------------------------------------------- rigid

struct RigidRecovery {
  SkewMat3 a_matrix;
  Vec3 translation = Vec3::Zero();
  double skewness_residual = 0.0;
  double constancy_residual = 0.0;
  double reconstruction_residual = 0.0;
};

/// A(x) = fd_grad(Phi) fd_grad(Psi)^{-1}, averaged and projected to so(3);
/// a = average of Phi - A Psi.
RigidRecovery rigid_recover(const VectorField& phi, const VectorField& psi,
                            double min_det = kDefaultMinDet);

}  // namespace kornkit

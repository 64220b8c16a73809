#pragma once

// Manufactured fields with closed-form derivatives. They feed the
// convergence studies and act as oracles for the FD operators.

#include <cstdint>
#include <string_view>
#include <vector>

#include "kornkit/algebra.hpp"
#include "kornkit/fields.hpp"
#include "kornkit/random.hpp"

namespace kornkit {

enum class AnalyticKind { Polynomial, Trigonometric, RotationValued };

/// Throws UnknownKind for anything but "polynomial", "trigonometric",
/// "rotation-valued".
AnalyticKind parse_analytic_kind(std::string_view name);
std::string_view to_string(AnalyticKind kind);

struct AnalyticParams {
  int degree = 2;             // polynomial: 0, 1 or 2
  bool multilinear = false;   // polynomial degree 2 without pure squares
  double amplitude = 1.0;
  double wavenumber = 1.0;    // trigonometric and rotation-valued
  std::uint64_t seed = 1;
};

/// One scalar with value and gradient; the building block for every entry.
class AnalyticScalar {
 public:
  static AnalyticScalar polynomial(Rng& rng, const AnalyticParams& p);
  static AnalyticScalar trigonometric(Rng& rng, const AnalyticParams& p);

  double value(const Vec3& x) const;
  Vec3 gradient(const Vec3& x) const;

 private:
  bool trig_ = false;
  double c0_ = 0.0;
  Vec3 linear_ = Vec3::Zero();
  Mat3 quad_ = Mat3::Zero();  // symmetric; value contains x^T quad x
  double amplitude_ = 0.0;
  Vec3 wave_ = Vec3::Zero();
  double phase_ = 0.0;
};

class AnalyticMatrixField {
 public:
  static AnalyticMatrixField make(AnalyticKind kind, const AnalyticParams& params);

  AnalyticKind kind() const { return kind_; }
  Mat3 value(const Vec3& x) const;
  Grad27 gradient(const Vec3& x) const;
  Mat3 curl(const Vec3& x) const;

  MatrixField sample(const GridSpec& grid) const;
  MatrixField sample_curl(const GridSpec& grid) const;

 private:
  AnalyticKind kind_ = AnalyticKind::Polynomial;
  std::vector<AnalyticScalar> entries_;  // 9 entries, or 3 for rotation axial
};

class AnalyticVectorField {
 public:
  /// Polynomial or trigonometric only; RotationValued throws UnknownKind.
  static AnalyticVectorField make(AnalyticKind kind, const AnalyticParams& params,
                                  int components = 3);

  Eigen::VectorXd value(const Vec3& x) const;
  /// Row i is the gradient of component i.
  Eigen::MatrixXd jacobian(const Vec3& x) const;

  VectorField sample(const GridSpec& grid) const;

 private:
  std::vector<AnalyticScalar> components_;
};

/// Rodrigues rotation exp(smat(w)).
Mat3 rodrigues(const Vec3& w);
/// d exp(smat(w)) / d w_m for m = 0, 1, 2.
std::array<Mat3, 3> rodrigues_derivatives(const Vec3& w);

}  // namespace kornkit
